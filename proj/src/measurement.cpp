#include "afcxpm/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <string>

#include "afcxpm/errors.hpp"

namespace afcxpm {

NoiseModel NoiseModel::none()
{
    NoiseModel m;
    m.shot_to_shot_sigma = 0.0;
    m.reference_residual_sigma = 0.0;
    m.detector_sigma = 0.0;
    return m;
}

double NoiseModel::correlation() const
{
    const double s = shot_to_shot_sigma;
    const double r = reference_residual_sigma;
    const double w = reference_correlation_weight;
    if (s == 0.0) {
        if (r != 0.0) throw ConfigError("reference_residual_sigma must be 0 when shot_to_shot_sigma is 0");
        return 0.0;
    }
    if (w == 0.0) {
        if (std::abs(r - s) > 1e-12 * s) {
            throw ConfigError("with reference_correlation_weight 0 the residual equals the shot-to-shot noise");
        }
        return 0.0;
    }
    const double rho = (1.0 + w * w - (r / s) * (r / s)) / (2.0 * w);
    if (rho > 1.0 || rho < -1.0) {
        throw ConfigError("reference_residual_sigma " + std::to_string(r) +
                          " is unreachable with reference_correlation_weight " + std::to_string(w) +
                          " (needs |correlation| <= 1)");
    }
    return rho;
}

void NoiseModel::validate() const
{
    if (!(shot_to_shot_sigma >= 0.0)) throw ConfigError("shot_to_shot_sigma must be >= 0");
    if (!(reference_residual_sigma >= 0.0)) throw ConfigError("reference_residual_sigma must be >= 0");
    if (!(detector_sigma >= 0.0)) throw ConfigError("detector_sigma must be >= 0");
    if (!(reference_correlation_weight >= 0.0)) throw ConfigError("reference_correlation_weight must be >= 0");
    correlation();
}

double ReadoutModel::effective_visibility() const
{
    return visibility * 2.0 * std::sqrt(lo_match) / (1.0 + lo_match);
}

void ReadoutModel::validate() const
{
    if (!(visibility >= 0.0 && visibility <= 1.0)) throw ConfigError("visibility must lie in [0, 1]");
    if (!(lo_match > 0.0)) throw ConfigError("lo_match must be > 0");
    if (!std::isfinite(bias)) throw ConfigError("bias must be finite");
    noise.validate();
}

double intensity_from_phase(const ReadoutModel& model, double phi)
{
    return 1.0 + model.effective_visibility() * std::cos(model.bias + phi);
}

double phase_from_intensity(const ReadoutModel& model, double intensity)
{
    const double v = model.effective_visibility();
    if (v == 0.0) throw DomainError("zero visibility: intensity carries no phase information");
    const double c = std::clamp((intensity - 1.0) / v, -1.0, 1.0);
    return std::acos(c) - model.bias;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index)
{
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(seed) ^ index);
}

MeasurementRecord simulate_shot(const ReadoutModel& model, double true_phase, std::uint64_t index)
{
    MeasurementRecord rec;
    rec.true_phase = true_phase;
    rec.index = index;
    rec.seed = model.noise.seed;

    const NoiseModel& nm = model.noise;
    double phase = true_phase;
    double detector = 0.0;
    if (!nm.noiseless() || nm.shot_to_shot_sigma > 0.0) {
        std::mt19937_64 rng(derive_seed(nm.seed, index));
        std::normal_distribution<double> unit(0.0, 1.0);
        const double rho = nm.correlation();
        const double z_ref = unit(rng);
        const double z_sig = rho * z_ref + std::sqrt(std::max(0.0, 1.0 - rho * rho)) * unit(rng);
        const double z_det = unit(rng);
        phase += nm.shot_to_shot_sigma * (z_sig - nm.reference_correlation_weight * z_ref);
        detector = nm.detector_sigma * z_det;
    }
    const double v = model.effective_visibility();
    rec.intensity = intensity_from_phase(model, phase) + v * detector;
    rec.inferred_phase = phase_from_intensity(model, rec.intensity);
    return rec;
}

ExperimentResult run_experiment(double true_phase, int repetitions, const ReadoutModel& model, int threads)
{
    if (repetitions < 1) throw ConfigError("repetitions j must be >= 1");
    model.validate();
    ExperimentResult out;
    out.seed = model.noise.seed;
    out.records.resize(static_cast<std::size_t>(repetitions));
#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1)
    for (int i = 0; i < repetitions; ++i) {
        out.records[static_cast<std::size_t>(i)] = simulate_shot(model, true_phase, static_cast<std::uint64_t>(i));
    }
    double sum = 0.0;
    for (const auto& r : out.records) sum += r.inferred_phase;
    out.mean = sum / repetitions;
    if (repetitions > 1) {
        double ss = 0.0;
        for (const auto& r : out.records) ss += (r.inferred_phase - out.mean) * (r.inferred_phase - out.mean);
        out.std_dev = std::sqrt(ss / (repetitions - 1));
    }
    out.sem = out.std_dev / std::sqrt(static_cast<double>(repetitions));
    return out;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& sigma)
{
    if (x.size() != y.size()) throw ConfigError("fit needs as many y values as x values");
    if (!sigma.empty() && sigma.size() != x.size()) throw ConfigError("fit needs one sigma per point");
    if (std::set<double>(x.begin(), x.end()).size() < 2) {
        throw NumericalError("degenerate fit: fewer than two distinct x values");
    }
    LineFit fit;
    fit.weighted = !sigma.empty() && std::all_of(sigma.begin(), sigma.end(), [](double s) { return s > 0.0; });

    const std::size_t n = x.size();
    double sw = 0.0, sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = fit.weighted ? 1.0 / (sigma[i] * sigma[i]) : 1.0;
        sw += w;
        sx += w * x[i];
        sy += w * y[i];
    }
    const double xm = sx / sw;
    const double ym = sy / sw;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = fit.weighted ? 1.0 / (sigma[i] * sigma[i]) : 1.0;
        sxx += w * (x[i] - xm) * (x[i] - xm);
        sxy += w * (x[i] - xm) * (y[i] - ym);
    }
    fit.slope = sxy / sxx;
    fit.intercept = ym - fit.slope * xm;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = fit.weighted ? 1.0 / (sigma[i] * sigma[i]) : 1.0;
        const double r = y[i] - fit.intercept - fit.slope * x[i];
        fit.chi2 += w * r * r;
    }
    // weighted: errors from the given σ; ordinary: from the residual scatter
    const double scale = fit.weighted ? 1.0 : (n > 2 ? fit.chi2 / static_cast<double>(n - 2) : 0.0);
    fit.slope_err = std::sqrt(scale / sxx);
    fit.intercept_err = std::sqrt(scale * (1.0 / sw + xm * xm / sxx));
    return fit;
}

SweepConfig SweepConfig::defaults()
{
    SweepConfig s;
    for (double mhz : {-100.0, -80.0, -65.0, -50.0, 50.0, 65.0, 80.0, 100.0, 120.0}) {
        s.detunings.push_back(mhz_to_angular(mhz));
    }
    s.photon_levels = {0.0, 2.5e7, 5e7, 7.5e7, 1e8};
    return s;
}

std::vector<SweepPoint> detuning_sweep(const SweepConfig& sweep, const MaterialParams& params,
                                       const ReadoutModel& model, int threads)
{
    if (sweep.photon_levels.size() < 3) throw ConfigError("detuning sweep needs at least 3 photon levels");
    if (sweep.detunings.empty()) throw ConfigError("detuning sweep needs at least one detuning");
    if (sweep.passes < 1) throw ConfigError("passes must be >= 1");
    model.validate();

    std::vector<SweepPoint> out;
    const std::size_t levels = sweep.photon_levels.size();
    for (std::size_t k = 0; k < sweep.detunings.size(); ++k) {
        SweepPoint p;
        p.detuning = sweep.detunings[k];
        p.analytic = phase_per_photon(params, p.detuning, sweep.transfer);
        std::vector<double> y, s;
        for (std::size_t l = 0; l < levels; ++l) {
            const double phi = sweep.passes * sweep.photon_levels[l] * p.analytic;
            ReadoutModel cell = model;
            cell.noise.seed = derive_seed(model.noise.seed, k * levels + l);
            const ExperimentResult r = run_experiment(phi, sweep.repetitions, cell, threads);
            y.push_back(r.mean);
            s.push_back(r.sem);
        }
        std::vector<double> x(sweep.photon_levels.begin(), sweep.photon_levels.end());
        for (double& v : x) v *= sweep.passes;
        p.fit = fit_line(x, y, s);
        out.push_back(p);
    }
    return out;
}

std::string_view to_string(Analyzer a)
{
    return a == Analyzer::TimeOfArrival ? "time_of_arrival" : "interferometer";
}

Analyzer parse_analyzer(std::string_view s)
{
    if (s == "time_of_arrival") return Analyzer::TimeOfArrival;
    if (s == "interferometer") return Analyzer::Interferometer;
    throw ConfigError("analyzer must be time_of_arrival|interferometer (got '" + std::string(s) + "')");
}

AnalyzerModel AnalyzerModel::matched(TimeBin state, double visibility)
{
    AnalyzerModel a;
    a.kind = (state == TimeBin::Early || state == TimeBin::Late) ? Analyzer::TimeOfArrival : Analyzer::Interferometer;
    a.visibility = visibility;
    return a;
}

double qubit_error_rate(const TimeBinState& state, bool interaction, double zeta_l, const AnalyzerModel& analyzer)
{
    if (!(zeta_l >= 0.0)) throw ConfigError("zeta_l must be >= 0");
    if (!(analyzer.late_background >= 0.0)) throw ConfigError("late_background must be >= 0");
    const bool z_basis = state.label == TimeBin::Early || state.label == TimeBin::Late;
    if (z_basis != (analyzer.kind == Analyzer::TimeOfArrival)) {
        throw ConfigError("analyzer " + std::string(to_string(analyzer.kind)) + " does not measure the basis of state " +
                          std::string(to_string(state.label)));
    }
    const double t = interaction ? std::exp(-zeta_l) : 1.0;
    const auto [ae, al] = state.bin_amplitudes();
    if (z_basis) {
        const double early = t * std::norm(ae);
        const double late = t * (std::norm(al) + analyzer.late_background);
        const double wrong = state.label == TimeBin::Early ? late : early;
        return wrong / (early + late);
    }
    if (!(analyzer.visibility >= 0.0 && analyzer.visibility <= 1.0)) {
        throw ConfigError("analyzer visibility must lie in [0, 1]");
    }
    // overlap of the delayed early bin with the late bin at the output ports
    const double energy = t * (std::norm(ae) + std::norm(al));
    const double fringe = t * 2.0 * std::abs(ae) * std::abs(al) * analyzer.visibility *
                          std::cos(std::arg(al) - std::arg(ae));
    const double plus_port = 0.5 * (energy + fringe);
    const double minus_port = 0.5 * (energy - fringe);
    const double wrong = state.label == TimeBin::Plus ? minus_port : plus_port;
    return wrong / (plus_port + minus_port);
}

std::vector<Fig4Row> reproduce_fig4(const Fig4Config& config, const MaterialParams& params,
                                    const ReadoutModel& model, int threads)
{
    std::vector<Fig4Row> rows;
    Fig4Row none;
    none.error_before = std::numeric_limits<double>::quiet_NaN();
    none.error_after = std::numeric_limits<double>::quiet_NaN();
    const ExperimentResult ref = run_experiment(0.0, config.repetitions, model, threads);
    none.phase_mean = ref.mean;
    none.phase_sem = ref.sem;
    rows.push_back(none);

    for (TimeBin b : {TimeBin::Early, TimeBin::Late, TimeBin::Plus, TimeBin::Minus}) {
        TimeBinState state{b};
        SignalField signal(state.modes(config.early_center, config.mode_duration), config.n_photons,
                           config.detuning, config.passes, config.window);
        Fig4Row row;
        row.state = b;
        row.phase_true = probe_phase_shift(signal, params, false).phi;
        const ExperimentResult r = run_experiment(row.phase_true, config.repetitions, model, threads);
        row.phase_mean = r.mean;
        row.phase_sem = r.sem;
        AnalyzerModel analyzer = AnalyzerModel::matched(b, model.visibility);
        analyzer.late_background = config.late_background;
        row.error_before = qubit_error_rate(state, false, config.zeta_l, analyzer);
        row.error_after = qubit_error_rate(state, true, config.zeta_l, analyzer);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace afcxpm
