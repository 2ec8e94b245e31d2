#include "afcxpm/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "afcxpm/errors.hpp"
#include "afcxpm/units.hpp"

namespace afcxpm {

namespace {

constexpr double kTwoLn2 = 2.0 * std::numbers::ln2;

// Reduction block size; fixed so sums do not depend on the thread count.
constexpr std::size_t kChunk = 64;

using cplx = std::complex<double>;

std::size_t chunks_of(std::size_t n) { return (n + kChunk - 1) / kChunk; }

}  // namespace

double EnsembleState::max_closure_error() const
{
    double e = 0.0;
    for (std::size_t i = 0; i < sigma_gg.size(); ++i) e = std::max(e, std::abs(sigma_gg[i] + sigma_ee[i] - 1.0));
    return e;
}

double EnsembleState::max_bloch_excess() const
{
    double e = -1.0;
    for (std::size_t i = 0; i < sigma_eg.size(); ++i) {
        e = std::max(e, std::norm(sigma_eg[i]) - sigma_gg[i] * sigma_ee[i]);
    }
    return e;
}

void FieldGrid::validate(double refractive_index) const
{
    if (z_slices < 1) throw ConfigError("solver needs at least one z slice");
    if (!(dt > 0.0)) throw ConfigError("time step must be > 0");
    if (dz > constants::c * dt / refractive_index) {
        std::ostringstream os;
        os << "z step " << dz << " m exceeds c dt / n = " << constants::c * dt / refractive_index << " m";
        throw ConfigError(os.str());
    }
}

EchoSolver::EchoSolver(const SpectralFeature& feature, const MaterialParams& params, const ProbeSpec& probe,
                       const SolverOptions& options)
    : probe_(probe), options_(options)
{
    params.validate();
    const CombParams& comb = feature.comb();
    if (options_.z_slices < 1) throw ConfigError("z_slices must be >= 1");
    if (options_.margin_periods < 0) throw ConfigError("margin_periods must be >= 0");
    if (options_.threads < 1) throw ConfigError("threads must be >= 1");
    if (!(probe_.duration > 0.0)) throw ConfigError("probe duration must be > 0");
    if (!(probe_.pulse_area >= 0.0)) throw ConfigError("probe pulse area must be >= 0");
    if (probe_.pulse_area >= kPi / 10.0 && !options_.strong) {
        throw ConfigError("probe pulse area " + std::to_string(probe_.pulse_area) +
                          " rad is outside the linear-response regime (< pi/10); set strong to override");
    }

    t_m_ = afcxpm::storage_time(comb);
    peak_ = probe_.peak_time > 0.0 ? probe_.peak_time : 5.0 * probe_.duration;
    // ∫ exp(−2 ln2 t²/τ²) dt = τ √(π / 2 ln2)
    rabi_peak_ = probe_.pulse_area / (probe_.duration * std::sqrt(kPi / kTwoLn2));
    decay_ = options_.include_decay ? kTwoPi * params.gamma : 0.0;

    int per_period = options_.points_per_period;
    if (per_period == 0) per_period = std::max(32, 8 * static_cast<int>(std::ceil(comb.finesse)));
    if (per_period < 32) throw ConfigError("points_per_period must be >= 32");

    double dt = 0.0;
    if (options_.steps_per_storage > 0) {
        dt = t_m_ / options_.steps_per_storage;
    } else {
        const double band_hz = comb.band_width() / kTwoPi;
        dt = std::min(t_m_ / 4096.0, 1.0 / (50.0 * band_hz));
    }
    grid_.z_slices = static_cast<std::size_t>(options_.z_slices);
    grid_.dz = params.length / options_.z_slices;
    grid_.dt = dt;
    grid_.validate(params.n);

    // δ grid: each comb period sampled at the same symmetric offsets.
    const int periods = comb.n_teeth + 2 * options_.margin_periods;
    const double dd = comb.delta_m / per_period;
    state_.z_slices = grid_.z_slices;
    state_.modes = static_cast<std::size_t>(periods) * static_cast<std::size_t>(per_period);
    state_.detunings.resize(state_.modes);
    state_.weights.resize(state_.modes);
    for (int p = 0; p < periods; ++p) {
        const double center = (p - 0.5 * (periods - 1)) * comb.delta_m;
        for (int i = 0; i < per_period; ++i) {
            const std::size_t j = static_cast<std::size_t>(p) * per_period + i;
            const double delta = center + ((i + 0.5) / per_period - 0.5) * comb.delta_m;
            state_.detunings[j] = delta;
            // continuum limit Σ κ_j → ∫ α(δ)/2π dδ gives field decay α/2
            state_.weights[j] = feature.alpha_at(delta) * dd / kTwoPi;
        }
    }
    const std::size_t cells = state_.z_slices * state_.modes;
    state_.sigma_gg.assign(cells, 1.0);
    state_.sigma_ee.assign(cells, 0.0);
    state_.sigma_eg.assign(cells, cplx{0.0, 0.0});

    rot_half_.resize(state_.modes);
    rot_full_.resize(state_.modes);
    for (std::size_t j = 0; j < state_.modes; ++j) {
        rot_half_[j] = std::polar(1.0, 0.5 * state_.detunings[j] * dt);
        rot_full_[j] = std::polar(1.0, state_.detunings[j] * dt);
    }
    dq_.assign(cells, 0.0);
    acc_q_.assign(cells, 0.0);
    dg_.assign(cells, 0.0);
    acc_g_.assign(cells, 0.0);
    stage_s_.assign(state_.modes, 0.0);
    partial_.assign(chunks_of(state_.modes), 0.0);

    trace_.dt = dt;
}

std::complex<double> EchoSolver::input_field(double t) const
{
    const double x = (t - peak_) / probe_.duration;
    return rabi_peak_ * std::exp(-kTwoLn2 * x * x);
}

StorageWindow EchoSolver::storage_window() const
{
    return {peak_ + 3.0 * probe_.duration, peak_ + std::min(t_m_ - 3.0 * probe_.duration, 0.5 * t_m_)};
}

void EchoSolver::set_state(const std::vector<double>& sigma_gg, const std::vector<double>& sigma_ee,
                           const std::vector<std::complex<double>>& sigma_eg)
{
    const std::size_t cells = state_.z_slices * state_.modes;
    if (sigma_gg.size() != cells || sigma_ee.size() != cells || sigma_eg.size() != cells) {
        throw ConfigError("state arrays must hold " + std::to_string(cells) + " cells");
    }
    state_.sigma_gg = sigma_gg;
    state_.sigma_ee = sigma_ee;
    state_.sigma_eg = sigma_eg;
}

void EchoSolver::apply_phase(double phi)
{
    const cplx k = std::polar(1.0, phi);
    for (auto& s : state_.sigma_eg) s *= k;
}

void EchoSolver::apply_signal_kick(const SignalField& signal, const MaterialParams& params, bool transfer)
{
    const StorageWindow w = storage_window();
    const double phi = probe_phase_shift(signal, params, transfer).phi;
    std::vector<Kick> pending;
    for (std::size_t i = 0; i < signal.modes().size(); ++i) {
        const TemporalMode& m = signal.modes()[i];
        if (!w.contains(m)) {
            std::ostringstream os;
            os << "signal mode centred at " << m.center * 1e9 << " ns is outside the storage window ["
               << w.begin * 1e9 << ", " << w.end * 1e9 << "] ns";
            throw WindowError(os.str());
        }
        if (m.center < time_) throw WindowError("signal mode centre lies before the current solver time");
        pending.push_back({m.center, phi * std::norm(m.amplitude)});
    }
    kicks_.insert(kicks_.end(), pending.begin(), pending.end());
    std::stable_sort(kicks_.begin(), kicks_.end(), [](const Kick& a, const Kick& b) { return a.time < b.time; });
}

void EchoSolver::evolve_to(double t_end)
{
    const double dt = grid_.dt;
    while (time_ < t_end - 1e-6 * dt) {
        // kicks land on the first step boundary at or after their time
        while (!kicks_.empty() && kicks_.front().time <= time_ + 1e-9 * dt) {
            apply_phase(kicks_.front().phase);
            kicks_.erase(kicks_.begin());
        }
        step(dt);
        ++steps_;
        time_ = static_cast<double>(steps_) * dt;
        check_invariants(steps_);
    }
}

void EchoSolver::step(double dt)
{
    const std::size_t nz = state_.z_slices;
    const std::size_t nm = state_.modes;
    const std::size_t nchunks = partial_.size();
    const double dz = grid_.dz;
    const double gamma = decay_;
    auto& gg = state_.sigma_gg;
    auto& ee = state_.sigma_ee;
    auto& s = state_.sigma_eg;
    const auto& kappa = state_.weights;
    const int threads = options_.threads;

    // Stage coefficients: base + c·dq_prev, rotated by e^{iδτ}.
    static constexpr double kStageCoef[4] = {0.0, 0.5, 0.5, 1.0};
    static constexpr double kStageWeight[4] = {1.0, 2.0, 2.0, 1.0};

    for (int stage = 0; stage < 4; ++stage) {
        const double c = kStageCoef[stage] * dt;
        const double w = kStageWeight[stage];
        const double tau = kStageCoef[stage] * dt;
        const std::vector<cplx>* rot = stage == 0 ? nullptr : (stage == 3 ? &rot_full_ : &rot_half_);
        cplx field = input_field(time_ + tau);

        for (std::size_t z = 0; z < nz; ++z) {
            const std::size_t base = z * nm;

            // stage coherence and polarisation sum
#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1)
            for (std::size_t ch = 0; ch < nchunks; ++ch) {
                const std::size_t j0 = ch * kChunk;
                const std::size_t j1 = std::min(nm, j0 + kChunk);
                cplx sum = 0.0;
                for (std::size_t j = j0; j < j1; ++j) {
                    const std::size_t i = base + j;
                    cplx sv = s[i];
                    if (rot) sv = (sv + c * dq_[i]) * (*rot)[j];
                    stage_s_[j] = sv;
                    sum += kappa[j] * sv;
                }
                partial_[ch] = sum;
            }
            cplx source = 0.0;
            for (std::size_t ch = 0; ch < nchunks; ++ch) source += partial_[ch];

            // ∂_z E = −i Σ κ σ_eg, midpoint value drives the slice
            const cplx e_mid = field - cplx(0.0, 0.5 * dz) * source;

#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1)
            for (std::size_t ch = 0; ch < nchunks; ++ch) {
                const std::size_t j0 = ch * kChunk;
                const std::size_t j1 = std::min(nm, j0 + kChunk);
                for (std::size_t j = j0; j < j1; ++j) {
                    const std::size_t i = base + j;
                    const cplx sv = stage_s_[j];
                    const double g = gg[i] + c * dg_[i];
                    const double e = ee[i] - c * dg_[i];
                    // σ̇_eg = iδσ_eg + iE(σ_ee − σ_gg) − (Γ/2)σ_eg, in the frame rotating with e^{iδτ}
                    cplx ds = cplx(0.0, e - g) * e_mid - 0.5 * gamma * sv;
                    if (rot) ds *= std::conj((*rot)[j]);
                    // σ̇_gg = −2 Im(E σ_eg*) + Γ σ_ee
                    const double dgv = -2.0 * (e_mid * std::conj(sv)).imag() + gamma * e;
                    dq_[i] = ds;
                    dg_[i] = dgv;
                    if (stage == 0) {
                        acc_q_[i] = ds;
                        acc_g_[i] = dgv;
                    } else {
                        acc_q_[i] += w * ds;
                        acc_g_[i] += w * dgv;
                    }
                }
            }
            field -= cplx(0.0, dz) * source;
        }

        if (stage == 0) {
            trace_.t.push_back(time_);
            trace_.input.push_back(input_field(time_));
            trace_.output.push_back(field);
        }
    }

    const double h = dt / 6.0;
    for (std::size_t z = 0; z < nz; ++z) {
        const std::size_t base = z * nm;
        for (std::size_t j = 0; j < nm; ++j) {
            const std::size_t i = base + j;
            s[i] = (s[i] + h * acc_q_[i]) * rot_full_[j];
            gg[i] += h * acc_g_[i];
            ee[i] -= h * acc_g_[i];
        }
    }
}

void EchoSolver::check_invariants(std::size_t step_index)
{
    const double tol = options_.invariant_tolerance;
    double closure = 0.0;
    double bloch = -1.0;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < state_.sigma_eg.size(); ++i) {
        const double a2 = std::norm(state_.sigma_eg[i]);
        if (!std::isfinite(a2) || a2 > 1.0 + tol) {
            std::ostringstream os;
            os << "coherence norm grew to " << std::sqrt(a2) << " at step " << step_index << " (t = " << time_ * 1e9
               << " ns, slice " << i / state_.modes << ", mode " << i % state_.modes
               << "); reduce the time step or pulse area";
            throw NumericalError(os.str());
        }
        closure = std::max(closure, std::abs(state_.sigma_gg[i] + state_.sigma_ee[i] - 1.0));
        const double b = a2 - state_.sigma_gg[i] * state_.sigma_ee[i];
        if (b > bloch) {
            bloch = b;
            worst = i;
        }
    }
    max_closure_ = std::max(max_closure_, closure);
    max_bloch_ = std::max(max_bloch_, bloch);
    if (closure > tol || bloch > tol) {
        std::ostringstream os;
        os << "two-level invariants violated at step " << step_index << ": closure error " << closure
           << ", Bloch excess " << bloch << " (cell " << worst << ")";
        throw NumericalError(os.str());
    }
}

EchoWindows EchoWindows::around(double input_peak, double storage_time)
{
    return {input_peak - 0.5 * storage_time, input_peak + 0.5 * storage_time, input_peak + 0.5 * storage_time,
            input_peak + 1.5 * storage_time};
}

void EchoWindows::validate() const
{
    if (!(input_end > input_begin) || !(echo_end > echo_begin)) {
        throw NumericalError("windowing error: empty input or echo window");
    }
    if (echo_begin < input_end && input_begin < echo_end) {
        throw NumericalError("windowing error: input and echo windows overlap");
    }
}

namespace {

double window_energy(const OutputTrace& trace, const std::vector<cplx>& v, double begin, double end)
{
    double e = 0.0;
    for (std::size_t i = 0; i < trace.t.size(); ++i) {
        if (trace.t[i] >= begin && trace.t[i] < end) e += std::norm(v[i]);
    }
    return e * trace.dt;
}

void require_covered(const OutputTrace& trace, double end)
{
    if (trace.t.empty() || trace.t.back() + trace.dt < end * (1.0 - 1e-12)) {
        throw NumericalError("windowing error: trace ends before the echo window closes");
    }
}

}  // namespace

double echo_efficiency_numeric(const OutputTrace& trace, const EchoWindows& windows)
{
    windows.validate();
    require_covered(trace, windows.echo_end);
    double e_in = 0.0;
    for (const auto& v : trace.input) e_in += std::norm(v);
    e_in *= trace.dt;
    if (!(e_in > 0.0)) throw NumericalError("trace carries no input energy");
    return window_energy(trace, trace.output, windows.echo_begin, windows.echo_end) / e_in;
}

EchoAnalysis analyze_echo(const OutputTrace& trace, const EchoWindows& windows, double input_peak,
                          double storage_time)
{
    windows.validate();
    require_covered(trace, windows.echo_end);
    EchoAnalysis out;
    for (const auto& v : trace.input) out.input_energy += std::norm(v);
    out.input_energy *= trace.dt;
    out.transmitted_energy = window_energy(trace, trace.output, windows.input_begin, windows.input_end);
    out.echo_energy = window_energy(trace, trace.output, windows.echo_begin, windows.echo_end);
    out.efficiency = out.echo_energy / out.input_energy;

    // peak of |E|² in the echo window with parabolic refinement
    std::size_t best = 0;
    double best_p = -1.0;
    for (std::size_t i = 0; i < trace.t.size(); ++i) {
        if (trace.t[i] < windows.echo_begin || trace.t[i] >= windows.echo_end) continue;
        const double p = std::norm(trace.output[i]);
        if (p > best_p) {
            best_p = p;
            best = i;
        }
    }
    double t_peak = trace.t[best];
    if (best > 0 && best + 1 < trace.t.size()) {
        const double y0 = std::norm(trace.output[best - 1]);
        const double y1 = best_p;
        const double y2 = std::norm(trace.output[best + 1]);
        const double den = y0 - 2.0 * y1 + y2;
        if (den < 0.0) t_peak += 0.5 * (y0 - y2) / den * trace.dt;
    }
    out.echo_delay = t_peak - input_peak;

    // overlap with the input delayed by t_m (linear interpolation of the input samples)
    cplx proj = 0.0;
    for (std::size_t i = 0; i < trace.t.size(); ++i) {
        if (trace.t[i] < windows.echo_begin || trace.t[i] >= windows.echo_end) continue;
        const double x = (trace.t[i] - storage_time) / trace.dt;
        if (x < 0.0) continue;
        const auto k = static_cast<std::size_t>(x);
        if (k + 1 >= trace.input.size()) continue;
        const double f = x - static_cast<double>(k);
        const cplx delayed = (1.0 - f) * trace.input[k] + f * trace.input[k + 1];
        proj += std::conj(delayed) * trace.output[i];
    }
    out.echo_amplitude = proj * trace.dt / out.input_energy;
    out.echo_phase = std::arg(proj);
    return out;
}

std::complex<double> echo_overlap(const OutputTrace& a, const OutputTrace& b, const EchoWindows& windows)
{
    windows.validate();
    if (a.t.size() != b.t.size() || a.dt != b.dt) {
        throw NumericalError("traces must share a time grid to be compared");
    }
    cplx sum = 0.0;
    for (std::size_t i = 0; i < a.t.size(); ++i) {
        if (a.t[i] >= windows.echo_begin && a.t[i] < windows.echo_end) sum += std::conj(a.output[i]) * b.output[i];
    }
    return sum * a.dt;
}

double echo_phase_difference(const OutputTrace& reference, const OutputTrace& perturbed, const EchoWindows& windows)
{
    const cplx o = echo_overlap(reference, perturbed, windows);
    if (std::abs(o) == 0.0) throw NumericalError("no echo in the reference trace to compare phases against");
    return std::arg(o);
}

EchoRun simulate_echo(const SpectralFeature& feature, const MaterialParams& params, const ProbeSpec& probe,
                      const SolverOptions& options, const SignalField* signal, bool transfer)
{
    EchoSolver solver(feature, params, probe, options);
    if (signal) solver.apply_signal_kick(*signal, params, transfer);
    solver.evolve_to(solver.default_end_time());
    EchoRun run;
    run.storage_time = solver.storage_time();
    run.input_peak = solver.input_peak_time();
    run.windows = EchoWindows::around(run.input_peak, run.storage_time);
    run.trace = solver.trace();
    run.analysis = analyze_echo(run.trace, run.windows, run.input_peak, run.storage_time);
    run.max_closure_error = solver.max_closure_error();
    run.max_bloch_excess = solver.max_bloch_excess();
    return run;
}

}  // namespace afcxpm
