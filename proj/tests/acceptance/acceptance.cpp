// End-to-end acceptance checks. One line per criterion, non-zero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "afcxpm/afc.hpp"
#include "afcxpm/dynamics.hpp"
#include "afcxpm/errors.hpp"
#include "afcxpm/feasibility.hpp"
#include "afcxpm/material.hpp"
#include "afcxpm/measurement.hpp"
#include "afcxpm/spectrum.hpp"
#include "afcxpm/xpm.hpp"

using namespace afcxpm;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Coarse solver grid: t_m/1024 steps and 16 slices.
SolverOptions coarse()
{
    SolverOptions o;
    o.steps_per_storage = 1024;
    o.z_slices = 16;
    return o;
}

CombParams clean_comb(double d, double F)
{
    CombParams c;
    c.peak_od = d;
    c.finesse = F;
    c.background_od = 0.0;
    c.pit_od = 0.0;
    return c;
}

SpectralFeature feature_of(const CombParams& c)
{
    GridSpec g;
    g.points = std::size_t{1} << 16;
    return build_feature(c, g, tm_linbo3().length);
}

// Worst invariant excess seen by any solver run in this process.
double g_worst_closure = 0.0;
double g_worst_bloch = 0.0;
int g_solver_runs = 0;

EchoRun track(EchoRun run)
{
    g_worst_closure = std::max(g_worst_closure, run.max_closure_error);
    g_worst_bloch = std::max(g_worst_bloch, run.max_bloch_excess);
    ++g_solver_runs;
    return run;
}

double std_dev(const std::vector<double>& v)
{
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

Outcome phase_per_photon_value()
{
    const double phi = phase_per_photon(tm_linbo3(), mhz_to_angular(100.0), false);
    const double rel = std::abs(phi / 1.12e-9 - 1.0);
    const double vs_measured = std::abs(1.10e-9 / phi - 1.0);
    return {rel < 0.01 && vs_measured < 0.03,
            fmt("phi1 = %.5e rad/photon (rel. dev. %.2f%% from 1.12e-9; measured 1.10e-9 is %.2f%% off)", phi,
                100 * rel, 100 * vs_measured)};
}

Outcome design_point()
{
    const auto r = check_conditions(example_design_point());
    const double c1 = r.get("cond1").bound;
    const double c2 = r.get("cond2").bound;
    const double bw = r.get("cond_bw").bound;
    const bool ok = r.all_satisfied() && std::abs(c1 / 504.0 - 1) < 0.01 && std::abs(c2 / 925.0 - 1) < 0.01 &&
                    std::abs(bw / 917.0 - 1) < 0.01 && std::abs(r.eta / 0.499 - 1) < 0.01;
    return {ok, fmt("all satisfied: %s; eta %.4f, 80pi/eta %.1f, cond2 %.1f, bandwidth %.1f (m = %d)",
                    r.all_satisfied() ? "yes" : "no", r.eta, c1, c2, bw, r.point.passes)};
}

Outcome echo_timing()
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto p = tm_linbo3();
    const auto run = track(simulate_echo(build_feature(experimental_comb(), GridSpec{}, p.length), p, ProbeSpec{}));
    const double elapsed = seconds_since(t0);
    const double delay = run.analysis.echo_delay * 1e9;
    return {std::abs(delay - 181.8) <= 2.0 && elapsed < 60.0,
            fmt("first echo %.2f ns after the input peak (181.8 +- 2), default grids, %.1f s", delay, elapsed)};
}

Outcome efficiency_oracle()
{
    double worst = 0.0;
    std::string worst_at;
    for (double d : {0.25, 0.5, 1.0, 2.0}) {
        for (double F : {3.0, 4.0, 6.0}) {
            const auto run = track(simulate_echo(feature_of(clean_comb(d, F)), tm_linbo3(), ProbeSpec{}, coarse()));
            const double dev = std::abs(run.analysis.efficiency / recall_efficiency(d, F) - 1.0);
            if (dev > worst) {
                worst = dev;
                worst_at = fmt("d=%g F=%g", d, F);
            }
        }
    }
    // the coarse grid is checked against the default one on a single point
    const auto feature = feature_of(clean_comb(1.0, 4.0));
    const double fine = track(simulate_echo(feature, tm_linbo3(), ProbeSpec{})).analysis.efficiency;
    const double rough = track(simulate_echo(feature, tm_linbo3(), ProbeSpec{}, coarse())).analysis.efficiency;
    const double grid_dev = std::abs(rough / fine - 1.0);
    return {worst < 0.10 && grid_dev < 1e-3,
            fmt("12 (d, F) points, worst deviation %.2f%% at %s; coarse vs default grid %.1e", 100 * worst,
                worst_at.c_str(), grid_dev)};
}

Outcome kick_fidelity()
{
    const auto p = tm_linbo3();
    const double detuning = mhz_to_angular(100.0);
    const auto feature = feature_of(clean_comb(1.0, 4.0));
    const auto o = coarse();
    const auto w = EchoSolver(feature, p, ProbeSpec{}, o).storage_window();
    const auto ref = track(simulate_echo(feature, p, ProbeSpec{}, o));
    auto kicked_phase = [&](const SignalField& sig) {
        return echo_phase_difference(ref.trace, track(simulate_echo(feature, p, ProbeSpec{}, o, &sig)).trace,
                                     ref.windows);
    };

    double worst_err = 0.0;
    for (double phi : {0.01, 0.1, 0.5}) {
        const double n = phi / phase_per_photon(p, detuning, false);
        const SignalField sig({{0.5 * (w.begin + w.end), 10e-9}}, n, detuning, 1, w);
        worst_err = std::max(worst_err, std::abs(kicked_phase(sig) - phi));
    }

    const double n = 0.1 / phase_per_photon(p, detuning, false);
    std::vector<double> phases;
    for (double t : {w.begin + 10e-9, 0.5 * (w.begin + w.end), w.end - 10e-9}) {
        phases.push_back(kicked_phase(SignalField({{t, 10e-9}}, n, detuning, 1, w)));
    }
    for (TimeBin b : {TimeBin::Early, TimeBin::Late, TimeBin::Plus, TimeBin::Minus}) {
        phases.push_back(kicked_phase(SignalField(TimeBinState{b}.modes(w.begin + 15e-9, 10e-9), n, detuning, 1, w)));
    }
    const auto [lo, hi] = std::minmax_element(phases.begin(), phases.end());
    const double spread = *hi - *lo;
    return {worst_err < 1e-3 && spread < 1e-6,
            fmt("worst |numeric - phi| %.2e rad over phi in {0.01, 0.1, 0.5}; spread %.2e rad over 3 kick times "
                "and 4 time-bin states",
                worst_err, spread)};
}

Outcome noise_statistics()
{
    ReadoutModel m;
    m.noise.detector_sigma = 0.0;
    auto sem_estimate = [&](int j) {
        std::vector<double> means;
        for (int t = 0; t < 1000; ++t) {
            ReadoutModel trial = m;
            trial.noise.seed = derive_seed(20240601, static_cast<std::uint64_t>(t));
            means.push_back(run_experiment(0.0, j, trial).mean);
        }
        return std_dev(means);
    };
    const double at200 = sem_estimate(200);
    std::vector<double> lx, ly;
    for (int j : {1, 10, 100, 1000}) {
        lx.push_back(std::log(static_cast<double>(j)));
        ly.push_back(std::log(sem_estimate(j)));
    }
    const double slope = fit_line(lx, ly).slope;
    return {std::abs(at200 / 7.07e-3 - 1.0) < 0.15 && std::abs(slope + 0.5) < 0.05,
            fmt("std of mean at j=200: %.3f mrad (7.07 +- 15%%); log-log exponent %.4f (-0.5 +- 0.05)", 1e3 * at200,
                slope)};
}

Outcome fig3()
{
    ReadoutModel clean;
    clean.noise = NoiseModel::none();
    double worst_exact = 0.0;
    bool signs = true;
    for (const auto& pt : detuning_sweep(SweepConfig::defaults(), tm_linbo3(), clean)) {
        worst_exact = std::max(worst_exact, std::abs(pt.fit.slope / pt.analytic - 1.0));
        signs = signs && ((pt.detuning > 0) == (pt.fit.slope > 0));
    }
    ReadoutModel noisy;
    double worst_sigma = 0.0;
    for (const auto& pt : detuning_sweep(SweepConfig::defaults(), tm_linbo3(), noisy)) {
        worst_sigma = std::max(worst_sigma, std::abs(pt.fit.slope - pt.analytic) / pt.fit.slope_err);
        signs = signs && ((pt.detuning > 0) == (pt.fit.slope > 0));
    }
    return {worst_exact < 1e-12 && worst_sigma < 3.0 && signs,
            fmt("noiseless worst rel. error %.1e; noisy worst |slope - analytic| = %.2f sigma (j=200); red/blue "
                "signs %s",
                worst_exact, worst_sigma, signs ? "opposite" : "WRONG")};
}

Outcome fig4()
{
    const auto rows = reproduce_fig4(Fig4Config{}, tm_linbo3(), ReadoutModel{});
    bool identical = true, zero_error_change = true;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        identical = identical && rows[i].phase_mean == rows[1].phase_mean && rows[i].phase_true == rows[1].phase_true;
        zero_error_change = zero_error_change && rows[i].error_after - rows[i].error_before == 0.0;
    }
    const double shift_true = rows[1].phase_true - rows[0].phase_true;
    const double shift_mean = rows[1].phase_mean - rows[0].phase_mean;
    const bool near = std::abs(shift_true / 0.077 - 1.0) < 0.01 && std::abs(shift_mean / 0.077 - 1.0) < 0.05;
    return {rows.size() == 5 && identical && zero_error_change && near,
            fmt("4 states identical: %s; shift vs no signal %.4f rad (simulated mean %.4f); error-rate change %s",
                identical ? "yes" : "no", shift_true, shift_mean, zero_error_change ? "0" : "non-zero")};
}

Outcome properties()
{
    std::vector<std::string> failed;

    // closure and Bloch bound: the solver checks them every step and would
    // have thrown; these are the worst values recorded across all runs
    if (g_solver_runs == 0 || g_worst_closure > 1e-9 || g_worst_bloch > 1e-9) failed.push_back("invariants");

    CombParams flat = clean_comb(0.0, 4.0);
    flat.background_od = 1.0;
    flat.pit_od = 1.0;
    SolverOptions o = coarse();
    o.margin_periods = 6;
    const auto bl = track(simulate_echo(feature_of(flat), tm_linbo3(), ProbeSpec{}, o));
    double in = 0.0, out = 0.0;
    for (std::size_t i = 0; i < bl.trace.t.size(); ++i) {
        in += std::norm(bl.trace.input[i]);
        out += std::norm(bl.trace.output[i]);
    }
    const double beer = out / in / std::exp(-1.0) - 1.0;
    if (std::abs(beer) > 0.02) failed.push_back("beer-lambert");

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> mhz(20.0, 2000.0), photons(1e3, 1e9);
    const auto p = tm_linbo3();
    double odd = 0.0, lin = 0.0;
    for (int k = 0; k < 200; ++k) {
        const double delta = mhz_to_angular(mhz(rng));
        odd = std::max(odd, std::abs(phase_per_photon(p, -delta, false) + phase_per_photon(p, delta, false)) /
                                std::abs(phase_per_photon(p, delta, false)));
        const StorageWindow w{0.0, 1.0};
        const double n = photons(rng);
        const double a = probe_phase_shift(SignalField({{0.5, 1e-6}}, n, delta, 1, w), p, false).phi;
        const double b = probe_phase_shift(SignalField({{0.5, 1e-6}}, 3 * n, delta, 1, w), p, false).phi;
        const double c = probe_phase_shift(SignalField({{0.5, 1e-6}}, n, delta, 7, w), p, false).phi;
        lin = std::max({lin, std::abs(b / (3 * a) - 1.0), std::abs(c / (7 * a) - 1.0)});
    }
    if (odd > 1e-15) failed.push_back("odd symmetry");
    if (lin > 1e-12) failed.push_back("linearity");

    ReadoutModel m;
    m.noise.seed = 99;
    bool same = run_experiment(0.05, 300, m, 1).records.size() == 300;
    const auto r1 = run_experiment(0.05, 300, m, 1);
    const auto r2 = run_experiment(0.05, 300, m, 2);
    for (std::size_t i = 0; i < r1.records.size(); ++i) {
        same = same && r1.records[i].inferred_phase == r2.records[i].inferred_phase;
    }
    const auto s1 = detuning_sweep(SweepConfig::defaults(), p, m, 1);
    const auto s2 = detuning_sweep(SweepConfig::defaults(), p, m, 2);
    for (std::size_t i = 0; i < s1.size(); ++i) same = same && s1[i].fit.slope == s2[i].fit.slope;
    const auto f1 = reproduce_fig4(Fig4Config{}, p, m);
    const auto f2 = reproduce_fig4(Fig4Config{}, p, m);
    for (std::size_t i = 0; i < f1.size(); ++i) same = same && f1[i].phase_mean == f2[i].phase_mean;
    ReadoutModel other = m;
    other.noise.seed = 100;
    same = same && run_experiment(0.05, 300, other).mean != r1.mean;
    if (!same) failed.push_back("seed determinism");

    std::string which;
    for (const auto& f : failed) which += (which.empty() ? "" : ", ") + f;
    return {failed.empty(),
            fmt("closure %.1e / Bloch excess %.1e over %d solver runs; Beer-Lambert %+.2f%%; odd %.0e; linear %.0e; "
                "seed-determinism %s%s%s",
                g_worst_closure, g_worst_bloch, g_solver_runs, 100 * beer, odd, lin, same ? "ok" : "broken",
                which.empty() ? "" : "; failed: ", which.c_str())};
}

}  // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"phase per photon", phase_per_photon_value},
        {"multipass design point", design_point},
        {"echo timing", echo_timing},
        {"solver vs closed-form efficiency", efficiency_oracle},
        {"phase-kick fidelity", kick_fidelity},
        {"noise statistics", noise_statistics},
        {"detuning sweep", fig3},
        {"time-bin independence", fig4},
        {"property suites", properties},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome r;
        try {
            r = criteria[i].second();
        } catch (const std::exception& e) {
            r = {false, std::string("threw: ") + e.what()};
        }
        failures += r.pass ? 0 : 1;
        std::printf("%s %zu %s: %s\n", r.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), r.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
