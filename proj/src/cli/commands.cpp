#include "afcxpm/cli/commands.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <limits>

#include "afcxpm/afc.hpp"
#include "afcxpm/cli/output.hpp"
#include "afcxpm/errors.hpp"
#include "afcxpm/loss.hpp"
#include "afcxpm/version.hpp"

namespace afcxpm::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string num(double v) { return format_number(v); }

// Resolved scenario as embedded in outputs. Where results are written and
// how many threads computed them do not change them, so both are left out
// to keep reruns byte-identical.
json provenance(const Scenario& s)
{
    json j = to_json(s);
    j["run"].erase("out");
    j["run"].erase("threads");
    return j;
}

// JSON has no NaN; unavailable values become null.
json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

fs::path write_json(const fs::path& out, const std::string& name, const json& payload, const json& scenario)
{
    const fs::path path = out / name;
    atomic_write(path, with_provenance(payload, scenario).dump(2) + "\n");
    return path;
}

fs::path write_csv(const fs::path& out, const std::string& name, const CsvTable& table, const json& scenario)
{
    const fs::path path = out / name;
    atomic_write(path, render_csv(table, scenario));
    return path;
}

SolverOptions solver_options(const Scenario& s)
{
    SolverOptions o = s.solver;
    o.threads = s.run.threads;
    return o;
}

SignalField signal_for(const Scenario& s, const StorageWindow& window)
{
    const TimeBinState state{s.signal.state, s.signal.separation};
    return SignalField(state.modes(window.begin + s.signal.offset, s.signal.mode_duration), s.signal.photons,
                       s.signal.detuning, s.signal.passes, window);
}

json condition_json(const Condition& c)
{
    return {{"name", c.name},         {"quantity", c.quantity}, {"relation", c.relation},
            {"value", c.value},       {"bound", c.bound},       {"satisfied", c.satisfied}};
}

json point_json(const DesignPoint& p)
{
    return {{"d", p.d},         {"finesse", p.finesse}, {"n_teeth", p.n_teeth},
            {"f", p.f},         {"passes", p.passes},   {"bandwidth_khz", p.bandwidth_hz * 1e-3}};
}

json report_json(const FeasibilityReport& r)
{
    json conditions = json::array();
    for (const auto& c : r.conditions) conditions.push_back(condition_json(c));
    return {{"point", point_json(r.point)},
            {"eta", r.eta},
            {"detuning_mhz", angular_to_mhz(r.detuning)},
            {"phase_per_photon", r.phase_per_photon},
            {"zeta_l_single", r.zeta_l_single},
            {"zeta_l_total", r.zeta_l_single * r.point.passes},
            {"loss_budget", r.loss_budget},
            {"absolute_floor", r.absolute_floor},
            {"all_satisfied", r.all_satisfied()},
            {"conditions", conditions}};
}

}  // namespace

Artifacts xpm_phase(const Scenario& s, const XpmPhaseArgs& args, const fs::path& out)
{
    const double detuning = args.detuning_mhz ? mhz_to_angular(*args.detuning_mhz) : s.signal.detuning;
    const double photons = args.photons.value_or(s.signal.photons);
    const int passes = args.passes.value_or(s.signal.passes);
    const bool transfer = args.transfer.value_or(s.signal.transfer);
    if (args.photons && !(photons >= 0.0)) throw ConfigError("--photons must be non-negative");
    if (passes < 1) throw ConfigError("--passes must be >= 1");

    const double tau = s.signal.mode_duration;
    const SignalField signal({{0.0, tau}}, photons, detuning, passes, StorageWindow{-tau, tau});
    const auto shift = probe_phase_shift(signal, s.material, transfer);

    Artifacts a;
    a.summary = {{"phi_rad", shift.phi},
                 {"phi_per_photon", shift.phi_per_photon},
                 {"validity_warnings", shift.validity_warnings},
                 {"detuning_mhz", angular_to_mhz(detuning)},
                 {"photons", photons},
                 {"passes", passes},
                 {"transfer", transfer}};
    a.files.push_back(write_json(out, "xpm_phase.json", a.summary, provenance(s)));
    return a;
}

Artifacts spectrum_dump(const Scenario& s, const fs::path& out)
{
    const auto feature = build_feature(s.comb, s.grid, s.material.length);
    CsvTable table{{"detuning_hz", "alpha_per_m"}, {}};
    const auto grid = feature.grid();
    const auto alpha = feature.alpha();
    table.rows.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) table.add_row({num(grid[i] / kTwoPi), num(alpha[i])});

    Artifacts a;
    a.files.push_back(write_csv(out, "spectrum.csv", table, provenance(s)));
    a.summary = {{"points", grid.size()},
                 {"spacing_hz", feature.spacing() / kTwoPi},
                 {"file", a.files.back().string()}};
    return a;
}

Artifacts afc_efficiency(const Scenario& s, const AfcArgs& args, const fs::path& out)
{
    const double d = args.d.value_or(s.comb.peak_od);
    const double finesse = args.finesse.value_or(s.comb.finesse);
    const double bg = args.background_od.value_or(0.0);
    if (!(d >= 0.0)) throw ConfigError("--d must be non-negative");
    if (!(finesse > 0.0)) throw ConfigError("--finesse must be positive");
    if (!(bg >= 0.0)) throw ConfigError("--background-od must be non-negative");

    Artifacts a;
    a.summary = {{"d", d},
                 {"finesse", finesse},
                 {"background_od", bg},
                 {"eta", recall_efficiency_with_background(d, finesse, bg)},
                 {"eta_comb", recall_efficiency(d, finesse)},
                 {"dephasing_factor", dephasing_factor(finesse)}};
    a.files.push_back(write_json(out, "afc_efficiency.json", a.summary, provenance(s)));
    return a;
}

Artifacts loss(const Scenario& s, const LossArgs& args, const fs::path& out)
{
    const double detuning = args.detuning_mhz ? mhz_to_angular(*args.detuning_mhz) : s.signal.detuning;
    const int passes = args.passes.value_or(s.signal.passes);
    if (passes < 1) throw ConfigError("--passes must be >= 1");
    const double n_ground =
        args.ground_atoms.value_or(0.5 * atoms_from_optical_depth(s.material, s.comb.peak_od, s.comb.n_teeth));
    if (!(n_ground >= 0.0)) throw ConfigError("--ground-atoms must be non-negative");

    const double zeta = signal_loss(s.material, n_ground, detuning, passes);
    json summary = {{"zeta_l", zeta},
                    {"transmission", transmission(zeta)},
                    {"detuning_mhz", angular_to_mhz(detuning)},
                    {"passes", passes},
                    {"ground_atoms", n_ground}};

    // Full Lorentzian sum over the actual comb, where the signal is off-band.
    const auto feature = build_feature(s.comb, s.grid, s.material.length);
    if (!feature.in_comb_band(-detuning)) {
        const auto chi = susceptibility(feature, s.material, n_ground, detuning, std::vector<double>{0.0});
        summary["zeta_l_full_sum"] = passes * chi.zeta_l(0, s.material.length);
    } else {
        summary["zeta_l_full_sum"] = nullptr;
    }

    Artifacts a;
    a.summary = summary;
    a.files.push_back(write_json(out, "loss.json", summary, provenance(s)));
    return a;
}

Artifacts simulate_echo(const Scenario& s, const fs::path& out)
{
    const auto feature = build_feature(s.comb, s.grid, s.material.length);
    const auto run = afcxpm::simulate_echo(feature, s.material, s.probe, solver_options(s));

    CsvTable table{{"t_ns", "re_E", "im_E", "abs_E2"}, {}};
    table.rows.reserve(run.trace.t.size());
    for (std::size_t i = 0; i < run.trace.t.size(); ++i) {
        const auto e = run.trace.output[i];
        table.add_row({num(run.trace.t[i] * 1e9), num(e.real()), num(e.imag()), num(std::norm(e))});
    }

    const json scenario = provenance(s);
    Artifacts a;
    a.files.push_back(write_csv(out, "echo_trace.csv", table, scenario));
    a.summary = {{"t_echo_ns", run.analysis.echo_delay * 1e9},
                 {"eta_numeric", run.analysis.efficiency},
                 {"echo_phase_rad", run.analysis.echo_phase},
                 {"eta_closed_form",
                  recall_efficiency_with_background(s.comb.peak_od, s.comb.finesse, s.comb.background_od)},
                 {"transmitted_fraction", run.analysis.transmitted_energy / run.analysis.input_energy},
                 {"storage_time_ns", run.storage_time * 1e9},
                 {"max_closure_error", run.max_closure_error},
                 {"max_bloch_excess", run.max_bloch_excess}};
    a.files.push_back(write_json(out, "echo_summary.json", a.summary, scenario));
    return a;
}

Artifacts simulate_xpm(const Scenario& s, const fs::path& out)
{
    const auto feature = build_feature(s.comb, s.grid, s.material.length);
    const auto options = solver_options(s);
    const EchoSolver layout(feature, s.material, s.probe, options);
    const auto signal = signal_for(s, layout.storage_window());
    const auto shift = probe_phase_shift(signal, s.material, s.signal.transfer);

    const auto reference = afcxpm::simulate_echo(feature, s.material, s.probe, options);
    const auto kicked = afcxpm::simulate_echo(feature, s.material, s.probe, options, &signal, s.signal.transfer);
    const double numeric = echo_phase_difference(reference.trace, kicked.trace, reference.windows);

    CsvTable table{{"t_ns", "re_E_ref", "im_E_ref", "re_E_kicked", "im_E_kicked"}, {}};
    table.rows.reserve(kicked.trace.t.size());
    for (std::size_t i = 0; i < kicked.trace.t.size(); ++i) {
        const auto r = reference.trace.output[i];
        const auto k = kicked.trace.output[i];
        table.add_row({num(kicked.trace.t[i] * 1e9), num(r.real()), num(r.imag()), num(k.real()), num(k.imag())});
    }

    const json scenario = provenance(s);
    Artifacts a;
    a.files.push_back(write_csv(out, "xpm_trace.csv", table, scenario));
    a.summary = {{"phi_analytic_rad", shift.phi},
                 {"phi_numeric_rad", numeric},
                 {"phi_error_rad", numeric - shift.phi},
                 {"phi_per_photon", shift.phi_per_photon},
                 {"validity_warnings", shift.validity_warnings},
                 {"state", std::string(to_string(s.signal.state))},
                 {"eta_numeric", kicked.analysis.efficiency},
                 {"t_echo_ns", kicked.analysis.echo_delay * 1e9}};
    a.files.push_back(write_json(out, "xpm_summary.json", a.summary, scenario));
    return a;
}

Artifacts feasibility_check(const Scenario& s, const fs::path& out)
{
    const auto report = check_conditions(s.design, s.loss_budget);
    Artifacts a;
    a.summary = report_json(report);
    a.files.push_back(write_json(out, "feasibility_check.json", a.summary, provenance(s)));
    return a;
}

Artifacts feasibility_search(const Scenario& s, const fs::path& out)
{
    const SearchTargets targets{s.design.bandwidth_hz, s.loss_budget};
    const auto result = minimal_passes(targets, s.ranges, s.design.params, s.run.threads);

    CsvTable table{{"d", "finesse", "n_teeth", "f", "passes", "zeta_l_total", "limiting"}, {}};
    for (const auto& e : result.pareto) {
        table.add_row({num(e.point.d), num(e.point.finesse), std::to_string(e.point.n_teeth), num(e.point.f),
                       std::to_string(e.point.passes), num(e.zeta_l_total), e.limiting});
    }

    const json scenario = provenance(s);
    Artifacts a;
    a.summary = {{"feasible", result.feasible}, {"evaluated", result.evaluated}, {"pareto_size", result.pareto.size()}};
    if (result.feasible) {
        a.summary["best"] = report_json(result.report);
    } else {
        a.summary["binding"] = result.binding;
    }
    a.files.push_back(write_json(out, "feasibility_search.json", a.summary, scenario));
    a.files.push_back(write_csv(out, "feasibility_pareto.csv", table, scenario));
    return a;
}

Artifacts reproduce_fig3(const Scenario& s, const fs::path& out)
{
    SweepConfig sweep = s.sweep;
    sweep.passes = s.signal.passes;
    sweep.transfer = s.signal.transfer;
    const auto points = detuning_sweep(sweep, s.material, s.readout, s.run.threads);

    CsvTable table{{"detuning_mhz", "slope", "slope_err", "analytic"}, {}};
    json rows = json::array();
    for (const auto& p : points) {
        table.add_row({num(angular_to_mhz(p.detuning)), num(p.fit.slope), num(p.fit.slope_err), num(p.analytic)});
        rows.push_back({{"detuning_mhz", angular_to_mhz(p.detuning)},
                        {"slope", p.fit.slope},
                        {"slope_err", p.fit.slope_err},
                        {"analytic", p.analytic}});
    }
    Artifacts a;
    a.files.push_back(write_csv(out, "fig3.csv", table, provenance(s)));
    a.summary = {{"points", rows}, {"file", a.files.back().string()}};
    return a;
}

Artifacts reproduce_fig4(const Scenario& s, const fs::path& out)
{
    Fig4Config config;
    config.n_photons = s.signal.photons;
    config.detuning = s.signal.detuning;
    config.passes = s.signal.passes;
    config.repetitions = s.sweep.repetitions;
    config.mode_duration = s.signal.mode_duration;
    config.zeta_l = s.zeta_l;
    config.late_background = s.late_background;
    ReadoutModel model = s.readout;
    const auto rows = afcxpm::reproduce_fig4(config, s.material, model, s.run.threads);

    CsvTable table{{"state", "phase_mean", "phase_sem", "error_before", "error_after"}, {}};
    json summary_rows = json::array();
    for (const auto& r : rows) {
        const std::string label = r.state ? std::string(to_string(*r.state)) : "none";
        table.add_row({label, num(r.phase_mean), num(r.phase_sem), num(r.error_before), num(r.error_after)});
        summary_rows.push_back({{"state", label},
                                {"phase_true", r.phase_true},
                                {"phase_mean", r.phase_mean},
                                {"phase_sem", r.phase_sem},
                                {"error_before", number_or_null(r.error_before)},
                                {"error_after", number_or_null(r.error_after)}});
    }
    Artifacts a;
    a.files.push_back(write_csv(out, "fig4.csv", table, provenance(s)));
    a.summary = {{"rows", summary_rows}, {"file", a.files.back().string()}};
    return a;
}

namespace {

int threads_from_env()
{
    const char* env = std::getenv("AFCXPM_THREADS");
    if (!env || !*env) return 0;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1 || v > 4096) {
        throw ConfigError(std::string("AFCXPM_THREADS must be a positive integer, got '") + env + "'");
    }
    return static_cast<int>(v);
}

}  // namespace

int run_cli(int argc, const char* const* argv)
{
    CLI::App app{"Cross-phase modulation in an atomic frequency comb memory", "afcxpm"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<int> threads;
    std::optional<std::string> preset;
    app.add_option("--config", config_path, "Scenario file (YAML)")->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "Random seed");
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--threads", threads, "Worker threads (fallback: AFCXPM_THREADS)")->check(CLI::PositiveNumber);
    app.add_option("--preset", preset, "Material preset (tm_linbo3, example_si_v)");

    std::function<Artifacts(const Scenario&, const fs::path&)> action;
    auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& help) {
        auto* sub = parent->add_subcommand(name, help);
        sub->fallthrough();
        return sub;
    };
    auto group = [&](const std::string& name, const std::string& help) {
        auto* sub = app.add_subcommand(name, help);
        sub->fallthrough();
        sub->require_subcommand(1);
        return sub;
    };

    XpmPhaseArgs xpm_args;
    auto* xpm = group("xpm", "Closed-form cross-phase shift");
    auto* xpm_phase_cmd = leaf(xpm, "phase", "Probe phase for a signal pulse");
    xpm_phase_cmd->add_option("--detuning-mhz", xpm_args.detuning_mhz, "Signal detuning (MHz)");
    xpm_phase_cmd->add_option("--photons", xpm_args.photons, "Signal photon number");
    xpm_phase_cmd->add_option("--passes", xpm_args.passes, "Signal passes m");
    xpm_phase_cmd->add_option("--transfer", xpm_args.transfer, "Excited population parked in an auxiliary level")
        ->expected(0, 1)
        ->default_str("true");
    xpm_phase_cmd->callback([&] { action = [&](const Scenario& s, const fs::path& o) { return xpm_phase(s, xpm_args, o); }; });

    auto* spectrum = group("spectrum", "Tailored absorption profile");
    leaf(spectrum, "dump", "Write alpha(delta) as CSV")->callback([&] { action = spectrum_dump; });

    AfcArgs afc_args;
    auto* afc = group("afc", "Closed-form memory figures of merit");
    auto* eff = leaf(afc, "efficiency", "Forward recall efficiency");
    eff->add_option("--d", afc_args.d, "Optical depth per tooth");
    eff->add_option("--finesse", afc_args.finesse, "Comb finesse");
    eff->add_option("--background-od", afc_args.background_od, "Flat background optical depth");
    eff->callback([&] { action = [&](const Scenario& s, const fs::path& o) { return afc_efficiency(s, afc_args, o); }; });

    LossArgs loss_args;
    auto* loss_cmd = leaf(&app, "loss", "Off-resonant signal loss");
    loss_cmd->add_option("--detuning-mhz", loss_args.detuning_mhz, "Signal detuning (MHz)");
    loss_cmd->add_option("--passes", loss_args.passes, "Signal passes m");
    loss_cmd->add_option("--ground-atoms", loss_args.ground_atoms, "Ground-state atom number");
    loss_cmd->callback([&] { action = [&](const Scenario& s, const fs::path& o) { return loss(s, loss_args, o); }; });

    auto* sim = group("simulate", "Maxwell-Bloch solver runs");
    leaf(sim, "echo", "Echo trace of the probe alone")->callback([&] { action = simulate_echo; });
    leaf(sim, "xpm", "Echo phase with and without the signal kick")->callback([&] { action = simulate_xpm; });

    std::string point_path, ranges_path;
    auto* feas = group("feasibility", "Single-photon sensitivity conditions");
    auto* check = leaf(feas, "check", "Evaluate one design point");
    check->add_option("--point", point_path, "Scenario file holding the design point")->check(CLI::ExistingFile);
    check->callback([&] { action = feasibility_check; });
    auto* search = leaf(feas, "search", "Grid search for the fewest passes");
    search->add_option("--ranges", ranges_path, "Scenario file holding the search ranges")->check(CLI::ExistingFile);
    search->callback([&] { action = feasibility_search; });

    auto* repro = group("reproduce", "Regenerate figure data");
    leaf(repro, "fig3", "Phase slope against detuning")->callback([&] { action = reproduce_fig3; });
    leaf(repro, "fig4", "Time-bin state independence")->callback([&] { action = reproduce_fig4; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInvalid;
    }

    try {
        std::string file = config_path;
        for (const std::string* extra : {&point_path, &ranges_path}) {
            if (extra->empty()) continue;
            if (!file.empty() && file != *extra) throw ConfigError("give the scenario either with --config or here, not both");
            file = *extra;
        }
        Scenario s = file.empty() ? parse_scenario_text("", "<defaults>", preset) : parse_scenario(file, preset);
        if (seed) {
            s.run.seed = *seed;
            s.readout.noise.seed = *seed;
        }
        if (threads) {
            s.run.threads = *threads;
        } else if (const int env = threads_from_env()) {
            s.run.threads = env;
        }
        if (out_dir) s.run.out = *out_dir;
        s.validate();

        if (!action) throw ConfigError("no command given");
        const Artifacts a = action(s, fs::path(s.run.out));
        std::cout << a.summary.dump(2) << "\n";
        return kExitOk;
    } catch (const ConfigError& e) {
        std::cerr << "afcxpm: invalid input: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const DomainError& e) {
        std::cerr << "afcxpm: outside the model's domain: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const NumericalError& e) {
        std::cerr << "afcxpm: numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "afcxpm: " << e.what() << "\n";
        return kExitInternal;
    }
}

}  // namespace afcxpm::cli
