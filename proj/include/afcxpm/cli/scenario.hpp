#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "afcxpm/dynamics.hpp"
#include "afcxpm/feasibility.hpp"
#include "afcxpm/material.hpp"
#include "afcxpm/measurement.hpp"
#include "afcxpm/spectrum.hpp"
#include "afcxpm/xpm.hpp"

namespace afcxpm::cli {

struct SignalSpec {
    double photons = 6.9e7;
    double detuning = mhz_to_angular(100.0);  // rad/s
    int passes = 1;
    bool transfer = false;
    TimeBin state = TimeBin::Early;
    double offset = 15e-9;         // s, early-bin centre after the storage window opens
    double mode_duration = 10e-9;  // s
    double separation = 18.3e-9;   // s
};

struct RunControls {
    std::uint64_t seed = 1;
    int threads = 1;
    std::string out = ".";
};

/// Everything a subcommand needs, fully resolved.
struct Scenario {
    std::string preset = "tm_linbo3";
    MaterialParams material = tm_linbo3();
    bool small_waveguide = false;

    CombParams comb = experimental_comb();
    GridSpec grid;
    ProbeSpec probe;
    SignalSpec signal;
    SolverOptions solver;

    ReadoutModel readout;
    SweepConfig sweep = SweepConfig::defaults();
    double analyzer_visibility = 0.897;
    double late_background = 0.0;
    double zeta_l = 0.0;  // signal loss applied to the qubit error rates

    DesignPoint design = example_design_point();
    double loss_budget = kDefaultLossBudget;
    SearchRanges ranges;

    RunControls run;

    /// Throws ConfigError naming the first violated constraint.
    void validate() const;
};

Scenario default_scenario();

/// Material preset plus dependent defaults; throws ConfigError for unknown names.
void apply_preset(Scenario& s, std::string_view name);

/// Parse a YAML scenario on top of the defaults and a preset: `preset` when
/// given, else the file's own `preset` key. Unknown keys, wrong types and
/// violated constraints throw ConfigError with the dotted key path in the
/// message. An empty document yields the defaults.
Scenario parse_scenario_text(const std::string& text, const std::string& source = "<string>",
                             const std::optional<std::string>& preset = std::nullopt);
Scenario parse_scenario(const std::filesystem::path& path, const std::optional<std::string>& preset = std::nullopt);

nlohmann::json to_json(const Scenario& s);

}  // namespace afcxpm::cli
