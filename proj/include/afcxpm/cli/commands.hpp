#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "afcxpm/cli/scenario.hpp"

namespace afcxpm::cli {

/// What a command wrote and the summary it prints on stdout.
struct Artifacts {
    std::vector<std::filesystem::path> files;
    nlohmann::json summary;
};

struct XpmPhaseArgs {
    std::optional<double> detuning_mhz;
    std::optional<double> photons;
    std::optional<int> passes;
    std::optional<bool> transfer;
};

struct LossArgs {
    std::optional<double> detuning_mhz;
    std::optional<int> passes;
    std::optional<double> ground_atoms;  // default: half the comb-band atoms
};

struct AfcArgs {
    std::optional<double> d;
    std::optional<double> finesse;
    std::optional<double> background_od;
};

// Each command reads only the scenario and writes only under `out`.
Artifacts xpm_phase(const Scenario& s, const XpmPhaseArgs& args, const std::filesystem::path& out);
Artifacts spectrum_dump(const Scenario& s, const std::filesystem::path& out);
Artifacts afc_efficiency(const Scenario& s, const AfcArgs& args, const std::filesystem::path& out);
Artifacts loss(const Scenario& s, const LossArgs& args, const std::filesystem::path& out);
Artifacts simulate_echo(const Scenario& s, const std::filesystem::path& out);
Artifacts simulate_xpm(const Scenario& s, const std::filesystem::path& out);
Artifacts feasibility_check(const Scenario& s, const std::filesystem::path& out);
Artifacts feasibility_search(const Scenario& s, const std::filesystem::path& out);
Artifacts reproduce_fig3(const Scenario& s, const std::filesystem::path& out);
Artifacts reproduce_fig4(const Scenario& s, const std::filesystem::path& out);

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitNumerical = 3;

/// Full command-line entry point: parses flags, resolves the scenario,
/// dispatches and maps errors to exit codes.
int run_cli(int argc, const char* const* argv);

}  // namespace afcxpm::cli
