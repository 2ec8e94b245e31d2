#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "afcxpm/material.hpp"
#include "afcxpm/units.hpp"
#include "afcxpm/xpm.hpp"

namespace afcxpm {

/// Gaussian phase-noise budget of the interferometric readout.
///
/// Raw shot-to-shot noise n_s is partly cancelled by subtracting a weighted
/// reference measurement n_r (same distribution, correlation ρ). ρ is chosen
/// so that the residual φ + n_s − w·n_r has standard deviation
/// reference_residual_sigma exactly.
struct NoiseModel {
    double shot_to_shot_sigma = 0.150;        // rad
    double reference_residual_sigma = 0.100;  // rad, after subtraction
    double detector_sigma = 0.050;            // rad, referred to phase at the bias point
    double reference_correlation_weight = 0.75;
    std::uint64_t seed = 1;

    static NoiseModel none();

    bool noiseless() const { return reference_residual_sigma == 0.0 && detector_sigma == 0.0; }
    /// Shot/reference correlation implied by the residual; ConfigError when
    /// no |ρ| ≤ 1 produces it.
    double correlation() const;
    void validate() const;
};

struct ReadoutModel {
    double visibility = 0.897;
    double bias = kPi / 2;  // rad
    double lo_match = 1.0;  // LO / probe intensity ratio; 1 is balanced
    NoiseModel noise;

    /// V·2√r/(1+r): fringe contrast left after an intensity mismatch r.
    double effective_visibility() const;
    void validate() const;
};

/// I = 1 + V cos(bias + φ); I = 1 − V sin φ at the default bias.
double intensity_from_phase(const ReadoutModel& model, double phi);

/// Inverse of intensity_from_phase on the branch around the bias point.
/// Intensities beyond the fringe extremes are clamped to them. Throws
/// DomainError when V = 0.
double phase_from_intensity(const ReadoutModel& model, double intensity);

struct MeasurementRecord {
    double true_phase = 0.0;
    double intensity = 0.0;
    double inferred_phase = 0.0;
    std::uint64_t index = 0;
    std::uint64_t seed = 0;
};

/// Seed of repetition `index`: splitmix64 of the run seed and the index.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// One repetition; a pure function of (model, phase, index).
MeasurementRecord simulate_shot(const ReadoutModel& model, double true_phase, std::uint64_t index);

struct ExperimentResult {
    double mean = 0.0;
    double std_dev = 0.0;  // sample standard deviation of single shots
    double sem = 0.0;      // std_dev / √j
    std::uint64_t seed = 0;
    std::vector<MeasurementRecord> records;
};

/// j repetitions at a fixed true phase. Records are ordered by index and
/// independent of `threads`.
ExperimentResult run_experiment(double true_phase, int repetitions, const ReadoutModel& model, int threads = 1);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_err = 0.0;
    double intercept_err = 0.0;
    double chi2 = 0.0;
    bool weighted = false;
};

/// Least squares y = a + b x. Weighted by 1/σ² when every σ > 0, ordinary
/// otherwise (errors then from the residual scatter). Throws NumericalError
/// for fewer than two distinct x.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& sigma = {});

struct SweepConfig {
    std::vector<double> detunings;      // rad/s
    std::vector<double> photon_levels;  // mean photons per level
    int repetitions = 200;
    int passes = 1;
    bool transfer = false;

    /// ±50, ±65, ±80, ±100 and +120 MHz; 0 to 1e8 photons in five levels.
    static SweepConfig defaults();
};

struct SweepPoint {
    double detuning = 0.0;  // rad/s
    LineFit fit;
    double analytic = 0.0;  // rad/photon
};

/// Phase-vs-photon-number slope at every detuning. Each (detuning, level)
/// cell draws noise from its own derived seed. Throws ConfigError for fewer
/// than three photon levels.
std::vector<SweepPoint> detuning_sweep(const SweepConfig& sweep, const MaterialParams& params,
                                       const ReadoutModel& model, int threads = 1);

enum class Analyzer { TimeOfArrival, Interferometer };

std::string_view to_string(Analyzer a);
Analyzer parse_analyzer(std::string_view s);

struct AnalyzerModel {
    Analyzer kind = Analyzer::TimeOfArrival;
    double visibility = 0.897;    // interferometer only
    double late_background = 0.0; // extra late-bin counts per unit pulse energy

    /// Time-of-arrival for Early/Late, the unbalanced interferometer for Plus/Minus.
    static AnalyzerModel matched(TimeBin state, double visibility = 0.897);
};

/// Normalised wrong-bin (or wrong-port) fraction. With interaction on,
/// both bins are attenuated by e^{−ζL}, which drops out of the ratio.
/// Throws ConfigError when the analyzer does not measure the state's basis.
double qubit_error_rate(const TimeBinState& state, bool interaction, double zeta_l, const AnalyzerModel& analyzer);

struct Fig4Config {
    double n_photons = 6.9e7;
    double detuning = mhz_to_angular(100.0);
    int passes = 1;
    int repetitions = 200;
    double mode_duration = 10e-9;   // s
    double early_center = 30e-9;    // s, inside the storage window below
    StorageWindow window{10e-9, 170e-9};
    double zeta_l = 0.0;
    double late_background = 0.0;
};

struct Fig4Row {
    std::optional<TimeBin> state;  // empty: no signal
    double phase_true = 0.0;
    double phase_mean = 0.0;
    double phase_sem = 0.0;
    double error_before = 0.0;
    double error_after = 0.0;
};

/// No-signal row followed by Early, Late, Plus, Minus. Every row reuses the
/// same noise draws, so rows with equal true phase have equal means.
std::vector<Fig4Row> reproduce_fig4(const Fig4Config& config, const MaterialParams& params,
                                    const ReadoutModel& model, int threads = 1);

}  // namespace afcxpm
