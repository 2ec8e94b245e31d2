#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "afcxpm/material.hpp"
#include "afcxpm/spectrum.hpp"
#include "afcxpm/xpm.hpp"

namespace afcxpm {

struct SolverOptions {
    int z_slices = 64;
    int points_per_period = 0;   // 0: max(32, 8⌈F⌉)
    int margin_periods = 2;      // empty periods kept on either side of the comb
    int steps_per_storage = 0;   // 0: dt = min(t_m/4096, 1/(50 B_comb))
    bool include_decay = false;  // radiative decay is ~1e-5 over t_m and off by default
    bool strong = false;         // allow pulse areas beyond the linear-response regime
    int threads = 1;
    double invariant_tolerance = 1e-9;
};

/// Gaussian probe envelope Ω(t) in Rabi units (rad/s).
struct ProbeSpec {
    double duration = 10e-9;        // s, intensity FWHM
    double peak_time = 0.0;         // s; 0 → 5 × duration
    double pulse_area = kPi / 100;  // ∫Ω dt
};

/// Collective atomic operators on the (z-slice, δ-mode) grid, z-major.
/// sigma_eg follows the σ_eg convention: free precession is e^{+iδt}.
struct EnsembleState {
    std::size_t z_slices = 0;
    std::size_t modes = 0;
    std::vector<double> detunings;  // rad/s
    std::vector<double> weights;    // α(δ) Δδ / 2π, 1/m per unit coherence
    std::vector<double> sigma_gg;
    std::vector<double> sigma_ee;
    std::vector<std::complex<double>> sigma_eg;

    std::size_t index(std::size_t z, std::size_t mode) const { return z * modes + mode; }

    double max_closure_error() const;  // max |σ_gg + σ_ee − 1|
    double max_bloch_excess() const;   // max (|σ_eg|² − σ_gg σ_ee)
};

/// z/t discretisation of the probe envelope. The envelope is tracked in the
/// retarded frame τ = t − n z / c.
struct FieldGrid {
    std::size_t z_slices = 0;
    double dz = 0.0;  // m
    double dt = 0.0;  // s

    /// dz ≤ c·dt/n; throws ConfigError otherwise.
    void validate(double refractive_index) const;
};

/// Probe envelope at z = 0 and z = L on the uniform solver time grid.
/// The envelope carries the same phase convention as σ_eg.
struct OutputTrace {
    double dt = 0.0;
    std::vector<double> t;
    std::vector<std::complex<double>> input;
    std::vector<std::complex<double>> output;
};

/// Semi-classical Maxwell–Bloch propagation of a weak probe through the
/// tailored ensemble.
class EchoSolver {
public:
    /// Throws ConfigError for bad options, a violated CFL condition or a pulse
    /// area above π/10 without `strong`.
    EchoSolver(const SpectralFeature& feature, const MaterialParams& params, const ProbeSpec& probe,
               const SolverOptions& options = {});

    /// Advance atoms and field to t_end (rounded up to the step grid),
    /// applying any scheduled kicks on the way. Throws NumericalError on
    /// norm growth or invariant violation.
    void evolve_to(double t_end);

    /// Schedule the signal's phase kick: mode i imprints φ |a_i|² at its
    /// centre time. Throws WindowError if the signal leaves storage_window()
    /// or a mode centre already lies in the past.
    void apply_signal_kick(const SignalField& signal, const MaterialParams& params, bool transfer);

    /// Multiply every σ_eg by e^{iφ} now; populations untouched.
    void apply_phase(double phi);

    double time() const { return time_; }
    double time_step() const { return grid_.dt; }
    double storage_time() const { return t_m_; }
    double input_peak_time() const { return peak_; }
    /// From three probe durations after the input peak until the echo
    /// analysis window opens (t_m/2 after the peak) or three durations
    /// before the echo, whichever is earlier.
    StorageWindow storage_window() const;
    /// Default end of a run: input peak + 1.5 t_m.
    double default_end_time() const { return peak_ + 1.5 * t_m_; }

    std::complex<double> input_field(double t) const;

    const EnsembleState& state() const { return state_; }
    /// Replace the atomic operators (same grid); ConfigError on a size mismatch.
    void set_state(const std::vector<double>& sigma_gg, const std::vector<double>& sigma_ee,
                   const std::vector<std::complex<double>>& sigma_eg);
    const OutputTrace& trace() const { return trace_; }
    const FieldGrid& field_grid() const { return grid_; }

    double max_closure_error() const { return max_closure_; }
    double max_bloch_excess() const { return max_bloch_; }

private:
    struct Kick {
        double time;
        double phase;
    };

    void step(double dt);
    void check_invariants(std::size_t step_index);

    ProbeSpec probe_;
    SolverOptions options_;
    FieldGrid grid_;
    double t_m_ = 0.0;
    double peak_ = 0.0;
    double rabi_peak_ = 0.0;
    double decay_ = 0.0;  // population decay rate, 1/s
    double time_ = 0.0;
    std::size_t steps_ = 0;
    double max_closure_ = 0.0;
    double max_bloch_ = 0.0;

    EnsembleState state_;
    OutputTrace trace_;
    std::vector<Kick> kicks_;

    // per-step scratch
    std::vector<std::complex<double>> rot_half_, rot_full_;
    std::vector<std::complex<double>> dq_, acc_q_;
    std::vector<double> dg_, acc_g_;
    std::vector<std::complex<double>> stage_s_;
    std::vector<std::complex<double>> partial_;
};

/// Analysis windows on a trace, relative to absolute trace time.
struct EchoWindows {
    double input_begin = 0.0;
    double input_end = 0.0;
    double echo_begin = 0.0;
    double echo_end = 0.0;

    /// Input window [peak − t_m/2, peak + t_m/2), echo window the next t_m.
    static EchoWindows around(double input_peak, double storage_time);
    /// Throws NumericalError if the windows overlap or are empty.
    void validate() const;
};

struct EchoAnalysis {
    double input_energy = 0.0;
    double transmitted_energy = 0.0;
    double echo_energy = 0.0;
    double efficiency = 0.0;
    double echo_delay = 0.0;   // s, echo peak − input peak
    double echo_phase = 0.0;   // rad, relative to the delayed input
    std::complex<double> echo_amplitude;
};

/// Energy ratio of the first-echo window to the full input pulse.
double echo_efficiency_numeric(const OutputTrace& trace, const EchoWindows& windows);

EchoAnalysis analyze_echo(const OutputTrace& trace, const EchoWindows& windows, double input_peak,
                          double storage_time);

/// arg ⟨E_ref, E⟩ over the echo window: the phase the echo of `perturbed`
/// carries relative to `reference`. Both traces must share a time grid.
double echo_phase_difference(const OutputTrace& reference, const OutputTrace& perturbed,
                             const EchoWindows& windows);

/// Inner product ⟨a, b⟩ over the echo window.
std::complex<double> echo_overlap(const OutputTrace& a, const OutputTrace& b, const EchoWindows& windows);

struct EchoRun {
    OutputTrace trace;
    EchoWindows windows;
    EchoAnalysis analysis;
    double storage_time = 0.0;
    double input_peak = 0.0;
    double max_closure_error = 0.0;
    double max_bloch_excess = 0.0;
};

/// Build a solver, schedule the signal kick (if any), run to the default end
/// time and analyse the first echo.
EchoRun simulate_echo(const SpectralFeature& feature, const MaterialParams& params, const ProbeSpec& probe,
                      const SolverOptions& options = {}, const SignalField* signal = nullptr,
                      bool transfer = false);

}  // namespace afcxpm
