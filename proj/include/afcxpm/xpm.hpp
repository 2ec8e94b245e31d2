#pragma once

#include <complex>
#include <string>
#include <string_view>
#include <vector>

#include "afcxpm/material.hpp"

namespace afcxpm {

struct TemporalMode {
    double center = 0.0;    // s
    double duration = 0.0;  // s
    std::complex<double> amplitude{1.0, 0.0};
};

/// Interval between probe absorption (begin) and recall (end).
struct StorageWindow {
    double begin = 0.0;
    double end = 0.0;
    bool contains(const TemporalMode& m) const
    {
        return m.center - 0.5 * m.duration >= begin && m.center + 0.5 * m.duration <= end;
    }
};

/// Detuned signal travelling through the pit while the probe is stored.
/// Mode amplitudes are normalised so Σ|a|² = 1 and mode i carries
/// n_photons·|a_i|² photons.
class SignalField {
public:
    /// Throws ConfigError on empty modes / bad counts, WindowError if a mode
    /// leaves the storage window.
    SignalField(std::vector<TemporalMode> modes, double n_photons, double detuning, int passes,
                StorageWindow window);

    const std::vector<TemporalMode>& modes() const { return modes_; }
    double n_photons() const { return n_photons_; }
    double detuning() const { return detuning_; }  // rad/s, Δ = ω_p − ω_s
    int passes() const { return passes_; }
    const StorageWindow& window() const { return window_; }

    double mode_photons(std::size_t i) const { return n_photons_ * std::norm(modes_[i].amplitude); }
    double shortest_mode() const;

    /// Same signal with every mode shifted by dt (must stay inside the window).
    SignalField shifted(double dt) const;

private:
    std::vector<TemporalMode> modes_;
    double n_photons_;
    double detuning_;
    int passes_;
    StorageWindow window_;
};

enum class TimeBin { Early, Late, Plus, Minus };

std::string_view to_string(TimeBin b);
TimeBin parse_time_bin(std::string_view s);

/// Time-bin qubit; Early/Late put all energy in one bin, Plus/Minus split it
/// equally with relative phase 0 or π.
struct TimeBinState {
    TimeBin label = TimeBin::Early;
    double separation = 18.3e-9;  // s

    double relative_phase() const;
    /// Amplitudes of (early, late) bins.
    std::pair<std::complex<double>, std::complex<double>> bin_amplitudes() const;
    /// Temporal modes for this state with the early bin centred at t_early.
    std::vector<TemporalMode> modes(double t_early, double mode_duration) const;
};

/// φ₁ = (1/4π)(λ₀²/(n²A))(γ/Δ), γ linear, Δ angular; halved when the
/// excited population is parked in an auxiliary ground level. Odd in Δ.
/// Throws DomainError for Δ = 0.
double phase_per_photon(const MaterialParams& params, double detuning, bool transfer);

struct PhaseShift {
    double phi = 0.0;            // rad, total probe phase
    double phi_per_photon = 0.0; // rad
    std::vector<std::string> validity_warnings;
};

/// Signal bandwidth must be well below the detuning: warn when
/// |Δ| < 2π × margin / τ_s for the shortest mode duration τ_s.
inline constexpr double kDefaultValidityMargin = 5.0;

/// φ = m N_s φ₁, independent of how the energy is spread over modes.
PhaseShift probe_phase_shift(const SignalField& signal, const MaterialParams& params, bool transfer,
                             double validity_margin = kDefaultValidityMargin);

/// Minimum detectable phase 1/√(η N_p).
double sensitivity_threshold(double n_probe, double eta);

}  // namespace afcxpm
