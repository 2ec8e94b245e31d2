#pragma once

#include <complex>
#include <span>
#include <vector>

#include "afcxpm/material.hpp"
#include "afcxpm/spectrum.hpp"

namespace afcxpm {

/// Complex response χ(ω) seen by the signal, sampled at offsets ω from the
/// signal carrier.
struct Susceptibility {
    std::vector<double> omega;                // rad/s
    std::vector<std::complex<double>> chi;    // dimensionless
    double k_s = 0.0;                         // 1/m

    /// Intensity loss exponent 2 k_s L Im χ at sample i.
    double zeta_l(std::size_t i, double length) const { return 2.0 * k_s * length * chi[i].imag(); }
};

/// Total atom number N = n_t d (A n²/λ₀²); exact for A = λ₀²/n² and scaled
/// in proportion to A otherwise.
double atoms_from_optical_depth(const MaterialParams& params, double d, int n_teeth);

/// Full sum of radiatively broadened (half-width γ) Lorentzians over the
/// comb-band atoms, with N(δ) ∝ α(δ) normalised to n_ground.
///
/// Throws DomainError when the signal (at comb detuning −Δ) falls inside the
/// comb band.
Susceptibility susceptibility(const SpectralFeature& feature, const MaterialParams& params, double n_ground,
                              double detuning, std::span<const double> omega = {});

/// Far-detuned limit Im χ(0) = (1/k_s)(1/16π) N_g λ₀² γ² / (n² V Δ²).
double imag_chi_far_detuned(const MaterialParams& params, double n_ground, double detuning);

/// ζL = m (1/8π)(N_g λ₀²/(n² A))(γ/Δ)², same γ-linear / Δ-angular convention
/// as the phase law.
double signal_loss(const MaterialParams& params, double n_ground, double detuning, int passes);

inline double transmission(double zeta_l) { return std::exp(-zeta_l); }

}  // namespace afcxpm
