#pragma once

#include <optional>
#include <string_view>
#include <vector>

namespace afcxpm {

/// Material and geometry bundle shared by every module. Immutable by
/// convention; thread it explicitly.
struct MaterialParams {
    double lambda0 = 795e-9;  // m, vacuum transition wavelength
    double n = 2.3;           // refractive index
    double gamma = 9.1e3;     // Hz (linear), spontaneous decay rate
    double area = 0.0;        // m^2, interaction cross-section
    double length = 10e-3;    // m, medium length

    double mode_volume() const { return area * length; }

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

/// Cross-section of a diffraction-limited waveguide, A = λ₀²/n².
double small_waveguide_area(double lambda0, double n);

double circular_area(double radius);

// Tm:LiNbO3 waveguide used in the experiment; γ = 9.1 kHz (the text also
// quotes "around 10 kHz" for the same linewidth).
MaterialParams tm_linbo3();

// Tm:LiNbO3 with γ = 9 kHz and A = λ₀²/n², the worked multipass design point.
MaterialParams example_si_v();

std::optional<MaterialParams> material_preset(std::string_view name);
std::vector<std::string_view> material_preset_names();

/// Single-photon coupling g (rad/s) for a mode volume V.
///
/// The dipole moment is eliminated through the radiative rate, so 2g²τ_s/Δ
/// with τ_s = L/c reproduces the per-photon phase exactly. ε and V never
/// leave this function. Throws DomainError for V ≤ 0.
double derived_coupling(const MaterialParams& params, double mode_volume);

/// φ₁ = 2 g² τ_s / Δ with τ_s = L/c.
double phase_from_coupling(double coupling, double length, double detuning);

}  // namespace afcxpm
