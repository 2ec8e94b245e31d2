#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "afcxpm/units.hpp"

namespace afcxpm {

enum class ToothShape { Square, Gaussian, Lorentzian };

// How peak_od is interpreted for non-square teeth.
//   SquareEquivalent: tooth area equals that of a square tooth of height
//                     peak_od and width Δ_m/F, so the mean comb OD is d/F.
//   PeakHeight:       peak_od is the literal maximum of each tooth.
enum class ToothNormalization { SquareEquivalent, PeakHeight };

std::string_view to_string(ToothShape s);
std::string_view to_string(ToothNormalization n);
ToothShape parse_tooth_shape(std::string_view s);
ToothNormalization parse_tooth_normalization(std::string_view s);

struct CombParams {
    double delta_m = kTwoPi * 5.5e6;  // rad/s, tooth spacing Δ_m
    int n_teeth = 18;
    double finesse = 2.75;            // Δ_m / tooth FWHM
    double peak_od = 0.1;             // optical depth per tooth
    double background_od = 0.15;      // flat OD under the comb and outside the pits
    double pit_width = 100e6;         // Hz, width of each transparency pit
    double pit_gap = 100e6;           // Hz, spectral interval between the two pits
    double pit_od = 0.0161;           // residual OD inside the pits (0.07 dB)
    ToothShape tooth_shape = ToothShape::Gaussian;
    ToothNormalization normalization = ToothNormalization::SquareEquivalent;

    double tooth_fwhm() const { return delta_m / finesse; }     // rad/s
    double band_width() const { return n_teeth * delta_m; }     // rad/s
    double tooth_center(int k) const { return (k - 0.5 * (n_teeth - 1)) * delta_m; }

    void validate() const;
};

/// Comb of the experiment: 18 teeth at 5.5 MHz spacing (≈100 MHz band),
/// teeth of OD ≈ 0.1 on a 0.15 background, 100 MHz pits at ±(50..150) MHz.
/// The tooth width (≈2 MHz, finesse 2.75) is an estimate from the 1 MHz laser
/// linewidth plus power broadening.
CombParams experimental_comb();

double od_from_db(double db);

struct GridSpec {
    std::size_t points = std::size_t{1} << 14;
    double half_span = kTwoPi * 300e6;  // rad/s
};

/// Absorption profile α(δ) = OD(δ)/L on a uniform detuning grid centred on ω₀.
class SpectralFeature {
public:
    SpectralFeature(const CombParams& comb, const GridSpec& grid, double length);

    const CombParams& comb() const { return comb_; }
    double length() const { return length_; }
    double spacing() const { return spacing_; }

    std::span<const double> grid() const { return grid_; }
    std::span<const double> alpha() const { return alpha_; }

    /// Optical depth of the ideal profile at any detuning (rad/s).
    double optical_depth_at(double detuning) const;
    double alpha_at(double detuning) const { return optical_depth_at(detuning) / length_; }

    bool in_comb_band(double detuning) const;
    bool in_pit(double detuning) const;

private:
    double tooth(double offset) const;

    CombParams comb_;
    double length_;
    double spacing_;
    std::vector<double> grid_;
    std::vector<double> alpha_;
};

/// Throws ResolutionError if the grid cannot resolve a tooth FWHM with at
/// least 8 points, ConfigError on invalid comb or grid.
SpectralFeature build_feature(const CombParams& comb, const GridSpec& grid, double length);

/// t_m = 2π/Δ_m.
double storage_time(const CombParams& comb);

/// Trapezoid integral of α over the grid, in (rad/s)/m.
double integrated_alpha(const SpectralFeature& feature);

}  // namespace afcxpm
