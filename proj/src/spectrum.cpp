#include "afcxpm/spectrum.hpp"

#include <cmath>
#include <string>

#include "afcxpm/errors.hpp"

namespace afcxpm {

namespace {

constexpr double kFourLn2 = 4.0 * std::numbers::ln2;

}  // namespace

std::string_view to_string(ToothShape s)
{
    switch (s) {
    case ToothShape::Square: return "square";
    case ToothShape::Gaussian: return "gaussian";
    case ToothShape::Lorentzian: return "lorentzian";
    }
    return "?";
}

std::string_view to_string(ToothNormalization n)
{
    return n == ToothNormalization::SquareEquivalent ? "square_equivalent" : "peak_height";
}

ToothShape parse_tooth_shape(std::string_view s)
{
    if (s == "square") return ToothShape::Square;
    if (s == "gaussian") return ToothShape::Gaussian;
    if (s == "lorentzian") return ToothShape::Lorentzian;
    throw ConfigError("tooth_shape must be one of square|gaussian|lorentzian (got '" + std::string(s) + "')");
}

ToothNormalization parse_tooth_normalization(std::string_view s)
{
    if (s == "square_equivalent") return ToothNormalization::SquareEquivalent;
    if (s == "peak_height") return ToothNormalization::PeakHeight;
    throw ConfigError("tooth_normalization must be square_equivalent|peak_height (got '" + std::string(s) +
                      "')");
}

void CombParams::validate() const
{
    if (!(delta_m > 0.0)) throw ConfigError("comb spacing delta_m must be > 0");
    if (n_teeth < 1) throw ConfigError("n_teeth must be >= 1 (got " + std::to_string(n_teeth) + ")");
    if (!(finesse > 1.0)) throw ConfigError("finesse must be > 1 (got " + std::to_string(finesse) + ")");
    if (!(peak_od >= 0.0)) throw ConfigError("peak_od must be >= 0");
    if (!(background_od >= 0.0)) throw ConfigError("background_od must be >= 0");
    if (!(pit_od >= 0.0)) throw ConfigError("pit_od must be >= 0");
    if (!(pit_width >= 0.0)) throw ConfigError("pit_width must be >= 0");
    if (pit_width > 0.0 && kTwoPi * pit_gap < band_width() * (1.0 - 1e-12)) {
        throw ConfigError("pit_gap (" + std::to_string(pit_gap * 1e-6) + " MHz) must hold the comb band (" +
                          std::to_string(band_width() / kTwoPi * 1e-6) + " MHz)");
    }
}

CombParams experimental_comb() { return CombParams{}; }

double od_from_db(double db) { return db * std::numbers::ln10 / 10.0; }

SpectralFeature::SpectralFeature(const CombParams& comb, const GridSpec& grid, double length)
    : comb_(comb), length_(length), spacing_(0.0)
{
    comb_.validate();
    if (!(length > 0.0)) throw ConfigError("medium length must be > 0");
    if (grid.points < 2) throw ConfigError("grid needs at least 2 points");
    if (!(grid.half_span > 0.0)) throw ConfigError("grid half_span must be > 0");

    const double outer = comb_.pit_width > 0.0 ? kTwoPi * (0.5 * comb_.pit_gap + comb_.pit_width)
                                               : 0.5 * comb_.band_width();
    if (outer > grid.half_span * (1.0 + 1e-12)) {
        throw ConfigError("comb band plus pits (" + std::to_string(outer / kTwoPi * 1e-6) +
                          " MHz half-width) exceeds the grid half-span (" +
                          std::to_string(grid.half_span / kTwoPi * 1e-6) + " MHz)");
    }

    spacing_ = 2.0 * grid.half_span / static_cast<double>(grid.points - 1);
    const double required = comb_.tooth_fwhm() / 8.0;
    if (spacing_ > required) {
        throw ResolutionError("grid spacing " + std::to_string(spacing_ / kTwoPi) +
                              " Hz is too coarse; tooth FWHM/8 requires <= " + std::to_string(required / kTwoPi) +
                              " Hz (" + std::to_string(static_cast<std::size_t>(std::ceil(2.0 * grid.half_span / required)) + 1) +
                              " points)");
    }

    grid_.resize(grid.points);
    alpha_.resize(grid.points);
    for (std::size_t i = 0; i < grid.points; ++i) {
        grid_[i] = -grid.half_span + spacing_ * static_cast<double>(i);
        alpha_[i] = alpha_at(grid_[i]);
    }
}

double SpectralFeature::tooth(double x) const
{
    const double w = comb_.tooth_fwhm();
    const double d = comb_.peak_od;
    const bool area = comb_.normalization == ToothNormalization::SquareEquivalent;
    switch (comb_.tooth_shape) {
    case ToothShape::Square:
        return std::abs(x) <= 0.5 * w ? d : 0.0;
    case ToothShape::Gaussian: {
        // area of a unit-peak Gaussian is w √(π / 4 ln2)
        const double peak = area ? d / std::sqrt(kPi / kFourLn2) : d;
        return peak * std::exp(-kFourLn2 * x * x / (w * w));
    }
    case ToothShape::Lorentzian: {
        const double peak = area ? 2.0 * d / kPi : d;
        return peak / (1.0 + 4.0 * x * x / (w * w));
    }
    }
    return 0.0;
}

bool SpectralFeature::in_comb_band(double detuning) const
{
    return std::abs(detuning) <= 0.5 * comb_.band_width();
}

bool SpectralFeature::in_pit(double detuning) const
{
    if (comb_.pit_width <= 0.0) return false;
    const double a = std::abs(detuning);
    const double inner = kTwoPi * 0.5 * comb_.pit_gap;
    return a >= inner && a <= inner + kTwoPi * comb_.pit_width;
}

double SpectralFeature::optical_depth_at(double detuning) const
{
    if (in_comb_band(detuning)) {
        double od = comb_.background_od;
        if (comb_.peak_od > 0.0) {
            for (int k = 0; k < comb_.n_teeth; ++k) od += tooth(detuning - comb_.tooth_center(k));
        }
        return od;
    }
    if (in_pit(detuning)) return comb_.pit_od;
    return comb_.background_od;
}

SpectralFeature build_feature(const CombParams& comb, const GridSpec& grid, double length)
{
    return SpectralFeature(comb, grid, length);
}

double storage_time(const CombParams& comb)
{
    if (!(comb.delta_m > 0.0)) throw ConfigError("comb spacing delta_m must be > 0");
    return kTwoPi / comb.delta_m;
}

double integrated_alpha(const SpectralFeature& feature)
{
    const auto a = feature.alpha();
    double s = 0.0;
    for (std::size_t i = 1; i < a.size(); ++i) s += 0.5 * (a[i - 1] + a[i]);
    return s * feature.spacing();
}

}  // namespace afcxpm
