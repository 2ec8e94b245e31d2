#pragma once

#include <numbers>

namespace afcxpm {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

namespace constants {
inline constexpr double c = 299792458.0;             // m/s
inline constexpr double hbar = 1.054571817e-34;      // J s
inline constexpr double epsilon0 = 8.8541878128e-12; // F/m
}  // namespace constants

enum class FrequencyUnit { Linear, Angular };

/// A frequency tagged with the convention it was specified in.
///
/// Internally the library works in angular units (rad/s). The one exception is
/// the spontaneous decay rate, which the phase and loss formulas consume as a
/// linear frequency (Hz) against an angular detuning; it is kept as a plain
/// double on MaterialParams for that reason.
class Frequency {
public:
    static constexpr Frequency hz(double v) { return {v, FrequencyUnit::Linear}; }
    static constexpr Frequency mhz(double v) { return {v * 1e6, FrequencyUnit::Linear}; }
    static constexpr Frequency rad_per_s(double v) { return {v, FrequencyUnit::Angular}; }

    constexpr double linear() const { return unit_ == FrequencyUnit::Linear ? value_ : value_ / kTwoPi; }
    constexpr double angular() const { return unit_ == FrequencyUnit::Angular ? value_ : value_ * kTwoPi; }

    constexpr FrequencyUnit unit() const { return unit_; }
    constexpr double value() const { return value_; }

    constexpr Frequency as(FrequencyUnit u) const
    {
        return u == FrequencyUnit::Linear ? hz(linear()) : rad_per_s(angular());
    }

private:
    constexpr Frequency(double v, FrequencyUnit u) : value_(v), unit_(u) {}

    double value_;
    FrequencyUnit unit_;
};

constexpr double mhz_to_angular(double mhz) { return kTwoPi * mhz * 1e6; }
constexpr double angular_to_mhz(double w) { return w / kTwoPi * 1e-6; }

}  // namespace afcxpm
