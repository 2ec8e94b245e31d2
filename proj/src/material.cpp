#include "afcxpm/material.hpp"

#include <array>
#include <cmath>
#include <string>

#include "afcxpm/errors.hpp"
#include "afcxpm/units.hpp"

namespace afcxpm {

namespace {

void require_positive(double v, const char* name)
{
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw ConfigError(std::string(name) + " must be strictly positive and finite (got " +
                          std::to_string(v) + ")");
    }
}

}  // namespace

void MaterialParams::validate() const
{
    require_positive(lambda0, "lambda0");
    require_positive(n, "refractive_index");
    require_positive(gamma, "gamma");
    require_positive(area, "area");
    require_positive(length, "length");
    if (lambda0 <= 100e-9 || lambda0 >= 10e-6) {
        throw ConfigError("lambda0 must lie in (100 nm, 10 um) (got " + std::to_string(lambda0 * 1e9) +
                          " nm)");
    }
}

double small_waveguide_area(double lambda0, double n) { return lambda0 * lambda0 / (n * n); }

double circular_area(double radius) { return kPi * radius * radius; }

MaterialParams tm_linbo3()
{
    MaterialParams p;
    p.lambda0 = 795e-9;
    p.n = 2.3;
    p.gamma = 9.1e3;
    p.area = circular_area(6.25e-6);
    p.length = 10e-3;
    return p;
}

MaterialParams example_si_v()
{
    MaterialParams p = tm_linbo3();
    p.gamma = 9.0e3;
    p.area = small_waveguide_area(p.lambda0, p.n);
    return p;
}

std::optional<MaterialParams> material_preset(std::string_view name)
{
    if (name == "tm_linbo3") return tm_linbo3();
    if (name == "example_si_v") return example_si_v();
    return std::nullopt;
}

std::vector<std::string_view> material_preset_names() { return {"tm_linbo3", "example_si_v"}; }

double derived_coupling(const MaterialParams& params, double mode_volume)
{
    if (!(mode_volume > 0.0)) {
        throw DomainError("mode volume must be positive (got " + std::to_string(mode_volume) + ")");
    }
    using namespace constants;
    const double omega0 = kTwoPi * c / params.lambda0;
    // γ = μ² ω₀³ / (π ε₀ ħ c³)  →  μ²
    const double mu2 = params.gamma * kPi * epsilon0 * hbar * c * c * c / (omega0 * omega0 * omega0);
    // g = μ √(ω_s / (2 ħ ε V)), ε = ε₀ n² inside the crystal, ω_s ≈ ω₀
    const double eps = epsilon0 * params.n * params.n;
    return std::sqrt(mu2 * omega0 / (2.0 * hbar * eps * mode_volume));
}

double phase_from_coupling(double coupling, double length, double detuning)
{
    if (detuning == 0.0) throw DomainError("detuning must be non-zero");
    const double tau_s = length / constants::c;
    return 2.0 * coupling * coupling * tau_s / detuning;
}

}  // namespace afcxpm
