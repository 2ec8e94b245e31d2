#include "afcxpm/loss.hpp"

#include <cmath>
#include <string>

#include "afcxpm/errors.hpp"
#include "afcxpm/units.hpp"

namespace afcxpm {

namespace {

double signal_wavenumber(const MaterialParams& p) { return kTwoPi * p.n / p.lambda0; }

}  // namespace

double atoms_from_optical_depth(const MaterialParams& params, double d, int n_teeth)
{
    const double reference = small_waveguide_area(params.lambda0, params.n);
    return static_cast<double>(n_teeth) * d * params.area / reference;
}

Susceptibility susceptibility(const SpectralFeature& feature, const MaterialParams& params, double n_ground,
                              double detuning, std::span<const double> omega)
{
    if (!(n_ground >= 0.0)) throw ConfigError("ground-state atom number must be >= 0");
    if (detuning == 0.0 || feature.in_comb_band(-detuning)) {
        throw DomainError("signal detuning 2pi x " + std::to_string(detuning / kTwoPi * 1e-6) +
                          " MHz lies inside the comb band: resonant absorption, not a dispersive loss");
    }

    Susceptibility out;
    out.k_s = signal_wavenumber(params);
    if (omega.empty()) {
        out.omega = {0.0};
    } else {
        out.omega.assign(omega.begin(), omega.end());
    }
    out.chi.assign(out.omega.size(), {0.0, 0.0});

    // N(δ) ∝ α(δ) over the comb band
    const auto grid = feature.grid();
    const auto alpha = feature.alpha();
    std::vector<double> delta, weight;
    double total = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!feature.in_comb_band(grid[i])) continue;
        delta.push_back(grid[i]);
        weight.push_back(alpha[i]);
        total += alpha[i];
    }
    if (total <= 0.0 || n_ground == 0.0) {
        return out;
    }

    const double volume = params.mode_volume();
    const double gamma_h = params.gamma;
    const double prefactor = params.lambda0 * params.lambda0 * params.gamma /
                             (16.0 * kPi * params.n * params.n * volume) / out.k_s;
    for (std::size_t w = 0; w < out.omega.size(); ++w) {
        std::complex<double> sum = 0.0;
        for (std::size_t j = 0; j < delta.size(); ++j) {
            const double x = out.omega[w] - (detuning + delta[j]);
            const double nj = n_ground * weight[j] / total;
            // −1/(x + iγ): Im = γ/(x² + γ²) ≥ 0
            sum += nj * std::complex<double>(-x, gamma_h) / (x * x + gamma_h * gamma_h);
        }
        out.chi[w] = prefactor * sum;
    }
    return out;
}

double imag_chi_far_detuned(const MaterialParams& params, double n_ground, double detuning)
{
    if (detuning == 0.0) throw DomainError("detuning must be non-zero");
    const double k_s = signal_wavenumber(params);
    return n_ground * params.lambda0 * params.lambda0 * params.gamma * params.gamma /
           (16.0 * kPi * params.n * params.n * params.mode_volume() * detuning * detuning) / k_s;
}

double signal_loss(const MaterialParams& params, double n_ground, double detuning, int passes)
{
    if (detuning == 0.0) throw DomainError("detuning must be non-zero");
    if (passes < 1) throw ConfigError("passes must be >= 1");
    if (!(n_ground >= 0.0)) throw ConfigError("ground-state atom number must be >= 0");
    const double ratio = params.gamma / detuning;
    return static_cast<double>(passes) * n_ground * params.lambda0 * params.lambda0 /
           (8.0 * kPi * params.n * params.n * params.area) * ratio * ratio;
}

}  // namespace afcxpm
