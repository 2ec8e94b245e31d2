#include "afcxpm/xpm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "afcxpm/errors.hpp"
#include "afcxpm/units.hpp"

namespace afcxpm {

SignalField::SignalField(std::vector<TemporalMode> modes, double n_photons, double detuning, int passes,
                         StorageWindow window)
    : modes_(std::move(modes)), n_photons_(n_photons), detuning_(detuning), passes_(passes), window_(window)
{
    if (modes_.empty()) throw ConfigError("signal needs at least one temporal mode");
    if (!(n_photons_ >= 0.0) || !std::isfinite(n_photons_)) throw ConfigError("photon number must be >= 0");
    if (passes_ < 1) throw ConfigError("passes must be >= 1");
    if (!(window_.end > window_.begin)) throw ConfigError("storage window must have end > begin");

    double norm = 0.0;
    for (const auto& m : modes_) {
        if (!(m.duration > 0.0)) throw ConfigError("mode duration must be > 0");
        norm += std::norm(m.amplitude);
    }
    if (!(norm > 0.0)) throw ConfigError("signal mode amplitudes are all zero");
    const double scale = 1.0 / std::sqrt(norm);
    for (auto& m : modes_) {
        m.amplitude *= scale;
        if (!window_.contains(m)) {
            std::ostringstream os;
            os << "signal mode [" << (m.center - 0.5 * m.duration) * 1e9 << ", "
               << (m.center + 0.5 * m.duration) * 1e9 << "] ns lies outside the storage window ["
               << window_.begin * 1e9 << ", " << window_.end * 1e9 << "] ns";
            throw WindowError(os.str());
        }
    }
}

double SignalField::shortest_mode() const
{
    double s = std::numeric_limits<double>::infinity();
    for (const auto& m : modes_) s = std::min(s, m.duration);
    return s;
}

SignalField SignalField::shifted(double dt) const
{
    auto modes = modes_;
    for (auto& m : modes) m.center += dt;
    return SignalField(std::move(modes), n_photons_, detuning_, passes_, window_);
}

std::string_view to_string(TimeBin b)
{
    switch (b) {
    case TimeBin::Early: return "early";
    case TimeBin::Late: return "late";
    case TimeBin::Plus: return "plus";
    case TimeBin::Minus: return "minus";
    }
    return "?";
}

TimeBin parse_time_bin(std::string_view s)
{
    if (s == "early" || s == "e") return TimeBin::Early;
    if (s == "late" || s == "l") return TimeBin::Late;
    if (s == "plus" || s == "+") return TimeBin::Plus;
    if (s == "minus" || s == "-") return TimeBin::Minus;
    throw ConfigError("time-bin state must be early|late|plus|minus (got '" + std::string(s) + "')");
}

double TimeBinState::relative_phase() const { return label == TimeBin::Minus ? kPi : 0.0; }

std::pair<std::complex<double>, std::complex<double>> TimeBinState::bin_amplitudes() const
{
    const double h = std::sqrt(0.5);
    switch (label) {
    case TimeBin::Early: return {1.0, 0.0};
    case TimeBin::Late: return {0.0, 1.0};
    case TimeBin::Plus:
    case TimeBin::Minus: return {h, std::polar(h, relative_phase())};
    }
    return {0.0, 0.0};
}

std::vector<TemporalMode> TimeBinState::modes(double t_early, double mode_duration) const
{
    const auto [a_early, a_late] = bin_amplitudes();
    std::vector<TemporalMode> out;
    if (a_early != 0.0) out.push_back({t_early, mode_duration, a_early});
    if (a_late != 0.0) out.push_back({t_early + separation, mode_duration, a_late});
    return out;
}

double phase_per_photon(const MaterialParams& params, double detuning, bool transfer)
{
    if (detuning == 0.0 || !std::isfinite(detuning)) {
        throw DomainError("detuning must be non-zero: the dispersive phase law does not hold on resonance");
    }
    const double geometry = params.lambda0 * params.lambda0 / (params.n * params.n * params.area);
    const double phi = geometry * params.gamma / (4.0 * kPi * detuning);
    return transfer ? 0.5 * phi : phi;
}

PhaseShift probe_phase_shift(const SignalField& signal, const MaterialParams& params, bool transfer,
                             double validity_margin)
{
    PhaseShift out;
    out.phi_per_photon = phase_per_photon(params, signal.detuning(), transfer);
    // Only the total photon number enters; the mode structure drops out.
    out.phi = static_cast<double>(signal.passes()) * signal.n_photons() * out.phi_per_photon;

    const double tau = signal.shortest_mode();
    const double limit = kTwoPi * validity_margin / tau;
    if (std::abs(signal.detuning()) < limit) {
        std::ostringstream os;
        os << "|detuning| = 2pi x " << std::abs(signal.detuning()) / kTwoPi * 1e-6
           << " MHz is below 2pi x " << validity_margin << "/tau_s = 2pi x " << limit / kTwoPi * 1e-6
           << " MHz; the far-detuned phase law may be inaccurate";
        out.validity_warnings.push_back(os.str());
    }
    return out;
}

double sensitivity_threshold(double n_probe, double eta)
{
    if (!(n_probe > 0.0)) throw DomainError("probe photon number must be > 0");
    if (!(eta > 0.0 && eta <= 1.0)) throw DomainError("efficiency must lie in (0, 1]");
    return 1.0 / std::sqrt(eta * n_probe);
}

}  // namespace afcxpm
