#include "afcxpm/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>

#include "afcxpm/afc.hpp"
#include "afcxpm/errors.hpp"
#include "afcxpm/loss.hpp"
#include "afcxpm/units.hpp"
#include "afcxpm/xpm.hpp"

namespace afcxpm {

double DesignPoint::area() const
{
    return params.area > 0.0 ? params.area : small_waveguide_area(params.lambda0, params.n);
}

double DesignPoint::area_factor() const { return area() / small_waveguide_area(params.lambda0, params.n); }

double DesignPoint::eta() const { return recall_efficiency(d, finesse); }

double DesignPoint::detuning() const { return f * n_teeth * finesse * params.gamma; }

double DesignPoint::atoms() const
{
    MaterialParams p = params;
    p.area = area();
    return atoms_from_optical_depth(p, d, n_teeth);
}

void DesignPoint::validate() const
{
    if (!(f > 1.0)) throw ConfigError("f must be > 1 (signal far detuned from the comb)");
    if (passes < 1) throw ConfigError("passes m must be >= 1");
    if (n_teeth < 1) throw ConfigError("n_teeth must be >= 1");
    if (!(d > 0.0)) throw ConfigError("optical depth d must be > 0");
    if (!(finesse > 0.0)) throw ConfigError("finesse must be > 0");
    if (!(bandwidth_hz >= 0.0)) throw ConfigError("bandwidth_hz must be >= 0");
    MaterialParams p = params;
    p.area = area();
    p.validate();
}

DesignPoint example_design_point()
{
    DesignPoint p;
    p.params = example_si_v();
    return p;
}

bool FeasibilityReport::all_satisfied() const
{
    return std::all_of(conditions.begin(), conditions.end(), [](const Condition& c) { return c.satisfied; });
}

const Condition& FeasibilityReport::get(const std::string& name) const
{
    for (const auto& c : conditions) {
        if (c.name == name) return c;
    }
    throw ConfigError("no condition named '" + name + "'");
}

namespace {

struct Bounds {
    double cond1, cond2, cond_bw;
};

Bounds pass_bounds(const DesignPoint& p, double eta, double budget)
{
    const double a = p.area_factor();
    const double gamma = p.params.gamma;
    Bounds b;
    b.cond1 = budget > 0.0 ? 8.0 * kPi * a / (budget * eta) : std::numeric_limits<double>::infinity();
    b.cond2 = 8.0 * std::sqrt(2.0) * kPi * p.f * p.finesse * std::sqrt(a * p.n_teeth / (p.d * eta));
    b.cond_bw = 16.0 * std::sqrt(2.0) * kPi * kPi * p.f * p.bandwidth_hz * std::sqrt(a) /
                (std::sqrt(p.n_teeth * eta * p.d) * gamma);
    return b;
}

double single_pass_loss(const DesignPoint& p)
{
    MaterialParams mp = p.params;
    mp.area = p.area();
    return signal_loss(mp, p.ground_atoms(), p.detuning(), 1);
}

}  // namespace

FeasibilityReport check_conditions(const DesignPoint& p, double loss_budget)
{
    p.validate();
    if (!(loss_budget >= 0.0)) throw ConfigError("loss_budget must be >= 0");

    FeasibilityReport r;
    r.point = p;
    r.eta = p.eta();
    r.detuning = p.detuning();
    r.loss_budget = loss_budget;
    MaterialParams mp = p.params;
    mp.area = p.area();
    r.phase_per_photon = phase_per_photon(mp, r.detuning, true);
    r.zeta_l_single = single_pass_loss(p);
    const double a = p.area_factor();
    r.absolute_floor = loss_budget > 0.0 ? 8.0 * kPi * a / loss_budget : std::numeric_limits<double>::infinity();

    const double m = p.passes;
    const Bounds b = pass_bounds(p, r.eta, loss_budget);
    const double ratio = p.params.gamma / r.detuning;
    const double d_bound = 128.0 * kPi * kPi * a / (p.n_teeth * r.eta * ratio * ratio * m * m);
    const double total_loss = m * r.zeta_l_single;
    const double product = std::sqrt(r.eta * p.ground_atoms()) * m * r.phase_per_photon;

    r.conditions = {
        {"cond1", "m", ">", m, b.cond1, m > b.cond1},
        {"cond_d", "d", ">", p.d, d_bound, p.d > d_bound},
        {"cond2", "m", ">", m, b.cond2, m > b.cond2},
        {"cond_bw", "m", ">", m, b.cond_bw, m > b.cond_bw},
        {"loss_ok", "zeta_l", "<=", total_loss, loss_budget, total_loss <= loss_budget},
        {"sensitivity", "sqrt(eta N_g) m phi_1", ">", product, 1.0, product > 1.0},
    };
    return r;
}

std::vector<double> Range::values() const
{
    if (!(max >= min)) throw ConfigError("range max must be >= min");
    if (max > min && !(step > 0.0)) throw ConfigError("range step must be > 0");
    std::vector<double> v;
    if (max == min) return {min};
    const auto n = static_cast<long>(std::floor((max - min) / step * (1.0 + 1e-12) + 1e-9));
    for (long i = 0; i <= n; ++i) v.push_back(min + static_cast<double>(i) * step);
    return v;
}

SearchResult minimal_passes(const SearchTargets& targets, const SearchRanges& ranges, const MaterialParams& params,
                            int threads)
{
    if (!(targets.loss_budget >= 0.0)) throw ConfigError("loss_budget must be >= 0");
    if (!(targets.bandwidth_hz >= 0.0)) throw ConfigError("bandwidth_hz must be >= 0");
    const auto ds = ranges.d.values();
    const auto fs = ranges.finesse.values();
    const auto ns = ranges.n_teeth.values();
    const auto ff = ranges.f.values();

    std::vector<DesignPoint> grid;
    for (double d : ds) {
        for (double n : ns) {
            for (double F : fs) {
                for (double f : ff) {
                    DesignPoint p;
                    p.d = d;
                    p.finesse = F;
                    p.n_teeth = static_cast<int>(std::lround(n));
                    p.f = f;
                    p.passes = 1;
                    p.bandwidth_hz = targets.bandwidth_hz;
                    p.params = params;
                    p.validate();
                    grid.push_back(p);
                }
            }
        }
    }

    std::vector<SearchEntry> entries(grid.size());
    const long count = static_cast<long>(grid.size());
#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1)
    for (long i = 0; i < count; ++i) {
        SearchEntry& e = entries[static_cast<std::size_t>(i)];
        e.point = grid[static_cast<std::size_t>(i)];
        const double eta = e.point.eta();
        const Bounds b = pass_bounds(e.point, eta, targets.loss_budget);
        // cond_d is cond2 solved for d, so it adds no separate m bound
        double lower = b.cond2;
        e.limiting = "cond2";
        if (b.cond_bw > lower) {
            lower = b.cond_bw;
            e.limiting = "cond_bw";
        }
        if (b.cond1 > lower) {
            lower = b.cond1;
            e.limiting = "cond1";
        }
        const double zl = single_pass_loss(e.point);
        if (!std::isfinite(lower) || lower >= static_cast<double>(std::numeric_limits<int>::max() - 1)) {
            e.feasible = false;
            e.zeta_l_total = std::numeric_limits<double>::infinity();
            continue;
        }
        e.point.passes = std::max(1, static_cast<int>(std::floor(lower)) + 1);
        e.zeta_l_total = e.point.passes * zl;
        e.feasible = e.zeta_l_total <= targets.loss_budget;
    }

    SearchResult out;
    out.evaluated = entries.size();
    auto key = [](const SearchEntry& e) {
        return std::make_tuple(e.point.passes, e.point.d, e.point.n_teeth, e.point.finesse, e.point.f);
    };
    const SearchEntry* best = nullptr;
    for (const auto& e : entries) {
        if (!e.feasible) continue;
        if (!best || key(e) < key(*best)) best = &e;
    }

    if (best) {
        out.feasible = true;
        out.best = best->point;
        out.report = check_conditions(best->point, targets.loss_budget);
        std::vector<SearchEntry> feas;
        for (const auto& e : entries) {
            if (e.feasible) feas.push_back(e);
        }
        std::sort(feas.begin(), feas.end(), [&](const SearchEntry& a, const SearchEntry& b) {
            if (a.point.passes != b.point.passes) return a.point.passes < b.point.passes;
            if (a.zeta_l_total != b.zeta_l_total) return a.zeta_l_total < b.zeta_l_total;
            return key(a) < key(b);
        });
        double best_loss = std::numeric_limits<double>::infinity();
        for (const auto& e : feas) {
            if (e.zeta_l_total < best_loss) {
                out.pareto.push_back(e);
                best_loss = e.zeta_l_total;
            }
        }
        return out;
    }

    // nothing feasible: report the point closest to the loss budget
    const SearchEntry* closest = nullptr;
    for (const auto& e : entries) {
        if (!closest || e.zeta_l_total < closest->zeta_l_total) closest = &e;
    }
    std::ostringstream os;
    if (!closest || !std::isfinite(closest->zeta_l_total)) {
        os << "loss_ok: a loss budget of " << targets.loss_budget << " admits no finite pass number";
    } else {
        os << "loss_ok: the smallest total loss over " << entries.size() << " points is "
           << closest->zeta_l_total << " > budget " << targets.loss_budget << " at d=" << closest->point.d
           << ", F=" << closest->point.finesse << ", n_t=" << closest->point.n_teeth << ", f=" << closest->point.f
           << ", where " << closest->limiting << " forces m >= " << closest->point.passes;
    }
    out.binding = os.str();
    return out;
}

}  // namespace afcxpm
