#include <doctest.h>

#include <cmath>

#include "afcxpm/errors.hpp"
#include "afcxpm/feasibility.hpp"
#include "afcxpm/loss.hpp"
#include "afcxpm/xpm.hpp"

using namespace afcxpm;

TEST_CASE("worked design point satisfies every condition")
{
    const auto r = check_conditions(example_design_point());
    CHECK(r.all_satisfied());
    CHECK(r.eta == doctest::Approx(0.498862395490719).epsilon(1e-12));
    CHECK(r.get("cond1").bound == doctest::Approx(503.801077329067).epsilon(1e-12));
    CHECK(r.get("cond2").bound == doctest::Approx(925.063236766614).epsilon(1e-12));
    CHECK(r.get("cond_bw").bound == doctest::Approx(917.352231291664).epsilon(1e-12));
    CHECK(r.get("cond_d").bound == doctest::Approx(29.6823445028486).epsilon(1e-12));
    CHECK(r.get("loss_ok").value == doctest::Approx(0.054751900255779).epsilon(1e-12));
    CHECK(r.get("sensitivity").value == doctest::Approx(1.00533667649645).epsilon(1e-12));
    CHECK(r.absolute_floor == doctest::Approx(80.0 * kPi));
    CHECK(r.conditions.size() == 6);
    CHECK_THROWS_AS(r.get("nope"), ConfigError);
}

TEST_CASE("m = 80 pi fails cond1 whenever eta < 1")
{
    auto p = example_design_point();
    p.passes = static_cast<int>(std::floor(80.0 * kPi));
    for (double d : {5.0, 30.0, 100.0}) {
        p.d = d;
        CHECK_FALSE(check_conditions(p).get("cond1").satisfied);
    }
}

TEST_CASE("cond1 depends on eta alone")
{
    auto p = example_design_point();
    const double base = check_conditions(p).get("cond1").bound;
    p.f = 7.0;
    p.n_teeth = 40;
    p.bandwidth_hz = 1e6;
    p.passes = 3;
    CHECK(check_conditions(p).get("cond1").bound == base);
    CHECK(check_conditions(p).get("cond1").bound * check_conditions(p).eta == doctest::Approx(80.0 * kPi));
}

TEST_CASE("design point validation")
{
    auto p = example_design_point();
    p.f = 1.0;
    CHECK_THROWS_AS(check_conditions(p), ConfigError);
    p = example_design_point();
    p.passes = 0;
    CHECK_THROWS_AS(check_conditions(p), ConfigError);
}

TEST_CASE("range grids")
{
    CHECK((Range{1.0, 2.0, 0.5}.values() == std::vector<double>{1.0, 1.5, 2.0}));
    CHECK((Range{3.0, 3.0, 0.0}.values() == std::vector<double>{3.0}));
    CHECK_THROWS_AS((Range{2.0, 1.0, 0.5}.values()), ConfigError);
    CHECK_THROWS_AS((Range{1.0, 2.0, 0.0}.values()), ConfigError);
}

namespace {

SearchRanges around_worked_point()
{
    SearchRanges r;
    r.d = {20.0, 40.0, 5.0};
    r.finesse = {2.8, 3.6, 0.2};
    r.n_teeth = {90.0, 130.0, 10.0};
    r.f = {2.0, 4.0, 0.5};
    return r;
}

}  // namespace

TEST_CASE("search finds a point no worse than the worked one")
{
    const auto res = minimal_passes(SearchTargets{500e3, 0.1}, around_worked_point(), example_si_v());
    REQUIRE(res.feasible);
    CHECK(res.best.passes <= 930);
    CHECK(res.report.all_satisfied());
    CHECK_FALSE(res.pareto.empty());
    CHECK(res.pareto.front().point.passes == res.best.passes);

    // cross-check with the phase and loss modules
    const auto& b = res.best;
    MaterialParams mp = b.params;
    mp.area = b.area();
    const double phi1 = phase_per_photon(mp, b.detuning(), false);
    CHECK(std::sqrt(b.eta() * b.ground_atoms()) * b.passes * phi1 / 2.0 > 1.0);
    CHECK(signal_loss(mp, b.ground_atoms(), b.detuning(), 1) * b.passes <= 0.1);

    // narrower bandwidth never needs more passes
    const auto narrow = minimal_passes(SearchTargets{50e3, 0.1}, around_worked_point(), example_si_v());
    REQUIRE(narrow.feasible);
    CHECK(narrow.best.passes < res.best.passes);
}

TEST_CASE("every Pareto row is feasible and the front is monotone")
{
    const auto res = minimal_passes(SearchTargets{500e3, 0.1}, around_worked_point(), example_si_v());
    for (std::size_t i = 0; i < res.pareto.size(); ++i) {
        CHECK(check_conditions(res.pareto[i].point, 0.1).all_satisfied());
        if (i > 0) {
            CHECK(res.pareto[i].point.passes >= res.pareto[i - 1].point.passes);
            CHECK(res.pareto[i].zeta_l_total < res.pareto[i - 1].zeta_l_total);
        }
    }
}

TEST_CASE("zero loss budget is infeasible and says why")
{
    const auto res = minimal_passes(SearchTargets{500e3, 0.0}, around_worked_point(), example_si_v());
    CHECK_FALSE(res.feasible);
    CHECK(res.binding.find("loss_ok") != std::string::npos);
}

TEST_CASE("search is independent of the thread count")
{
    const auto a = minimal_passes(SearchTargets{500e3, 0.1}, around_worked_point(), example_si_v(), 1);
    const auto b = minimal_passes(SearchTargets{500e3, 0.1}, around_worked_point(), example_si_v(), 3);
    CHECK(a.best.passes == b.best.passes);
    CHECK(a.best.d == b.best.d);
    CHECK(a.pareto.size() == b.pareto.size());
}
