#include <doctest.h>

#include <cmath>
#include <numeric>

#include "afcxpm/errors.hpp"
#include "afcxpm/measurement.hpp"

using namespace afcxpm;

namespace {

ReadoutModel noiseless()
{
    ReadoutModel m;
    m.noise = NoiseModel::none();
    return m;
}

}  // namespace

TEST_CASE("readout map")
{
    const auto m = noiseless();
    CHECK(intensity_from_phase(m, 0.0) == doctest::Approx(1.0));
    CHECK(intensity_from_phase(m, 0.077) == doctest::Approx(0.930999231453144).epsilon(1e-12));
    for (double phi = -1.5; phi <= 1.5; phi += 0.01) {
        CHECK(phase_from_intensity(m, intensity_from_phase(m, phi)) == doctest::Approx(phi).epsilon(1e-9));
    }
    ReadoutModel dark = m;
    dark.visibility = 0.0;
    CHECK(intensity_from_phase(dark, 0.3) == intensity_from_phase(dark, -0.2));
    CHECK_THROWS_AS(phase_from_intensity(dark, 1.0), DomainError);

    ReadoutModel mismatched = m;
    mismatched.lo_match = 4.0;
    CHECK(mismatched.effective_visibility() == doctest::Approx(0.897 * 0.8));
}

TEST_CASE("noise model validation")
{
    NoiseModel n;
    CHECK(n.correlation() == doctest::Approx((1.0 + 0.5625 - 0.4444444444444444) / 1.5));
    n.reference_residual_sigma = 0.5;
    CHECK_THROWS_AS(n.validate(), ConfigError);
    n = NoiseModel{};
    n.detector_sigma = -0.1;
    CHECK_THROWS_AS(n.validate(), ConfigError);
    ReadoutModel r;
    r.visibility = 1.2;
    CHECK_THROWS_AS(r.validate(), ConfigError);
}

TEST_CASE("noiseless pipeline returns the true phase")
{
    const auto res = run_experiment(0.0774, 50, noiseless());
    for (const auto& r : res.records) CHECK(r.inferred_phase == doctest::Approx(0.0774).epsilon(1e-12));
    CHECK(res.sem == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS_AS(run_experiment(0.0, 0, noiseless()), ConfigError);
}

TEST_CASE("post-subtraction residual has the configured width")
{
    ReadoutModel m;
    m.noise.detector_sigma = 0.0;
    m.noise.seed = 99;
    const auto res = run_experiment(0.0, 20000, m);
    CHECK(res.std_dev == doctest::Approx(0.100).epsilon(0.03));
    CHECK(std::abs(res.mean) < 4.0 * res.sem);
}

TEST_CASE("records are reproducible from seed and index")
{
    ReadoutModel m;
    m.noise.seed = 1234;
    const auto a = run_experiment(0.05, 100, m, 1);
    const auto b = run_experiment(0.05, 100, m, 3);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].inferred_phase == b.records[i].inferred_phase);
        CHECK(simulate_shot(m, 0.05, i).inferred_phase == a.records[i].inferred_phase);
        CHECK(a.records[i].seed == 1234);
    }
    ReadoutModel other = m;
    other.noise.seed = 1235;
    CHECK(run_experiment(0.05, 100, other).mean != a.mean);
    CHECK(derive_seed(1, 2) != derive_seed(2, 1));
}

TEST_CASE("line fits")
{
    const std::vector<double> x{0.0, 1.0, 2.0, 3.0};
    const std::vector<double> y{1.0, 3.0, 5.0, 7.0};
    const auto f = fit_line(x, y);
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.slope_err == doctest::Approx(0.0));
    CHECK_FALSE(f.weighted);

    const auto w = fit_line(x, {1.1, 2.9, 5.1, 6.9}, {0.1, 0.1, 0.1, 0.1});
    CHECK(w.weighted);
    CHECK(w.slope_err == doctest::Approx(0.1 / std::sqrt(5.0)));

    CHECK_THROWS_AS(fit_line({1.0, 1.0, 1.0}, {1.0, 2.0, 3.0}), NumericalError);
    CHECK_THROWS_AS(fit_line({1.0, 2.0}, {1.0}), ConfigError);
}

TEST_CASE("noiseless sweep reproduces the analytic slopes")
{
    const auto pts = detuning_sweep(SweepConfig::defaults(), tm_linbo3(), noiseless());
    REQUIRE(pts.size() == 9);
    for (const auto& p : pts) {
        CHECK(std::abs(p.fit.slope / p.analytic - 1.0) < 1e-12);
        if (std::abs(p.detuning - mhz_to_angular(100.0)) < 1.0) {
            CHECK(p.fit.slope == doctest::Approx(1.12207099920635e-9).epsilon(1e-12));
        }
    }
    // ±Δ pairs cancel
    CHECK(pts[0].fit.slope + pts[7].fit.slope == doctest::Approx(0.0).epsilon(1e-22));

    SweepConfig two = SweepConfig::defaults();
    two.photon_levels = {0.0, 1e8};
    CHECK_THROWS_AS(detuning_sweep(two, tm_linbo3(), noiseless()), ConfigError);
}

TEST_CASE("noisy sweep stays within three fit errors")
{
    ReadoutModel m;
    m.noise.seed = 2024;
    for (const auto& p : detuning_sweep(SweepConfig::defaults(), tm_linbo3(), m)) {
        CHECK(std::abs(p.fit.slope - p.analytic) < 3.0 * p.fit.slope_err);
    }
}

TEST_CASE("qubit error rates")
{
    for (TimeBin b : {TimeBin::Early, TimeBin::Late}) {
        CHECK(qubit_error_rate(TimeBinState{b}, false, 0.0, AnalyzerModel::matched(b)) == 0.0);
    }
    for (TimeBin b : {TimeBin::Plus, TimeBin::Minus}) {
        CHECK(qubit_error_rate(TimeBinState{b}, false, 0.0, AnalyzerModel::matched(b, 0.897)) ==
              doctest::Approx(0.0515).epsilon(1e-12));
    }
    for (TimeBin b : {TimeBin::Early, TimeBin::Late, TimeBin::Plus, TimeBin::Minus}) {
        AnalyzerModel a = AnalyzerModel::matched(b);
        a.late_background = 0.02;
        const double off = qubit_error_rate(TimeBinState{b}, false, 0.3, a);
        const double on = qubit_error_rate(TimeBinState{b}, true, 0.3, a);
        CHECK(on == doctest::Approx(off).epsilon(1e-14));
    }
    AnalyzerModel bg = AnalyzerModel::matched(TimeBin::Early);
    bg.late_background = 0.01;
    CHECK(qubit_error_rate(TimeBinState{TimeBin::Early}, false, 0.0, bg) == doctest::Approx(0.01 / 1.01));

    CHECK_THROWS_AS(qubit_error_rate(TimeBinState{TimeBin::Early}, false, 0.0,
                                     AnalyzerModel::matched(TimeBin::Plus)),
                    ConfigError);
    CHECK_THROWS_AS(qubit_error_rate(TimeBinState{TimeBin::Minus}, false, 0.0,
                                     AnalyzerModel::matched(TimeBin::Late)),
                    ConfigError);
    CHECK(parse_analyzer(to_string(Analyzer::Interferometer)) == Analyzer::Interferometer);
}

TEST_CASE("fig4 rows")
{
    ReadoutModel m;
    m.noise.seed = 5;
    const auto rows = reproduce_fig4(Fig4Config{}, tm_linbo3(), m);
    REQUIRE(rows.size() == 5);
    CHECK_FALSE(rows[0].state.has_value());
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].phase_true == rows[1].phase_true);
        CHECK(rows[i].phase_mean == rows[1].phase_mean);
        CHECK(rows[i].error_after - rows[i].error_before == 0.0);
    }
    CHECK(rows[1].phase_true == doctest::Approx(0.0774228989452385).epsilon(1e-12));
    CHECK(rows[1].phase_mean - rows[0].phase_mean == doctest::Approx(0.0774).epsilon(0.01));
}
