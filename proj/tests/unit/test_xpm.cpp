#include <doctest.h>

#include <cmath>
#include <random>

#include "afcxpm/errors.hpp"
#include "afcxpm/units.hpp"
#include "afcxpm/xpm.hpp"

using namespace afcxpm;

namespace {

const StorageWindow kWindow{0.0, 200e-9};

SignalField signal_of(double n, double delta_mhz, int passes = 1)
{
    return SignalField({{50e-9, 10e-9}}, n, mhz_to_angular(delta_mhz), passes, kWindow);
}

}  // namespace

TEST_CASE("phase per photon at 100 MHz")
{
    const auto p = tm_linbo3();
    CHECK(phase_per_photon(p, mhz_to_angular(100.0), false) ==
          doctest::Approx(1.12207099920635e-9).epsilon(1e-12));
    CHECK(phase_per_photon(p, mhz_to_angular(100.0), true) ==
          doctest::Approx(0.5 * 1.12207099920635e-9).epsilon(1e-12));
    CHECK(probe_phase_shift(signal_of(6.9e7, 100.0), p, false).phi ==
          doctest::Approx(0.0774228989452385).epsilon(1e-12));
    CHECK_THROWS_AS(phase_per_photon(p, 0.0, false), DomainError);
}

TEST_CASE("phase is odd in detuning and linear in photons and passes")
{
    const auto p = tm_linbo3();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(1.0, 500.0);
    for (int i = 0; i < 100; ++i) {
        const double mhz = u(rng);
        CHECK(phase_per_photon(p, mhz_to_angular(-mhz), false) == -phase_per_photon(p, mhz_to_angular(mhz), false));
        const double n = 1e6 * u(rng);
        const int m = 1 + static_cast<int>(u(rng));
        const double one = probe_phase_shift(signal_of(n, mhz), p, false).phi;
        CHECK(probe_phase_shift(signal_of(3.0 * n, mhz), p, false).phi == doctest::Approx(3.0 * one).epsilon(1e-14));
        CHECK(probe_phase_shift(signal_of(n, mhz, m), p, false).phi == doctest::Approx(m * one).epsilon(1e-14));
    }
    CHECK(probe_phase_shift(signal_of(0.0, 100.0), p, false).phi == 0.0);
}

TEST_CASE("phase depends only on total photon number")
{
    const auto p = tm_linbo3();
    std::vector<double> phases;
    for (TimeBin b : {TimeBin::Early, TimeBin::Late, TimeBin::Plus, TimeBin::Minus}) {
        TimeBinState s{b};
        SignalField sig(s.modes(40e-9, 10e-9), 6.9e7, mhz_to_angular(100.0), 1, kWindow);
        phases.push_back(probe_phase_shift(sig, p, false).phi);
    }
    for (double v : phases) CHECK(v == phases.front());
}

TEST_CASE("time-bin states")
{
    TimeBinState e{TimeBin::Early};
    CHECK(e.modes(10e-9, 5e-9).size() == 1);
    TimeBinState m{TimeBin::Minus};
    const auto modes = m.modes(10e-9, 5e-9);
    REQUIRE(modes.size() == 2);
    CHECK(modes[1].center - modes[0].center == doctest::Approx(18.3e-9));
    CHECK(std::norm(modes[0].amplitude) + std::norm(modes[1].amplitude) == doctest::Approx(1.0));
    CHECK(std::arg(modes[1].amplitude) == doctest::Approx(kPi));
    CHECK(parse_time_bin("plus") == TimeBin::Plus);
    CHECK_THROWS_AS(parse_time_bin("up"), ConfigError);
}

TEST_CASE("signal field validation")
{
    CHECK_THROWS_AS(SignalField({}, 1.0, 1.0, 1, kWindow), ConfigError);
    CHECK_THROWS_AS(SignalField({{50e-9, 10e-9}}, -1.0, 1.0, 1, kWindow), ConfigError);
    CHECK_THROWS_AS(SignalField({{50e-9, 10e-9}}, 1.0, 1.0, 0, kWindow), ConfigError);
    CHECK_THROWS_AS(SignalField({{198e-9, 10e-9}}, 1.0, 1.0, 1, kWindow), WindowError);
    const auto s = signal_of(10.0, 100.0);
    CHECK_THROWS_AS(s.shifted(200e-9), WindowError);
    CHECK(s.shifted(10e-9).modes()[0].center == doctest::Approx(60e-9));
}

TEST_CASE("validity warning for broadband signals")
{
    const auto p = tm_linbo3();
    SignalField narrow({{100e-9, 150e-9}}, 1.0, mhz_to_angular(100.0), 1, {0.0, 200e-9});
    CHECK(probe_phase_shift(narrow, p, false).validity_warnings.empty());
    SignalField wide({{100e-9, 1e-9}}, 1.0, mhz_to_angular(100.0), 1, {0.0, 200e-9});
    CHECK_FALSE(probe_phase_shift(wide, p, false).validity_warnings.empty());
}

TEST_CASE("sensitivity threshold")
{
    CHECK(sensitivity_threshold(100.0, 1.0) == doctest::Approx(0.1));
    CHECK_THROWS_AS(sensitivity_threshold(0.0, 0.5), DomainError);
    CHECK_THROWS_AS(sensitivity_threshold(10.0, 1.5), DomainError);
}
