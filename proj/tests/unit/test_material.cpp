#include <doctest.h>

#include <cmath>
#include <random>

#include "afcxpm/errors.hpp"
#include "afcxpm/material.hpp"
#include "afcxpm/units.hpp"
#include "afcxpm/xpm.hpp"

using namespace afcxpm;

TEST_CASE("presets")
{
    const auto p = tm_linbo3();
    CHECK(p.lambda0 == doctest::Approx(795e-9));
    CHECK(p.n == doctest::Approx(2.3));
    CHECK(p.gamma == doctest::Approx(9.1e3));
    CHECK(p.area == doctest::Approx(kPi * 6.25e-6 * 6.25e-6));
    CHECK_NOTHROW(p.validate());

    const auto s = example_si_v();
    CHECK(s.gamma == doctest::Approx(9e3));
    CHECK(s.area == doctest::Approx(s.lambda0 * s.lambda0 / (s.n * s.n)));

    CHECK(material_preset("tm_linbo3").has_value());
    CHECK_FALSE(material_preset("nope").has_value());
    CHECK(material_preset_names().size() == 2);
}

TEST_CASE("validation names the field")
{
    auto p = tm_linbo3();
    p.gamma = -1.0;
    CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("gamma"), ConfigError);
    p = tm_linbo3();
    p.lambda0 = 50e-9;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = tm_linbo3();
    p.area = 0.0;
    CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("area"), ConfigError);
}

TEST_CASE("frequency units")
{
    const auto f = Frequency::mhz(100.0);
    CHECK(f.linear() == doctest::Approx(1e8));
    CHECK(f.angular() == doctest::Approx(kTwoPi * 1e8));
    CHECK(Frequency::rad_per_s(kTwoPi).linear() == doctest::Approx(1.0));
    CHECK(f.as(FrequencyUnit::Angular).unit() == FrequencyUnit::Angular);
    CHECK(angular_to_mhz(mhz_to_angular(42.0)) == doctest::Approx(42.0));
}

TEST_CASE("coupling route reproduces the phase law")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        MaterialParams p;
        p.lambda0 = 400e-9 + 1200e-9 * u(rng);
        p.n = 1.0 + 2.0 * u(rng);
        p.gamma = 1e3 + 1e6 * u(rng);
        p.area = 1e-12 + 1e-9 * u(rng);
        p.length = 1e-3 + 5e-2 * u(rng);
        const double delta = (u(rng) < 0.5 ? -1.0 : 1.0) * kTwoPi * (1e6 + 1e9 * u(rng));
        const double g = derived_coupling(p, p.mode_volume());
        const double via_g = phase_from_coupling(g, p.length, delta);
        const double direct = phase_per_photon(p, delta, false);
        CHECK(std::abs(via_g / direct - 1.0) < 1e-12);
    }
}

TEST_CASE("coupling rejects a non-positive volume")
{
    CHECK_THROWS_AS(derived_coupling(tm_linbo3(), 0.0), DomainError);
    CHECK_THROWS_AS(derived_coupling(tm_linbo3(), -1.0), DomainError);
}
