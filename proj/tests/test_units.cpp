#include <doctest.h>

#include <cmath>
#include <vector>

#include "nltr/errors.hpp"
#include "nltr/units.hpp"

using namespace nltr;

TEST_CASE("thermal voltage at the default temperature") {
    // kT/q at 298.15 K, frozen from an independent 50-digit evaluation of
    // 1.380649e-23 * 298.15 / 1.602176634e-19 (exact SI constants).
    CHECK(thermal_voltage(298.15) ==
          doctest::Approx(0.025692579121085846).epsilon(1e-15));
    CHECK(thermal_voltage(2 * 298.15) ==
          doctest::Approx(2 * 0.025692579121085846).epsilon(1e-15));
}

TEST_CASE("dBm and watt conversions") {
    CHECK(dbm_to_watts(0.0) == doctest::Approx(1e-3).epsilon(1e-15));
    CHECK(dbm_to_watts(30.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(dbm_to_watts(-30.0) == doctest::Approx(1e-6).epsilon(1e-15));
    CHECK(watts_to_dbm(1e-3) == doctest::Approx(0.0).epsilon(1e-12));
    for (double p : {-40.0, -7.3, 0.0, 12.5, 30.0})
        CHECK(watts_to_dbm(dbm_to_watts(p)) == doctest::Approx(p).epsilon(1e-12));
    CHECK_THROWS_AS(watts_to_dbm(0.0), domain_error);
    CHECK_THROWS_AS(watts_to_dbm(-1.0), domain_error);
}

TEST_CASE("decibel helpers") {
    CHECK(ratio_to_db(10.0) == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(ratio_to_db(100.0) == doctest::Approx(20.0).epsilon(1e-15));
    CHECK(amplitude_to_db(10.0) == doctest::Approx(20.0).epsilon(1e-15));
    CHECK(amplitude_to_db(0.5) ==
          doctest::Approx(-6.0205999132796239).epsilon(1e-14));
}

TEST_CASE("available power to source peak voltage") {
    // P_avail = v^2 / (8 R): -30 dBm from 50 ohm needs 20 mV peak.
    CHECK(source_peak_voltage(dbm_to_watts(-30.0), 50.0) ==
          doctest::Approx(0.02).epsilon(1e-12));
    const double v = source_peak_voltage(dbm_to_watts(7.0), 75.0);
    CHECK(v * v / (8 * 75.0) == doctest::Approx(dbm_to_watts(7.0)).epsilon(1e-12));
}

TEST_CASE("degree and radian conversion") {
    CHECK(deg_to_rad(180.0) == doctest::Approx(pi).epsilon(1e-15));
    CHECK(rad_to_deg(pi / 2) == doctest::Approx(90.0).epsilon(1e-15));
    for (double d : {-123.0, 0.0, 28.0, 86.0, 359.0})
        CHECK(rad_to_deg(deg_to_rad(d)) == doctest::Approx(d).epsilon(1e-14));
}

TEST_CASE("immittance views") {
    const immittance z = immittance::impedance(cpx(2.0, 0.0));
    CHECK(z.as_impedance() == cpx(2.0, 0.0));
    CHECK(z.as_admittance() == cpx(0.5, 0.0));

    const immittance y = immittance::admittance(cpx(0.0, 0.25));
    CHECK(y.as_impedance() == cpx(0.0, -4.0));

    CHECK_THROWS_AS(immittance::impedance(cpx(0.0, 0.0)).as_admittance(),
                    domain_error);
    CHECK_THROWS_AS(immittance::admittance(cpx(0.0, 0.0)).as_impedance(),
                    domain_error);
}

TEST_CASE("linspace endpoints are bit-exact and interior points uniform") {
    const std::vector<double> v = linspace(0.8e9, 1.3e9, 11);
    REQUIRE(v.size() == 11);
    CHECK(v.front() == 0.8e9);
    CHECK(v.back() == 1.3e9);
    CHECK(v[5] == doctest::Approx(1.05e9).epsilon(1e-15));
    for (std::size_t i = 1; i < v.size(); ++i) CHECK(v[i] > v[i - 1]);

    const std::vector<double> w = linspace(0.0, 1.0, 3);
    CHECK(w[1] == 0.5);

    CHECK_THROWS_AS(linspace(0.0, 1.0, 1), config_error);
    CHECK_THROWS_AS(linspace(1.0, 0.0, 5), config_error);
}

TEST_CASE("grid construction") {
    const grid2d g = make_grid(0.6e9, 1.5e9, 46, -40.0, 30.0, 36);
    CHECK(g.rows() == 46);
    CHECK(g.cols() == 36);
    CHECK(g.f_hz.front() == 0.6e9);
    CHECK(g.f_hz.back() == 1.5e9);
    CHECK(g.p_dbm.front() == -40.0);
    CHECK(g.p_dbm.back() == 30.0);
    // 20 MHz and 2 dB steps on the default axes.
    CHECK(g.f_hz[1] - g.f_hz[0] == doctest::Approx(20e6).epsilon(1e-12));
    CHECK(g.p_dbm[1] - g.p_dbm[0] == doctest::Approx(2.0).epsilon(1e-12));
}
