#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "twmod/device.hpp"
#include "twmod/fitting.hpp"

using namespace twmod;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("kinetic inductance follows the two-fluid law") {
    auto line = testutil::reference_line();

    CHECK(kinetic_inductance(line, 0.0) == line.l_kin0);

    // (T/Tc)^4 = 0.25 -> L_k = L_k0 / sqrt(0.75)
    double t = line.t_c * std::pow(0.25, 0.25);
    CHECK_THAT(kinetic_inductance(line, t), WithinRel(1.3856406460551017e-7, 1e-12));

    line.l_kin0 = 0.0;
    CHECK(kinetic_inductance(line, 5.0) == 0.0);
}

TEST_CASE("kinetic inductance is undefined at and above Tc") {
    auto line = testutil::reference_line();
    CHECK_THROWS_WITH(kinetic_inductance(line, 8.0), "normal state: kinetic inductance undefined");
    CHECK_THROWS_WITH(kinetic_inductance(line, 9.5), "normal state: kinetic inductance undefined");
    CHECK_THROWS_AS(kinetic_inductance(line, 8.0), std::domain_error);
}

TEST_CASE("kinetic inductance increases strictly with temperature") {
    auto line = testutil::reference_line();
    double prev = kinetic_inductance(line, 0.0);
    for (int i = 1; i <= 60; ++i) {
        double t = 7.9 * i / 60.0;
        double cur = kinetic_inductance(line, t);
        CHECK(cur > prev);
        prev = cur;
    }
}

TEST_CASE("microwave index matches the closed form") {
    auto line = testutil::reference_line();
    CHECK_THAT(microwave_index(line, 0.0), WithinRel(2.2184641892, 1e-10));

    SECTION("temperature-independent without kinetic inductance") {
        line.l_kin0 = 0.0;
        CHECK(microwave_index(line, 0.0) == microwave_index(line, 7.5));
    }

    SECTION("diverges monotonically toward Tc") {
        CHECK(microwave_index(line, 7.99) > microwave_index(line, 7.9));
        CHECK(microwave_index(line, 7.999) > microwave_index(line, 7.99));
        CHECK(microwave_index(line, 7.99999999) > 10.0);
    }
}

TEST_CASE("microwave index samples refit to the analytic (a, b) form") {
    auto line = testutil::reference_line();
    std::vector<std::pair<double, double>> samples;
    for (int i = 0; i < 25; ++i) {
        double t = 0.5 + (7.9 - 0.5) * i / 24.0;
        samples.emplace_back(t, microwave_index(line, t));
    }
    FitResult fr = fit_index_vs_temperature(samples, line.t_c);
    CHECK(fr.converged);
    CHECK_THAT(fr.param("a"), WithinRel(2.030637525518653, 1e-3));
    CHECK_THAT(fr.param("b"), WithinRel(0.1935483870967742, 1e-3));
}

TEST_CASE("characteristic impedance and scaling") {
    auto line = testutil::reference_line();
    CHECK_THAT(char_impedance(line, 0.0), WithinRel(100.0, 1e-12));

    SECTION("quadrupled capacitance halves Z0") {
        auto heavy = line;
        heavy.cap_per_len *= 4.0;
        CHECK_THAT(char_impedance(heavy, 3.0), WithinRel(char_impedance(line, 3.0) / 2.0, 1e-12));
    }

    SECTION("definition check at LC = 2.5 nH/m, 1 pF/m") {
        SuperconductingLine simple;
        simple.cap_per_len = 1e-12;
        simple.l_geo = 2.5e-9;
        simple.l_kin0 = 0.0;
        simple.t_c = 9.0;
        CHECK_THAT(char_impedance(simple, 0.0), WithinRel(50.0, 1e-12));
    }
}

TEST_CASE("telegrapher identity Z0 * v_m = 1/C holds to machine precision") {
    auto line = testutil::reference_line();
    for (double t : {0.0, 2.0, 4.8, 6.4, 7.5, 7.95}) {
        double lhs = char_impedance(line, t) * microwave_velocity(line, t);
        CHECK_THAT(lhs, WithinRel(1.0 / line.cap_per_len, 1e-14));
    }
}

TEST_CASE("microwave loss is linear in frequency") {
    auto line = testutil::reference_line();
    CHECK_THAT(microwave_loss(line, 10e9), WithinRel(2.0, 1e-12));
    CHECK(microwave_loss(line, 0.0) == 0.0);

    line.alpha_m_coef = 0.0;
    CHECK(microwave_loss(line, 25e9) == 0.0);

    line.alpha_m_coef = 0.1;
    CHECK_THAT(microwave_loss(line, 40e9), WithinRel(4.0, 1e-12));

    SECTION("additivity over frequency") {
        line.alpha_m_coef = 0.37;
        double f1 = 3.7e9, f2 = 21.3e9;
        CHECK_THAT(microwave_loss(line, f1 + f2),
                   WithinRel(microwave_loss(line, f1) + microwave_loss(line, f2), 1e-12));
    }
}

TEST_CASE("tabulated loss overrides the linear model") {
    auto line = testutil::reference_line();
    line.loss_table = {{1e9, 0.5}, {10e9, 2.0}, {20e9, 8.0}};

    CHECK(microwave_loss(line, 0.5e9) == 0.5);   // clamped low
    CHECK(microwave_loss(line, 30e9) == 8.0);    // clamped high
    CHECK_THAT(microwave_loss(line, 10e9), WithinRel(2.0, 1e-12));
    CHECK_THAT(microwave_loss(line, 15e9), WithinRel(5.0, 1e-12));  // midpoint interpolation
    CHECK_THAT(microwave_loss(line, 5.5e9), WithinRel(1.25, 1e-12));
}

TEST_CASE("normal-state RC bandwidth") {
    SuperconductingLine line;
    line.cap_per_len = 1e-10;  // 20 pF over 0.2 m
    line.l_geo = 1e-7;
    line.t_c = 8.0;
    line.r_normal = 69e3;      // 13.8 kOhm over 0.2 m

    CHECK_THAT(normal_rc_bandwidth(line, 0.2), WithinRel(576648.3445358528, 1e-10));

    SECTION("doubling resistance halves the cutoff") {
        auto stiffer = line;
        stiffer.r_normal *= 2.0;
        CHECK_THAT(normal_rc_bandwidth(stiffer, 0.2),
                   WithinRel(normal_rc_bandwidth(line, 0.2) / 2.0, 1e-12));
    }

    SECTION("1 pF with 159.15 Ohm gives 1.0000 GHz") {
        SuperconductingLine def;
        def.cap_per_len = 1e-12;
        def.l_geo = 1e-7;
        def.t_c = 8.0;
        def.r_normal = 159.15;
        CHECK_THAT(normal_rc_bandwidth(def, 1.0), WithinRel(1000031059.3270206, 1e-10));
    }

    SECTION("superconducting line has no RC limit") {
        line.r_normal = 0.0;
        CHECK_THROWS_WITH(normal_rc_bandwidth(line, 0.2),
                          "superconducting state: RC limit not applicable");
    }
}

TEST_CASE("ohmic trade-off bandwidth is quadratic in Vpi") {
    CHECK_THAT(ohmic_tradeoff_bandwidth(1.0), WithinRel(20e9, 1e-12));
    CHECK_THAT(ohmic_tradeoff_bandwidth(0.1), WithinRel(0.2e9, 1e-12));
    CHECK_THAT(ohmic_tradeoff_bandwidth(0.042), WithinRel(35.28e6, 1e-12));

    for (double v : {0.03, 0.42, 1.7, 5.0})
        CHECK_THAT(ohmic_tradeoff_bandwidth(2.0 * v) / ohmic_tradeoff_bandwidth(v),
                   WithinRel(4.0, 1e-14));

    CHECK_THROWS_AS(ohmic_tradeoff_bandwidth(0.0), std::domain_error);
}

TEST_CASE("device validation enforces the declared invariants") {
    auto dev = testutil::reference_device();
    CHECK_NOTHROW(validate(dev));

    SECTION("bad line") {
        dev.line.cap_per_len = 0.0;
        CHECK_THROWS_AS(validate(dev), std::invalid_argument);
    }
    SECTION("bad waveguide index") {
        dev.waveguide.n_g_opt = 0.9;
        CHECK_THROWS_AS(validate(dev), std::invalid_argument);
    }
    SECTION("bad design") {
        dev.design.vpi_l = -1.0;
        CHECK_THROWS_AS(validate(dev), std::invalid_argument);
    }
    SECTION("loss table must ascend") {
        dev.line.loss_table = {{2e9, 1.0}, {1e9, 0.5}};
        CHECK_THROWS_AS(validate(dev), std::invalid_argument);
    }
}
