#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <set>

#include "helpers.hpp"
#include "twmod/constants.hpp"
#include "twmod/eye.hpp"

using namespace twmod;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

OperatingPoint eye_op(double bias, double v_pp, double bit_rate = 1e9) {
    OperatingPoint op;
    op.temperature = 4.8;
    op.p_opt_in = 0.0;
    op.bias_phase = bias;
    op.v_pp = v_pp;
    op.bit_rate = bit_rate;
    op.f_mod = 10e9;
    return op;
}

// Peak power giving exactly photons_full photons per bit slot at 1550 nm.
double power_for_photons(double photons_full, double bit_rate) {
    double omega = 2.0 * pi * c0 / 1.55e-6;
    return photons_full * hbar * omega * bit_rate;
}

} // namespace

static_assert(prbs7_next(Prbs7State{}).first == 0, "PRBS7 first bit from the all-ones state");

TEST_CASE("MZI transmission follows sin^2 of half the total phase") {
    CHECK(mzi_transmission(0.0, 0.0) == 0.0);
    CHECK_THAT(mzi_transmission(pi, 0.0), WithinRel(1.0, 1e-15));
    CHECK_THAT(mzi_transmission(pi / 2.0, 0.0), WithinRel(0.5, 1e-15));
    CHECK_THAT(mzi_transmission(pi / 3.0, pi / 6.0), WithinRel(0.5, 1e-15));
}

TEST_CASE("PRBS7 sequence has period 127 with 64 ones") {
    Prbs7State s;
    std::set<unsigned> seen;
    int ones = 0;
    for (int i = 0; i < 127; ++i) {
        seen.insert(s.lfsr);
        auto [bit, next] = prbs7_next(s);
        ones += bit;
        s = next;
    }
    CHECK(seen.size() == 127);   // visits every nonzero state
    CHECK(ones == 64);
    CHECK(s.lfsr == Prbs7State{}.lfsr);  // back at the start after one period

    SECTION("all-zero seeds are rejected") {
        CHECK_THROWS_AS(Prbs7State(0), std::invalid_argument);
        CHECK_THROWS_AS(Prbs7State(0x80), std::invalid_argument);  // masks to zero
        CHECK_NOTHROW(Prbs7State(0x35));
    }
}

TEST_CASE("Gaussian BER map") {
    CHECK(ber_from_q(0.0) == 0.5);
    CHECK_THAT(ber_from_q(6.0), WithinRel(9.8658764503770119e-10, 1e-12));
    CHECK_THAT(ber_from_q(2.01), WithinRel(0.022215594429431502, 1e-12));
    CHECK_THAT(ber_from_q(10.0), WithinRel(7.619853024160593e-24, 1e-11));
    CHECK_THROWS_AS(ber_from_q(-0.1), std::domain_error);
}

TEST_CASE("analytic shot-noise SNR on constructed rail configurations") {
    SECTION("dark low rail: N=200, bias = delta = pi/4 gives SNR 10") {
        auto op = eye_op(pi / 4.0, 0.5 * 0.22);  // v_pp/v_pi = 0.5
        auto r = analytic_snr(op, 0.22, power_for_photons(200.0, op.bit_rate), 1.55e-6);
        CHECK_THAT(r.n1_mean, WithinAbs(0.0, 1e-9));
        CHECK_THAT(r.n2_mean, WithinRel(100.0, 1e-12));
        CHECK_THAT(r.snr, WithinRel(10.0, 1e-12));
        CHECK_THAT(r.ber, WithinRel(7.619853024160593e-24, 1e-10));
    }

    SECTION("both rails lit: n1=100, n2=400 gives SNR 10") {
        auto op = eye_op(1.1467652873041563, 0.059388239644224516);
        auto r = analytic_snr(op, 0.22, power_for_photons(800.0, op.bit_rate), 1.55e-6);
        CHECK_THAT(r.n1_mean, WithinRel(100.0, 1e-10));
        CHECK_THAT(r.n2_mean, WithinRel(400.0, 1e-10));
        CHECK_THAT(r.snr, WithinRel(10.0, 1e-10));
    }

    SECTION("quadrature rails are symmetric about half transmission") {
        auto op = eye_op(pi / 2.0, 0.03);
        auto r = analytic_snr(op, 0.22, power_for_photons(1e6, op.bit_rate), 1.55e-6);
        CHECK_THAT(r.n1_mean + r.n2_mean, WithinRel(1e6, 1e-10));
        CHECK(r.n1_mean < r.n2_mean);
    }

    SECTION("amplitude-convention penalty derates the SNR") {
        auto op = eye_op(pi / 4.0, 0.5 * 0.22);
        double p = power_for_photons(200.0, op.bit_rate);
        auto clean = analytic_snr(op, 0.22, p, 1.55e-6);
        auto derated = analytic_snr(op, 0.22, p, 1.55e-6, 20.0);
        CHECK_THAT(derated.snr, WithinRel(clean.snr / 10.0, 1e-12));
        CHECK(derated.ber > clean.ber);
    }

    SECTION("SNR scales as sqrt of optical power at fixed geometry") {
        auto op = eye_op(pi / 2.0, 0.0022);
        double p = power_for_photons(1e6, op.bit_rate);
        auto r1 = analytic_snr(op, 0.22, p, 1.55e-6);
        auto r4 = analytic_snr(op, 0.22, 4.0 * p, 1.55e-6);
        CHECK_THAT(r4.snr, WithinRel(2.0 * r1.snr, 1e-12));
    }

    SECTION("millivolt drive example: 2.2 mV over Vpi 220 mV at 0.5 mW") {
        auto op = eye_op(pi / 2.0, 2.2e-3);
        auto r = analytic_snr(op, 0.22, 0.5e-3, 1.55e-6);
        CHECK_THAT(r.snr, WithinRel(21.93880153907422, 1e-10));
        CHECK(r.ber < 1e-20);
    }

    SECTION("overdrive beyond the small-signal window is rejected") {
        auto op = eye_op(pi / 2.0, 0.5);
        CHECK_THROWS_AS(analytic_snr(op, 0.22, 1e-3, 1.55e-6), std::domain_error);
    }
}

TEST_CASE("Monte Carlo eye is deterministic and matches the analytic rails") {
    auto op = eye_op(pi / 2.0, 0.03, 1e9);
    double p = power_for_photons(50000.0, op.bit_rate);

    SECTION("same seed reproduces every sample and statistic") {
        auto a = monte_carlo_eye(op, 0.22, p, 5000, 42, 1.55e-6);
        auto b = monte_carlo_eye(op, 0.22, p, 5000, 42, 1.55e-6);
        CHECK(a.samples == b.samples);
        CHECK(a.snr == b.snr);
        CHECK(a.n1_mean == b.n1_mean);
        CHECK(a.seed == 42);

        auto c = monte_carlo_eye(op, 0.22, p, 5000, 43, 1.55e-6);
        CHECK(a.samples != c.samples);
    }

    SECTION("rail means land within three standard errors of the analytic values") {
        const std::size_t n_bits = 100000;
        auto mc = monte_carlo_eye(op, 0.22, p, n_bits, 7, 1.55e-6);
        auto an = analytic_snr(op, 0.22, p, 1.55e-6);
        REQUIRE(mc.samples.size() == n_bits);

        double n_lo = static_cast<double>(n_bits) * 63.0 / 127.0;
        double n_hi = static_cast<double>(n_bits) * 64.0 / 127.0;
        CHECK_THAT(mc.n1_mean, WithinAbs(an.n1_mean, 3.0 * std::sqrt(an.n1_mean / n_lo)));
        CHECK_THAT(mc.n2_mean, WithinAbs(an.n2_mean, 3.0 * std::sqrt(an.n2_mean / n_hi)));

        double d = an.n2_mean - an.n1_mean;
        double s = std::sqrt(an.n1_mean) + std::sqrt(an.n2_mean);
        double var_d = an.n1_mean / n_lo + an.n2_mean / n_hi;
        double var_s = an.n1_mean / (2.0 * n_lo) + an.n2_mean / (2.0 * n_hi);
        double sigma_snr = an.snr * std::sqrt(var_d / (d * d) + var_s / (s * s));
        CHECK_THAT(mc.snr, WithinAbs(an.snr, 3.0 * sigma_snr));
    }

    SECTION("penalty applies identically to both estimators") {
        auto mc0 = monte_carlo_eye(op, 0.22, p, 5000, 11, 1.55e-6);
        auto mc3 = monte_carlo_eye(op, 0.22, p, 5000, 11, 1.55e-6, 3.0);
        CHECK_THAT(mc3.snr, WithinRel(mc0.snr * std::pow(10.0, -3.0 / 20.0), 1e-12));
    }

    SECTION("sample size floor") {
        CHECK_THROWS_AS(monte_carlo_eye(op, 0.22, p, 999, 1, 1.55e-6), std::invalid_argument);
    }
}

TEST_CASE("Poisson sampler moments in both regimes") {
    std::mt19937_64 rng(2024);

    SECTION("CDF inversion below the crossover") {
        const int n = 200000;
        double mean = 5.0, sum = 0.0, sumsq = 0.0;
        for (int i = 0; i < n; ++i) {
            double x = detail::poisson_sample(mean, rng);
            REQUIRE(x >= 0.0);
            REQUIRE(x == std::floor(x));
            sum += x;
            sumsq += x * x;
        }
        double m = sum / n, v = sumsq / n - m * m;
        CHECK_THAT(m, WithinAbs(mean, 3.0 * std::sqrt(mean / n)));
        CHECK_THAT(v / m, WithinAbs(1.0, 0.03));
    }

    SECTION("rounded normal above the crossover") {
        const int n = 200000;
        double mean = 400.0, sum = 0.0, sumsq = 0.0;
        for (int i = 0; i < n; ++i) {
            double x = detail::poisson_sample(mean, rng);
            REQUIRE(x >= 0.0);
            REQUIRE(x == std::floor(x));
            sum += x;
            sumsq += x * x;
        }
        double m = sum / n, v = sumsq / n - m * m;
        CHECK_THAT(m, WithinAbs(mean, 3.0 * std::sqrt(mean / n)));
        CHECK_THAT(v / m, WithinAbs(1.0, 0.03));
    }

    SECTION("zero and negative means give zero counts") {
        CHECK(detail::poisson_sample(0.0, rng) == 0.0);
        CHECK(detail::poisson_sample(-1.0, rng) == 0.0);
    }
}

TEST_CASE("optimal bias equals the drive half-swing in the shot-noise model") {
    auto op = eye_op(pi / 2.0, 2.2e-3);
    double p = 0.5e-3;
    auto [bias, snr] = optimal_bias(op, 0.22, p, 1.55e-6);

    double delta = pi * op.v_pp / (2.0 * 0.22);
    CHECK_THAT(bias, WithinAbs(delta, 1e-4));
    CHECK_THAT(snr, WithinRel(31.02519375921063, 1e-7));  // sqrt(N) * sin(delta)

    // Strictly better than quadrature for small drives.
    CHECK(snr > analytic_snr(op, 0.22, p, 1.55e-6).snr);

    SECTION("requires a nonzero drive") {
        auto idle = eye_op(pi / 2.0, 0.0);
        CHECK_THROWS_AS(optimal_bias(idle, 0.22, p, 1.55e-6), std::domain_error);
    }
}

TEST_CASE("uniform variate stays strictly inside the unit interval") {
    std::mt19937_64 rng(99);
    double lo = 1.0, hi = 0.0, sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        double u = detail::uniform01(rng);
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        sum += u;
    }
    CHECK(lo < 1e-3);
    CHECK(hi > 0.999);
    CHECK_THAT(sum / n, WithinAbs(0.5, 0.005));
}
