#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "twmod/constants.hpp"
#include "twmod/device.hpp"

namespace twmod {

// Eye statistics for OOK modulation with shot-noise-limited direct
// detection. Photon numbers are per bit slot; samples holds the per-bit
// detected counts when the result comes from a Monte Carlo run.
struct EyeResult {
    double n1_mean = 0.0;  // photons/bit on the low rail
    double n2_mean = 0.0;  // photons/bit on the high rail
    double snr = 0.0;      // (n2 - n1) / (std1 + std2)
    double ber = 0.0;
    std::vector<double> samples;
    std::uint64_t seed = 0;
};

// x^7 + x^6 + 1 maximal-length LFSR over the low 7 bits.
struct Prbs7State {
    std::uint8_t lfsr = 0x7F;

    Prbs7State() = default;
    explicit Prbs7State(std::uint8_t seed) : lfsr(static_cast<std::uint8_t>(seed & 0x7F)) {
        if (lfsr == 0) throw std::invalid_argument("PRBS7 state must not be all-zero");
    }
};

/// MZI power transmission sin^2(phi/2) at total phase bias + drive.
inline double mzi_transmission(double bias_phase, double drive_phase) {
    double s = std::sin((bias_phase + drive_phase) / 2.0);
    return s * s;
}

/// Advance the PRBS7 register one step; returns the emitted bit and the
/// successor state. Period 127 with 64 ones and 63 zeros.
inline constexpr std::pair<int, Prbs7State> prbs7_next(Prbs7State state) {
    unsigned s = state.lfsr;
    unsigned newbit = ((s >> 6) ^ (s >> 5)) & 1u;
    Prbs7State next;
    next.lfsr = static_cast<std::uint8_t>(((s << 1) | newbit) & 0x7F);
    return {static_cast<int>(newbit), next};
}

/// Gaussian-approximation bit error rate for decision parameter q:
/// BER = erfc(q / sqrt(2)) / 2.
inline double ber_from_q(double q) {
    if (q < 0) throw std::domain_error("q must be >= 0");
    return 0.5 * std::erfc(q / std::sqrt(2.0));
}

namespace detail {

inline double rail_photons(double bias, double drive, double photons_full) {
    return mzi_transmission(bias, drive) * photons_full;
}

inline double shot_snr(double n1, double n2) {
    if (n1 > n2) std::swap(n1, n2);
    double denom = std::sqrt(n1) + std::sqrt(n2);
    if (denom == 0.0) return 0.0;
    return (n2 - n1) / denom;
}

// Uniform double in (0, 1) from the top 53 bits of the generator; keeps the
// sampling sequence identical across standard-library implementations.
inline double uniform01(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
}

// Poisson sample: exact CDF inversion below mean 30, rounded normal
// approximation above (documented threshold; relative skew < 0.2% there).
inline double poisson_sample(double mean, std::mt19937_64& rng) {
    if (mean <= 0.0) return 0.0;
    if (mean < 30.0) {
        double u = uniform01(rng);
        double p = std::exp(-mean), cum = p;
        int k = 0;
        while (u > cum && k < 400) {
            ++k;
            p *= mean / k;
            cum += p;
        }
        return k;
    }
    double u1 = uniform01(rng), u2 = uniform01(rng);
    double g = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * pi * u2);
    double v = std::round(mean + std::sqrt(mean) * g);
    return v < 0.0 ? 0.0 : v;
}

} // namespace detail

/// Shot-noise-limited eye statistics from the closed-form rail photon
/// numbers. Rails sit at bias +- pi*Vpp/(2*Vpi); each bit slot carries
/// p_peak/(hbar*omega*bit_rate) photons at full transmission. snr_penalty_db
/// (amplitude convention, 20*log10) derates the SNR before the BER map.
inline EyeResult analytic_snr(const OperatingPoint& op, double v_pi, double p_peak_at_detector,
                              double wavelength, double snr_penalty_db = 0.0) {
    if (!(v_pi > 0)) throw std::domain_error("v_pi must be > 0");
    if (!(op.bit_rate > 0)) throw std::domain_error("bit_rate must be > 0");
    if (!(wavelength > 0)) throw std::domain_error("wavelength must be > 0");
    if (op.v_pp >= 2.0 * v_pi)
        throw std::domain_error("drive beyond small-signal range: v_pp must be < 2*v_pi");

    double omega_o = 2.0 * pi * c0 / wavelength;
    double photons_full = p_peak_at_detector / (hbar * omega_o * op.bit_rate);
    double delta = pi * op.v_pp / (2.0 * v_pi);
    double na = detail::rail_photons(op.bias_phase, -delta, photons_full);
    double nb = detail::rail_photons(op.bias_phase, +delta, photons_full);

    EyeResult r;
    r.n1_mean = std::min(na, nb);
    r.n2_mean = std::max(na, nb);
    r.snr = detail::shot_snr(r.n1_mean, r.n2_mean) * std::pow(10.0, -snr_penalty_db / 20.0);
    r.ber = ber_from_q(r.snr);
    return r;
}

/// PRBS7-driven Monte Carlo eye: per-bit Poisson photon counts, empirical
/// rail statistics, SNR = (mean2 - mean1)/(std1 + std2). Deterministic for a
/// given seed (single RNG stream, bits consumed in order).
inline EyeResult monte_carlo_eye(const OperatingPoint& op, double v_pi, double p_peak_at_detector,
                                 std::size_t n_bits, std::uint64_t seed, double wavelength,
                                 double snr_penalty_db = 0.0) {
    if (n_bits < 1000) throw std::invalid_argument("n_bits must be >= 1000");
    if (!(v_pi > 0)) throw std::domain_error("v_pi must be > 0");
    if (op.v_pp >= 2.0 * v_pi)
        throw std::domain_error("drive beyond small-signal range: v_pp must be < 2*v_pi");

    double omega_o = 2.0 * pi * c0 / wavelength;
    double photons_full = p_peak_at_detector / (hbar * omega_o * op.bit_rate);
    double delta = pi * op.v_pp / (2.0 * v_pi);
    double mean_lo = detail::rail_photons(op.bias_phase, -delta, photons_full);
    double mean_hi = detail::rail_photons(op.bias_phase, +delta, photons_full);

    std::mt19937_64 rng(seed);
    Prbs7State prbs;
    EyeResult r;
    r.seed = seed;
    r.samples.reserve(n_bits);

    double sum[2] = {0.0, 0.0}, sumsq[2] = {0.0, 0.0};
    std::size_t count[2] = {0, 0};
    for (std::size_t i = 0; i < n_bits; ++i) {
        auto [bit, next] = prbs7_next(prbs);
        prbs = next;
        double n = detail::poisson_sample(bit ? mean_hi : mean_lo, rng);
        r.samples.push_back(n);
        sum[bit] += n;
        sumsq[bit] += n * n;
        ++count[bit];
    }

    double m0 = sum[0] / count[0];
    double m1 = sum[1] / count[1];
    double var0 = (sumsq[0] - count[0] * m0 * m0) / (count[0] - 1);
    double var1 = (sumsq[1] - count[1] * m1 * m1) / (count[1] - 1);
    double lo_mean = std::min(m0, m1), hi_mean = std::max(m0, m1);
    double lo_std = std::sqrt(std::max(0.0, m0 <= m1 ? var0 : var1));
    double hi_std = std::sqrt(std::max(0.0, m0 <= m1 ? var1 : var0));

    r.n1_mean = lo_mean;
    r.n2_mean = hi_mean;
    double denom = lo_std + hi_std;
    r.snr = (denom == 0.0 ? 0.0 : (hi_mean - lo_mean) / denom) *
            std::pow(10.0, -snr_penalty_db / 20.0);
    r.ber = ber_from_q(r.snr);
    return r;
}

/// Bias maximizing the analytic SNR, by golden-section search over (0, pi]
/// to 1e-6 rad. The optimum sits between the transmission null and
/// quadrature (at bias = pi*Vpp/(2*Vpi) in the shot-noise model).
inline std::pair<double, double> optimal_bias(const OperatingPoint& op, double v_pi,
                                              double p_peak_at_detector, double wavelength) {
    if (!(op.v_pp > 0)) throw std::domain_error("v_pp must be > 0");
    auto snr_at = [&](double bias) {
        OperatingPoint trial = op;
        trial.bias_phase = bias;
        return analytic_snr(trial, v_pi, p_peak_at_detector, wavelength).snr;
    };

    const double invphi = 0.6180339887498949;
    double a = 1e-9, b = pi;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = snr_at(c), fd = snr_at(d);
    while (b - a > 1e-6) {
        if (fc > fd) {
            b = d; d = c; fd = fc;
            c = b - invphi * (b - a);
            fc = snr_at(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + invphi * (b - a);
            fd = snr_at(d);
        }
    }
    double bias = 0.5 * (a + b);
    return {bias, snr_at(bias)};
}

} // namespace twmod
