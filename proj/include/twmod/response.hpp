#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

#include "twmod/constants.hpp"
#include "twmod/device.hpp"

namespace twmod {

// Normalized traveling-wave EO frequency response sampled on a grid. length
// and delta_n pin down the model so the 3 dB search can re-evaluate it
// between grid points.
struct EOResponseCurve {
    std::vector<double> freqs;          // Hz, ascending
    std::vector<double> response_db;    // 20*log10 of normalized sideband amplitude
    double delta_n = 0.0;               // n_m - n_o used for the curve
    std::vector<double> alpha_m_curve;  // dB/m at each grid point
    double length = 0.0;                // m, interaction length
};

// Co-propagating envelopes after an interaction length z: b and r are the
// upper/lower optical sidebands, m the microwave drive.
struct SidebandState {
    std::complex<double> b;
    std::complex<double> r;
    std::complex<double> m;
};

/// Wavevector mismatch between the microwave drive and the optical carrier,
/// in index form: delta_k = 2 pi f (n_m - n_o) / c0.
inline double phase_mismatch(double n_m, double n_o, double f) {
    if (f < 0) throw std::domain_error("frequency must be >= 0");
    return 2.0 * pi * f * (n_m - n_o) / c0;
}

namespace detail {

/// (1 - exp(-s z)) / s with the removable singularity at s -> 0 expanded in
/// series (the bracket tends to z).
inline std::complex<double> accumulation_factor(std::complex<double> s, double z) {
    std::complex<double> sz = s * z;
    if (std::abs(sz) < 1e-6)
        return z * (1.0 - sz / 2.0 + sz * sz / 6.0);
    return (1.0 - std::exp(-sz)) / s;
}

} // namespace detail

/// Analytic envelope solution after propagation over z. alpha_o and alpha_m
/// are power attenuation coefficients in 1/m (they enter the field envelopes
/// halved), delta_k in rad/m, v_o the optical group velocity in m/s. m0 is
/// the input microwave amplitude; the optical carrier enters via g0 * p0.
inline SidebandState sideband_envelope(double g0, double p0, std::complex<double> m0, double z,
                                       double alpha_o, double alpha_m, double delta_k, double v_o) {
    if (z < 0) throw std::domain_error("z must be >= 0");
    if (!(v_o > 0)) throw std::domain_error("v_o must be > 0");
    const std::complex<double> i(0.0, 1.0);
    std::complex<double> s_b = alpha_m / 2.0 - i * delta_k;
    std::complex<double> s_r = alpha_m / 2.0 + i * delta_k;
    std::complex<double> common = (g0 * p0 / v_o) * m0 * std::exp(-alpha_o * z / 2.0);
    SidebandState st;
    st.b = -i * common * detail::accumulation_factor(s_b, z);
    st.r = -i * common * detail::accumulation_factor(s_r, z);
    st.m = m0 * std::exp(-alpha_m * z / 2.0);
    return st;
}

/// Normalized sideband amplitude at one frequency:
///   m(f) = |(1 - e^(-(a_m/2 - i dk) L)) / ((a_m/2 - i dk) L)|,
/// a_m in 1/m (power), dk in rad/m. Equals 1 at dk = a_m = 0 and
/// |sinc(dk L / 2)| in the lossless limit.
inline double response_magnitude(double alpha_m_per_m, double delta_k, double length) {
    std::complex<double> s(alpha_m_per_m / 2.0, -delta_k);
    return std::abs(detail::accumulation_factor(s, length)) / length;
}

/// Sample the normalized EO response of the device on a frequency grid at
/// the given operating temperature.
inline EOResponseCurve eo_response(const Device& dev, double temperature,
                                   const std::vector<double>& freq_grid) {
    if (freq_grid.empty())
        throw std::invalid_argument("frequency grid must be non-empty");
    for (size_t i = 1; i < freq_grid.size(); ++i)
        if (!(freq_grid[i] > freq_grid[i - 1]))
            throw std::invalid_argument("frequency grid must be strictly ascending");
    if (!(freq_grid.front() >= 0))
        throw std::invalid_argument("frequency grid must be non-negative");

    double n_m = microwave_index(dev.line, temperature);
    double n_o = dev.waveguide.n_g_opt;
    double length = dev.design.arm_length;

    EOResponseCurve curve;
    curve.freqs = freq_grid;
    curve.delta_n = n_m - n_o;
    curve.length = length;
    curve.response_db.reserve(freq_grid.size());
    curve.alpha_m_curve.reserve(freq_grid.size());
    for (double f : freq_grid) {
        double a_db = microwave_loss(dev.line, f);
        double dk = phase_mismatch(n_m, n_o, f);
        double m = response_magnitude(alpha_per_m_from_db(a_db), dk, length);
        curve.alpha_m_curve.push_back(a_db);
        curve.response_db.push_back(20.0 * std::log10(m));
    }
    return curve;
}

/// First frequency where the response crosses -3 dB, refined by bisection on
/// the model between the bracketing grid points (alpha_m interpolated
/// linearly inside the bracket). Empty when the curve never reaches -3 dB.
inline std::optional<double> bandwidth_3db(const EOResponseCurve& curve) {
    constexpr double threshold_db = -3.0;
    const auto& f = curve.freqs;
    const auto& r = curve.response_db;
    if (f.empty()) throw std::invalid_argument("empty response curve");
    if (r.front() <= threshold_db) return f.front();

    size_t hi = 0;
    for (size_t i = 1; i < f.size(); ++i) {
        if (r[i] <= threshold_db) { hi = i; break; }
    }
    if (hi == 0) return std::nullopt;

    double f_lo = f[hi - 1], f_hi = f[hi];
    double a_lo = curve.alpha_m_curve[hi - 1], a_hi = curve.alpha_m_curve[hi];
    auto db_at = [&](double freq) {
        double t = (freq - f_lo) / (f_hi - f_lo);
        double a_db = a_lo + t * (a_hi - a_lo);
        double dk = 2.0 * pi * freq * curve.delta_n / c0;
        return 20.0 * std::log10(response_magnitude(alpha_per_m_from_db(a_db), dk, curve.length));
    };
    double lo = f_lo, up = f_hi;
    for (int iter = 0; iter < 80 && (up - lo) > 1e-9 * up; ++iter) {
        double mid = 0.5 * (lo + up);
        if (db_at(mid) <= threshold_db) up = mid; else lo = mid;
    }
    return 0.5 * (lo + up);
}

/// Lossless response nulls f_k = k c0 / (|delta_n| L), k = 1..k_max.
inline std::vector<double> null_frequencies(double delta_n, double length, int k_max) {
    if (delta_n == 0.0)
        throw std::domain_error("no nulls: velocity matched");
    if (!(length > 0)) throw std::domain_error("length must be > 0");
    if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");
    std::vector<double> nulls;
    nulls.reserve(static_cast<size_t>(k_max));
    for (int k = 1; k <= k_max; ++k)
        nulls.push_back(k * c0 / (std::abs(delta_n) * length));
    return nulls;
}

} // namespace twmod
