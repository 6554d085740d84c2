#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "twmod/device.hpp"

namespace testutil {

// Reference line used throughout the tests: C = 0.74 pF/cm, L_geo = 6.2
// nH/cm, L_k(0) = 1.2 nH/cm, Tc = 8 K, loss 0.2 dB/m/GHz.
inline twmod::SuperconductingLine reference_line() {
    twmod::SuperconductingLine line;
    line.cap_per_len = 0.74e-10;
    line.l_geo = 6.2e-7;
    line.l_kin0 = 1.2e-7;
    line.t_c = 8.0;
    line.alpha_m_coef = 0.2;
    return line;
}

inline twmod::Device reference_device() {
    twmod::Device dev;
    dev.line = reference_line();
    dev.waveguide = {2.28, 80.0, 1.55e-6};
    dev.design = {0.1, 0.022, 50.0};
    return dev;
}

// Independent oracle for the normalized response: composite 10-point
// Gauss-Legendre evaluation of |integral_0^L exp(-a z/2 + i dk z) dz| / L,
// panel count chosen so each panel spans <= 1 in |s| z units.
inline double response_integral_oracle(double alpha_per_m, double delta_k, double length) {
    static const double nodes[5] = {0.1488743389816312, 0.4333953941292472,
                                    0.6794095682990244, 0.8650633666889845,
                                    0.9739065285171717};
    static const double weights[5] = {0.2955242247147529, 0.2692667193099963,
                                      0.2190863625159820, 0.1494513491505806,
                                      0.0666713443086881};
    std::complex<double> s(alpha_per_m / 2.0, -delta_k);
    int panels = static_cast<int>(std::ceil(std::abs(s) * length)) + 1;
    std::complex<double> total = 0.0;
    for (int p = 0; p < panels; ++p) {
        double a = length * p / panels;
        double b = length * (p + 1) / panels;
        double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        std::complex<double> acc = 0.0;
        for (int i = 0; i < 5; ++i) {
            for (double sign : {-1.0, 1.0}) {
                double z = mid + sign * half * nodes[i];
                acc += weights[i] * std::exp(-s * z);
            }
        }
        total += acc * half;
    }
    return std::abs(total) / length;
}

// Deterministic standard normal (Box-Muller on raw mt19937_64 output), so
// test sequences do not depend on the standard library's distributions.
inline double gauss(std::mt19937_64& rng) {
    double u1 = (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
    double u2 = (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
    return lo + (hi - lo) * u;
}

struct LineFit {
    double slope = 0.0, intercept = 0.0, r_squared = 0.0;
};

inline LineFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i]; sy += y[i];
        sxx += x[i] * x[i]; sxy += x[i] * y[i]; syy += y[i] * y[i];
    }
    LineFit f;
    double den = n * sxx - sx * sx;
    f.slope = (n * sxy - sx * sy) / den;
    f.intercept = (sy - f.slope * sx) / n;
    double ss_tot = syy - sy * sy / n;
    double ss_res = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        double e = y[i] - (f.slope * x[i] + f.intercept);
        ss_res += e * e;
    }
    f.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace testutil
