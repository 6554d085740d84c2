#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "twmod/constants.hpp"
#include "twmod/device.hpp"
#include "twmod/response.hpp"

namespace twmod {

struct FitResult {
    std::vector<std::pair<std::string, double>> params;  // name -> estimate, fit order
    double residual_rms = 0.0;         // same units as the data
    std::vector<double> covariance_diag;  // per-parameter variance, fit order
    bool converged = false;
    int iterations = 0;
    std::string diagnostic;            // set when converged is false

    double param(const std::string& name) const {
        for (const auto& [k, v] : params)
            if (k == name) return v;
        throw std::out_of_range("no fitted parameter named '" + name + "'");
    }
};

namespace detail {

// Solve the symmetric positive-definite system a*x = b in place (Cholesky,
// dimension <= 3 in practice). Returns false when the matrix is not SPD
// within tolerance, signalling a rank-deficient fit.
inline bool solve_spd(std::vector<double>& a, std::vector<double>& b, int n) {
    std::vector<double> l(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a[static_cast<size_t>(i) * n + j];
            for (int k = 0; k < j; ++k) s -= l[static_cast<size_t>(i) * n + k] * l[static_cast<size_t>(j) * n + k];
            if (i == j) {
                if (s <= 0.0 || !std::isfinite(s)) return false;
                l[static_cast<size_t>(i) * n + j] = std::sqrt(s);
            } else {
                l[static_cast<size_t>(i) * n + j] = s / l[static_cast<size_t>(j) * n + j];
            }
        }
    }
    for (int i = 0; i < n; ++i) {
        double s = b[i];
        for (int k = 0; k < i; ++k) s -= l[static_cast<size_t>(i) * n + k] * b[k];
        b[i] = s / l[static_cast<size_t>(i) * n + i];
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int k = i + 1; k < n; ++k) s -= l[static_cast<size_t>(k) * n + i] * b[k];
        b[i] = s / l[static_cast<size_t>(i) * n + i];
    }
    return true;
}

using ResidualFn = std::function<std::vector<double>(const std::vector<double>&)>;
using JacobianFn = std::function<std::vector<std::vector<double>>(const std::vector<double>&)>;

inline double sum_sq(const std::vector<double>& r) {
    double s = 0.0;
    for (double v : r) s += v * v;
    return s;
}

/// Central finite-difference Jacobian, row i = d r / d theta at sample i.
inline JacobianFn fd_jacobian(const ResidualFn& residual) {
    return [residual](const std::vector<double>& theta) {
        size_t k = theta.size();
        std::vector<std::vector<double>> jac;
        std::vector<double> tp = theta, tm = theta;
        for (size_t j = 0; j < k; ++j) {
            double h = std::max(1e-6 * std::abs(theta[j]), 1e-8);
            tp[j] = theta[j] + h;
            tm[j] = theta[j] - h;
            std::vector<double> rp = residual(tp), rm = residual(tm);
            tp[j] = tm[j] = theta[j];
            if (jac.empty()) jac.assign(rp.size(), std::vector<double>(k, 0.0));
            for (size_t i = 0; i < rp.size(); ++i)
                jac[i][j] = (rp[i] - rm[i]) / (2.0 * h);
        }
        return jac;
    };
}

// Damped Gauss-Newton (Levenberg-Marquardt): accept a step only when it
// lowers the sum of squares, so the returned objective never exceeds the
// one at the initial guess. Converged when ||J^T r||_inf < 1e-10, or when
// each gradient component is below 1e-6 of its natural scale
// ||J_col|| * ||r|| (the absolute form is unreachable for noisy data whose
// residual never approaches zero). Hard stop after 200 iterations.
inline FitResult levenberg_marquardt(const ResidualFn& residual, const JacobianFn& jacobian,
                                     std::vector<double> theta,
                                     const std::vector<std::string>& names) {
    constexpr double grad_tol = 1e-10;
    constexpr double grad_cos_tol = 1e-6;
    constexpr int max_iter = 200;
    const int k = static_cast<int>(theta.size());

    FitResult out;
    std::vector<double> r = residual(theta);
    const int n = static_cast<int>(r.size());
    double ssr = sum_sq(r);
    double lambda = 1e-3;
    bool rank_deficient = false;

    int iter = 0;
    for (; iter < max_iter; ++iter) {
        auto jac = jacobian(theta);
        std::vector<double> jtr(k, 0.0);
        std::vector<double> jtj(static_cast<size_t>(k) * k, 0.0);
        for (int i = 0; i < n; ++i) {
            for (int a = 0; a < k; ++a) {
                jtr[a] += jac[i][a] * r[i];
                for (int b = a; b < k; ++b)
                    jtj[static_cast<size_t>(a) * k + b] += jac[i][a] * jac[i][b];
            }
        }
        for (int a = 0; a < k; ++a)
            for (int b = 0; b < a; ++b)
                jtj[static_cast<size_t>(a) * k + b] = jtj[static_cast<size_t>(b) * k + a];

        double gnorm = 0.0, gcos = 0.0;
        const double rnorm = std::sqrt(ssr);
        for (int a = 0; a < k; ++a) {
            gnorm = std::max(gnorm, std::abs(jtr[a]));
            double denom = std::sqrt(jtj[static_cast<size_t>(a) * k + a]) * rnorm;
            if (denom > 0.0) gcos = std::max(gcos, std::abs(jtr[a]) / denom);
        }
        if (gnorm < grad_tol || gcos < grad_cos_tol) { out.converged = true; break; }

        bool stepped = false;
        for (int attempt = 0; attempt < 12 && !stepped; ++attempt) {
            std::vector<double> a = jtj, rhs(k);
            for (int d = 0; d < k; ++d) {
                double diag = jtj[static_cast<size_t>(d) * k + d];
                a[static_cast<size_t>(d) * k + d] = diag + lambda * std::max(diag, 1e-30);
                rhs[d] = -jtr[d];
            }
            if (!solve_spd(a, rhs, k)) { rank_deficient = true; break; }
            std::vector<double> trial = theta;
            for (int d = 0; d < k; ++d) trial[d] += rhs[d];
            std::vector<double> rt = residual(trial);
            double ssr_t = sum_sq(rt);
            if (std::isfinite(ssr_t) && ssr_t < ssr) {
                theta = trial;
                r = std::move(rt);
                ssr = ssr_t;
                lambda = std::max(lambda / 3.0, 1e-12);
                stepped = true;
            } else {
                lambda *= 10.0;
            }
        }
        if (rank_deficient || !stepped) break;
    }

    out.iterations = iter;
    out.residual_rms = std::sqrt(ssr / n);
    for (int a = 0; a < k; ++a) out.params.emplace_back(names[a], theta[a]);
    if (!out.converged) {
        if (rank_deficient) out.diagnostic = "rank-deficient fit";
        else if (iter >= max_iter) out.diagnostic = "iteration limit reached";
        else out.diagnostic = "stalled before gradient tolerance";
    }

    // Covariance from (J^T J)^-1 * SSR/(n - k), column by column.
    auto jac = jacobian(theta);
    std::vector<double> jtj(static_cast<size_t>(k) * k, 0.0);
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < k; ++a)
            for (int b = a; b < k; ++b)
                jtj[static_cast<size_t>(a) * k + b] += jac[i][a] * jac[i][b];
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < a; ++b)
            jtj[static_cast<size_t>(a) * k + b] = jtj[static_cast<size_t>(b) * k + a];
    out.covariance_diag.assign(k, 0.0);
    double scale = n > k ? ssr / (n - k) : 0.0;
    for (int a = 0; a < k; ++a) {
        std::vector<double> m = jtj, e(k, 0.0);
        e[a] = 1.0;
        if (solve_spd(m, e, k))
            out.covariance_diag[a] = e[a] * scale;
    }
    return out;
}

} // namespace detail

/// Fit n_m(T) samples with y = a * sqrt(1 + b / sqrt(1 - (T/Tc)^4)), Tc
/// fixed (measured, not fitted). Analytic Jacobian; initial guess
/// a = mean(y), b = 0.1.
inline FitResult fit_index_vs_temperature(const std::vector<std::pair<double, double>>& samples,
                                          double t_c) {
    if (samples.size() < 3)
        throw std::invalid_argument("need at least 3 (T, n_m) samples");
    if (!(t_c > 0)) throw std::invalid_argument("t_c must be > 0");
    for (const auto& [t, y] : samples)
        if (!(t >= 0 && t < t_c))
            throw std::invalid_argument("sample temperature must satisfy 0 <= T < t_c");

    std::vector<double> u;  // 1/sqrt(1 - (T/Tc)^4) per sample
    u.reserve(samples.size());
    double y_mean = 0.0;
    for (const auto& [t, y] : samples) {
        double r = t / t_c;
        u.push_back(1.0 / std::sqrt(1.0 - r * r * r * r));
        y_mean += y;
    }
    y_mean /= samples.size();

    auto residual = [&](const std::vector<double>& th) {
        std::vector<double> r(samples.size());
        for (size_t i = 0; i < samples.size(); ++i)
            r[i] = th[0] * std::sqrt(1.0 + th[1] * u[i]) - samples[i].second;
        return r;
    };
    auto jacobian = [&](const std::vector<double>& th) {
        std::vector<std::vector<double>> j(samples.size(), std::vector<double>(2));
        for (size_t i = 0; i < samples.size(); ++i) {
            double root = std::sqrt(1.0 + th[1] * u[i]);
            j[i][0] = root;
            j[i][1] = th[0] * u[i] / (2.0 * root);
        }
        return j;
    };
    return detail::levenberg_marquardt(residual, jacobian, {y_mean, 0.1}, {"a", "b"});
}

/// Microwave loss slope from an S21 magnitude trace: ride the upper envelope
/// (samples that top every neighbor inside a centered window of `window`
/// samples), then fit a line in dB vs frequency. line_length (m) converts
/// the whole-line slope to the per-meter coefficient. Parameters:
/// alpha_m_coef (dB/m/GHz) and intercept_db.
inline FitResult fit_loss_slope(const std::vector<std::pair<double, double>>& s21,
                                double line_length, int window = 21) {
    if (s21.size() < 2)
        throw std::invalid_argument("need at least 2 (f, mag_db) samples");
    if (!(line_length > 0)) throw std::invalid_argument("line_length must be > 0");
    if (window < 1) throw std::invalid_argument("window must be >= 1");

    // Boundary samples whose centered window would be clipped are skipped: a
    // one-sided window admits ripple flanks, which sit well below the
    // envelope and lever the regression. Monotone ripple-free data has no
    // interior peaks at all, so fall back to disjoint block maxima there.
    const size_t n_samp = s21.size();
    const size_t half = static_cast<size_t>(window) / 2;
    std::vector<std::pair<double, double>> env;
    for (size_t i = half; i + half < n_samp; ++i) {
        bool top = true;
        for (size_t j = i - half; j <= i + half && top; ++j)
            top = s21[j].second <= s21[i].second;
        if (top) env.push_back(s21[i]);
    }
    if (env.size() < 2) {
        env.clear();
        for (size_t start = 0; start < n_samp; start += static_cast<size_t>(window)) {
            size_t stop = std::min(start + static_cast<size_t>(window), n_samp);
            size_t best = start;
            for (size_t i = start + 1; i < stop; ++i)
                if (s21[i].second > s21[best].second) best = i;
            env.push_back(s21[best]);
        }
    }
    if (env.size() < 2)
        throw std::invalid_argument("fewer than 2 envelope points; reduce the window");

    // Plain least-squares line y = m x + c over envelope points, x in GHz.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(env.size());
    for (const auto& [f, y] : env) {
        double x = f / 1e9;
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    double denom = n * sxx - sx * sx;
    if (denom <= 0.0) {
        FitResult bad;
        bad.params = {{"alpha_m_coef", 0.0}, {"intercept_db", sy / n}};
        bad.covariance_diag = {0.0, 0.0};
        bad.diagnostic = "rank-deficient fit";
        return bad;
    }
    double slope = (n * sxy - sx * sy) / denom;  // dB per GHz over the whole line
    double intercept = (sy - slope * sx) / n;

    FitResult out;
    out.converged = true;
    out.iterations = 1;
    out.params = {{"alpha_m_coef", -slope / line_length}, {"intercept_db", intercept}};

    double ssr = 0.0;
    for (const auto& [f, y] : env) {
        double e = y - (slope * (f / 1e9) + intercept);
        ssr += e * e;
    }
    out.residual_rms = std::sqrt(ssr / n);
    double var_scale = env.size() > 2 ? ssr / (n - 2) : 0.0;
    out.covariance_diag = {var_scale * n / denom / (line_length * line_length),
                           var_scale * sxx / denom};
    return out;
}

/// One-parameter fit of the optical group index to a measured EO response
/// curve (dB), with the microwave index and loss taken from the device at
/// temperature T. Residuals live in dB, so null positions dominate whenever
/// the data has them. Initial guess n_o = 2.25 (simulated room-temperature
/// value) unless overridden.
inline FitResult fit_optical_index(const std::vector<std::pair<double, double>>& eo_data,
                                   const Device& dev, double temperature,
                                   double n_o_init = 2.25) {
    if (eo_data.size() < 3)
        throw std::invalid_argument("need at least 3 (f, response_db) samples");

    double lo = eo_data.front().second, hi = lo;
    for (const auto& [f, y] : eo_data) {
        lo = std::min(lo, y);
        hi = std::max(hi, y);
    }
    if (hi - lo < 0.05) {
        FitResult flat;
        flat.params = {{"n_o", n_o_init}};
        flat.covariance_diag = {0.0};
        flat.diagnostic = "insufficient curvature";
        flat.residual_rms = 0.0;
        return flat;
    }

    double n_m = microwave_index(dev.line, temperature);
    double length = dev.design.arm_length;
    auto residual = [&](const std::vector<double>& th) {
        std::vector<double> r(eo_data.size());
        for (size_t i = 0; i < eo_data.size(); ++i) {
            double f = eo_data[i].first;
            double dk = phase_mismatch(n_m, th[0], f);
            double a = alpha_per_m_from_db(microwave_loss(dev.line, f));
            double m = std::max(response_magnitude(a, dk, length), 1e-300);
            r[i] = 20.0 * std::log10(m) - eo_data[i].second;
        }
        return r;
    };
    return detail::levenberg_marquardt(residual, detail::fd_jacobian(residual), {n_o_init},
                                       {"n_o"});
}

} // namespace twmod
