#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "twmod/constants.hpp"
#include "twmod/device.hpp"
#include "twmod/eo_transfer.hpp"
#include "twmod/response.hpp"

namespace twmod {

// One batch exploration: a primary grid over swept_parameter, an optional
// secondary family (its meaning depends on the sweep kind), and the fixed
// device/operating context everything else is read from.
struct SweepSpec {
    std::string swept_parameter;     // "arm_length", "delta_n" or "v_pi"
    std::string unit;                // unit label for the swept values
    std::vector<double> grid;        // SI values, strictly monotone
    Device device;
    OperatingPoint op;
    std::vector<std::string> outputs;   // requested metric column names
    std::vector<double> family;      // alpha_opt [dB/m] or alpha_m_coef [dB/m/GHz]
    std::vector<double> freq_grid;   // Hz, response sweeps only
};

// Rows stream through this sink one at a time; memory use is independent of
// the grid size.
using RowSink = std::function<void(const std::vector<double>&)>;

inline void validate(const SweepSpec& spec) {
    if (spec.grid.empty()) throw std::invalid_argument("sweep grid must be non-empty");
    bool inc = true, dec = true;
    for (size_t i = 1; i < spec.grid.size(); ++i) {
        inc = inc && spec.grid[i] > spec.grid[i - 1];
        dec = dec && spec.grid[i] < spec.grid[i - 1];
    }
    if (spec.grid.size() > 1 && !inc && !dec)
        throw std::invalid_argument("sweep grid must be strictly monotone");
    if (spec.swept_parameter != "arm_length" && spec.swept_parameter != "delta_n" &&
        spec.swept_parameter != "v_pi")
        throw std::invalid_argument("unknown swept parameter '" + spec.swept_parameter +
                                    "'; expected arm_length, delta_n or v_pi");
}

/// Log-spaced default length grid, 301 points over [0.01, 10] m (0.1 m is an
/// exact grid point).
inline std::vector<double> default_length_grid() {
    std::vector<double> g;
    g.reserve(301);
    for (int i = 0; i < 301; ++i)
        g.push_back(std::pow(10.0, -2.0 + 3.0 * i / 300.0));
    return g;
}

/// Log-spaced default frequency grid, 601 points over [0.1, 100] GHz.
inline std::vector<double> default_freq_grid() {
    std::vector<double> g;
    g.reserve(601);
    for (int i = 0; i < 601; ++i)
        g.push_back(std::pow(10.0, 8.0 + 3.0 * i / 600.0));
    return g;
}

struct EfficiencyPeak {
    double alpha_opt = 0.0;  // dB/m
    double length = 0.0;     // m, argmax over the emitted grid
    double eta = 0.0;
};

// Column orders for the streamed rows.
inline constexpr const char* efficiency_columns = "alpha_opt_db_per_m,length_m,eta";
inline constexpr const char* response_columns =
    "delta_n,alpha_m_coef_db_per_m_per_ghz,freq_hz,response_db";
inline constexpr const char* tradeoff_columns = "v_pi_v,f_3db_hz";

/// Transduction efficiency over the length grid, one family member per
/// optical loss value (rows stream alpha-major, grid order). Returns the
/// per-loss argmax over the emitted rows.
inline std::vector<EfficiencyPeak> efficiency_vs_length(const SweepSpec& spec,
                                                        const RowSink& sink) {
    validate(spec);
    if (spec.swept_parameter != "arm_length")
        throw std::invalid_argument("efficiency sweep expects swept_parameter = arm_length");
    if (spec.family.empty())
        throw std::invalid_argument("efficiency sweep needs at least one alpha_opt family value");

    const auto& d = spec.device;
    std::vector<EfficiencyPeak> peaks;
    for (double alpha : spec.family) {
        EfficiencyPeak peak{alpha, 0.0, -1.0};
        for (double length : spec.grid) {
            double eta = length_dependent_efficiency(spec.op.p_opt_in, d.design.vpi_l, alpha,
                                                     length, d.design.z_term, spec.op.f_mod,
                                                     d.waveguide.wavelength);
            if (eta > peak.eta) {
                peak.eta = eta;
                peak.length = length;
            }
            sink({alpha, length, eta});
        }
        peaks.push_back(peak);
    }
    return peaks;
}

struct ResponseBandwidth {
    double delta_n = 0.0;
    double alpha_m_coef = 0.0;             // dB/m/GHz
    std::optional<double> bandwidth_hz;    // empty = beyond grid
};

/// EO response over (delta_n grid) x (alpha_m_coef family) x (frequency
/// grid) at the fixed interaction length. Streams rows delta_n-major and
/// returns the extracted 3 dB bandwidths.
inline std::vector<ResponseBandwidth> response_vs_mismatch(const SweepSpec& spec,
                                                           const RowSink& sink) {
    validate(spec);
    if (spec.swept_parameter != "delta_n")
        throw std::invalid_argument("response sweep expects swept_parameter = delta_n");
    if (spec.family.empty())
        throw std::invalid_argument("response sweep needs at least one alpha_m_coef family value");
    const std::vector<double>& freqs = spec.freq_grid.empty() ? default_freq_grid() : spec.freq_grid;

    double length = spec.device.design.arm_length;
    std::vector<ResponseBandwidth> bws;
    for (double dn : spec.grid) {
        for (double coef : spec.family) {
            EOResponseCurve curve;
            curve.freqs = freqs;
            curve.delta_n = dn;
            curve.length = length;
            curve.response_db.reserve(freqs.size());
            curve.alpha_m_curve.reserve(freqs.size());
            for (double f : freqs) {
                double a_db = coef * (f / 1e9);
                double dk = 2.0 * pi * f * dn / c0;
                double m = response_magnitude(alpha_per_m_from_db(a_db), dk, length);
                curve.alpha_m_curve.push_back(a_db);
                curve.response_db.push_back(20.0 * std::log10(m));
                sink({dn, coef, f, curve.response_db.back()});
            }
            bws.push_back({dn, coef, bandwidth_3db(curve)});
        }
    }
    return bws;
}

/// Ohmic bandwidth/drive-voltage boundary f_3dB = 20 GHz (Vpi/V)^2 over a
/// Vpi grid. Designs above/left of the curve need superconducting
/// electrodes.
inline void tradeoff_overlay(const std::vector<double>& v_pi_grid, const RowSink& sink) {
    if (v_pi_grid.empty()) throw std::invalid_argument("v_pi grid must be non-empty");
    for (double v : v_pi_grid)
        sink({v, ohmic_tradeoff_bandwidth(v)});
}

/// FNV-1a 64-bit hash of a canonical spec serialization; embedded in output
/// headers so files can be traced back to the exact request.
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

namespace detail {

inline void put(std::ostringstream& os, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf << ';';
}

} // namespace detail

inline std::string canonical_text(const SweepSpec& spec) {
    std::ostringstream os;
    os << "sweep;" << spec.swept_parameter << ';' << spec.unit << ';';
    for (double v : spec.grid) detail::put(os, v);
    os << '|';
    for (double v : spec.family) detail::put(os, v);
    os << '|';
    for (double v : spec.freq_grid) detail::put(os, v);
    os << '|';
    for (const auto& s : spec.outputs) os << s << ';';
    os << '|';
    const auto& l = spec.device.line;
    detail::put(os, l.cap_per_len);
    detail::put(os, l.l_geo);
    detail::put(os, l.l_kin0);
    detail::put(os, l.t_c);
    detail::put(os, l.alpha_m_coef);
    detail::put(os, l.r_normal);
    for (const auto& [f, a] : l.loss_table) {
        detail::put(os, f);
        detail::put(os, a);
    }
    const auto& w = spec.device.waveguide;
    detail::put(os, w.n_g_opt);
    detail::put(os, w.alpha_opt);
    detail::put(os, w.wavelength);
    const auto& d = spec.device.design;
    detail::put(os, d.arm_length);
    detail::put(os, d.vpi_l);
    detail::put(os, d.z_term);
    const auto& o = spec.op;
    detail::put(os, o.temperature);
    detail::put(os, o.p_opt_in);
    detail::put(os, o.bias_phase);
    detail::put(os, o.v_pp);
    detail::put(os, o.bit_rate);
    detail::put(os, o.f_mod);
    return os.str();
}

inline std::uint64_t spec_hash(const SweepSpec& spec) {
    return fnv1a64(canonical_text(spec));
}

} // namespace twmod
