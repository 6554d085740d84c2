#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "twmod/constants.hpp"

namespace twmod {

// Per-unit-length description of the superconducting electrode pair. Values
// come from config (FEM or measurement), not from a field solver. The loss
// model is linear in frequency unless a measured alpha_m(f) table is supplied.
struct SuperconductingLine {
    double cap_per_len = 0.0;   // F/m
    double l_geo = 0.0;         // H/m, geometric inductance
    double l_kin0 = 0.0;        // H/m, kinetic inductance at T = 0
    double t_c = 0.0;           // K
    double alpha_m_coef = 0.0;  // dB/m per GHz
    double r_normal = 0.0;      // Ohm/m, normal-state electrode resistance

    // Optional measured loss override: (frequency Hz, loss dB/m) pairs,
    // strictly increasing in frequency. Empty -> use the linear coefficient.
    std::vector<std::pair<double, double>> loss_table;
};

struct OpticalWaveguide {
    double n_g_opt = 0.0;     // optical group index
    double alpha_opt = 0.0;   // dB/m, optical power propagation loss
    double wavelength = 0.0;  // m, vacuum
};

struct ModulatorDesign {
    double arm_length = 0.0;  // m, modulation length per MZI arm
    double vpi_l = 0.0;       // V*m, voltage-length product
    double z_term = 0.0;      // Ohm, termination / design impedance
};

struct OperatingPoint {
    double temperature = 0.0;  // K
    double p_opt_in = 0.0;     // W, optical power entering the modulator
    double bias_phase = 0.0;   // rad, MZI static phase difference
    double v_pp = 0.0;         // V, peak-to-peak drive
    double bit_rate = 0.0;     // bit/s
    double f_mod = 0.0;        // Hz, microwave analog frequency
};

// Full device description as assembled from a config file.
struct Device {
    SuperconductingLine line;
    OpticalWaveguide waveguide;
    ModulatorDesign design;
};

inline void validate(const SuperconductingLine& line) {
    if (!(line.cap_per_len > 0)) throw std::invalid_argument("cap_per_len must be > 0");
    if (!(line.l_geo > 0)) throw std::invalid_argument("l_geo must be > 0");
    if (!(line.l_kin0 >= 0)) throw std::invalid_argument("l_kin0 must be >= 0");
    if (!(line.t_c > 0)) throw std::invalid_argument("t_c must be > 0");
    if (!(line.alpha_m_coef >= 0)) throw std::invalid_argument("alpha_m_coef must be >= 0");
    if (!(line.r_normal >= 0)) throw std::invalid_argument("r_normal must be >= 0");
    for (size_t i = 1; i < line.loss_table.size(); ++i)
        if (!(line.loss_table[i].first > line.loss_table[i - 1].first))
            throw std::invalid_argument("loss_table frequencies must be strictly increasing");
}

inline void validate(const OpticalWaveguide& wg) {
    if (!(wg.n_g_opt > 1)) throw std::invalid_argument("n_g_opt must be > 1");
    if (!(wg.alpha_opt >= 0)) throw std::invalid_argument("alpha_opt must be >= 0");
    if (!(wg.wavelength > 0)) throw std::invalid_argument("wavelength must be > 0");
}

inline void validate(const ModulatorDesign& d) {
    if (!(d.arm_length > 0)) throw std::invalid_argument("arm_length must be > 0");
    if (!(d.vpi_l > 0)) throw std::invalid_argument("vpi_l must be > 0");
    if (!(d.z_term > 0)) throw std::invalid_argument("z_term must be > 0");
}

inline void validate(const Device& dev) {
    validate(dev.line);
    validate(dev.waveguide);
    validate(dev.design);
}

inline void validate(const OperatingPoint& op) {
    if (!(op.temperature >= 0)) throw std::invalid_argument("temperature must be >= 0");
    if (!(op.p_opt_in >= 0)) throw std::invalid_argument("p_opt_in must be >= 0");
    if (!(op.v_pp >= 0)) throw std::invalid_argument("v_pp must be >= 0");
    if (!(op.bit_rate > 0)) throw std::invalid_argument("bit_rate must be > 0");
    if (!(op.f_mod >= 0)) throw std::invalid_argument("f_mod must be >= 0");
}

/// Two-fluid kinetic inductance L_k(T) = L_k(0) / sqrt(1 - (T/Tc)^4).
/// Only defined in the superconducting state.
inline double kinetic_inductance(const SuperconductingLine& line, double temperature) {
    if (temperature < 0) throw std::domain_error("temperature must be >= 0");
    if (temperature >= line.t_c)
        throw std::domain_error("normal state: kinetic inductance undefined");
    double r = temperature / line.t_c;
    return line.l_kin0 / std::sqrt(1.0 - r * r * r * r);
}

/// Effective microwave index n_m(T) = c0 * sqrt((L_geo + L_k(T)) * C).
/// The line is treated as dispersionless, so this is both the phase and the
/// group index of the microwave mode.
inline double microwave_index(const SuperconductingLine& line, double temperature) {
    double l_total = line.l_geo + kinetic_inductance(line, temperature);
    return c0 * std::sqrt(l_total * line.cap_per_len);
}

/// Characteristic impedance Z0(T) = sqrt((L_geo + L_k(T)) / C).
inline double char_impedance(const SuperconductingLine& line, double temperature) {
    double l_total = line.l_geo + kinetic_inductance(line, temperature);
    return std::sqrt(l_total / line.cap_per_len);
}

/// Microwave phase velocity c0 / n_m(T), m/s.
inline double microwave_velocity(const SuperconductingLine& line, double temperature) {
    return c0 / microwave_index(line, temperature);
}

/// Microwave power attenuation at frequency f, in dB/m. Uses the measured
/// table when present (linear interpolation, clamped at the ends), otherwise
/// the linear-in-frequency coefficient.
inline double microwave_loss(const SuperconductingLine& line, double f) {
    if (f < 0) throw std::domain_error("frequency must be >= 0");
    if (line.loss_table.empty())
        return line.alpha_m_coef * (f / 1e9);

    const auto& tab = line.loss_table;
    if (f <= tab.front().first) return tab.front().second;
    if (f >= tab.back().first) return tab.back().second;
    for (size_t i = 1; i < tab.size(); ++i) {
        if (f <= tab[i].first) {
            double t = (f - tab[i - 1].first) / (tab[i].first - tab[i - 1].first);
            return tab[i - 1].second + t * (tab[i].second - tab[i - 1].second);
        }
    }
    return tab.back().second;
}

/// Lumped RC cutoff 1/(2 pi R_tot C_tot) of the line driven in the normal
/// state. Order-of-magnitude estimate only: the electrodes are distributed,
/// not lumped.
inline double normal_rc_bandwidth(const SuperconductingLine& line, double total_length) {
    if (!(total_length > 0)) throw std::domain_error("total_length must be > 0");
    if (line.r_normal <= 0)
        throw std::domain_error("superconducting state: RC limit not applicable");
    double r_tot = line.r_normal * total_length;
    double c_tot = line.cap_per_len * total_length;
    return 1.0 / (2.0 * pi * r_tot * c_tot);
}

/// Drive-voltage/bandwidth trade-off of an ohmic traveling-wave design:
/// f_3dB = 20 GHz * (Vpi / 1 V)^2.
inline double ohmic_tradeoff_bandwidth(double v_pi) {
    if (!(v_pi > 0)) throw std::domain_error("v_pi must be > 0");
    return 20e9 * v_pi * v_pi;
}

} // namespace twmod
