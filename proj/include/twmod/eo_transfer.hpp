#pragma once

#include <cmath>
#include <stdexcept>

#include "twmod/constants.hpp"
#include "twmod/device.hpp"

namespace twmod {

// Summary of a transduction-efficiency evaluation. eta is clamped to the
// [0, 1] physical range (the linearized model does not saturate on its own);
// eta_raw keeps the unclamped formula value and clipped records whether the
// clamp engaged.
struct EfficiencyResult {
    double eta = 0.0;             // out-of-chip power transduction efficiency
    double optimal_length = 0.0;  // m, argmax of eta(L) for the given loss
    double vpi_effective = 0.0;   // V, at the evaluated length
    double eta_raw = 0.0;
    bool clipped = false;
};

/// Half-wave voltage at the design length: Vpi = VpiL / L.
inline double vpi_from_length(const ModulatorDesign& design) {
    if (!(design.arm_length > 0)) throw std::domain_error("arm_length must be > 0");
    return design.vpi_l / design.arm_length;
}

/// Per-photon electro-optic coupling amplitude
///   g0 = pi * v_o * sqrt(hbar * Omega * v_m * Z0) / (sqrt(2) * VpiL),
/// with v_m and Z0 evaluated on the superconducting line at temperature T.
inline double g0_from_vpil(const ModulatorDesign& design, const OpticalWaveguide& wg,
                           const SuperconductingLine& line, double f_mod, double temperature) {
    if (!(f_mod > 0)) throw std::domain_error("f_mod must be > 0");
    double v_o = c0 / wg.n_g_opt;
    double v_m = microwave_velocity(line, temperature);
    double z0 = char_impedance(line, temperature);
    double omega_m = 2.0 * pi * f_mod;
    return pi * v_o * std::sqrt(hbar * omega_m * v_m * z0) / (std::sqrt(2.0) * design.vpi_l);
}

/// Short-length lossless transduction efficiency
///   eta = P_opt * (pi^2/2) * (Omega/omega) * Z0 / Vpi^2,
/// with Vpi taken at the design length and Z0 from the line at the operating
/// temperature.
inline double small_signal_efficiency(const OperatingPoint& op, const ModulatorDesign& design,
                                      const OpticalWaveguide& wg, const SuperconductingLine& line) {
    double v_pi = vpi_from_length(design);
    double z0 = char_impedance(line, op.temperature);
    double omega_m = 2.0 * pi * op.f_mod;
    double omega_o = 2.0 * pi * c0 / wg.wavelength;
    return op.p_opt_in * (pi * pi / 2.0) * (omega_m / omega_o) * z0 / (v_pi * v_pi);
}

/// Transduction efficiency as a function of modulation length, with optical
/// propagation loss included:
///   eta(L) = P_opt * (pi^2/2) * (Omega/omega) * Z0 / (VpiL)^2 * e^(-a_o L) * L^2,
/// a_o the power loss in 1/m. vpi_l in V*m, alpha_opt in dB/m.
inline double length_dependent_efficiency(double p_opt, double vpi_l, double alpha_opt, double length,
                                          double z0, double f_mod, double wavelength) {
    if (!(length > 0)) throw std::domain_error("length must be > 0");
    if (!(vpi_l > 0)) throw std::domain_error("vpi_l must be > 0");
    double a_o = alpha_per_m_from_db(alpha_opt);
    double omega_m = 2.0 * pi * f_mod;
    double omega_o = 2.0 * pi * c0 / wavelength;
    double prefactor = p_opt * (pi * pi / 2.0) * (omega_m / omega_o) * z0 / (vpi_l * vpi_l);
    return prefactor * std::exp(-a_o * length) * length * length;
}

/// Length maximizing eta(L) for a given optical loss: L* = 2 / a_o with a_o
/// in 1/m. alpha_opt in dB/m.
inline double optimal_length(double alpha_opt) {
    if (alpha_opt < 0) throw std::domain_error("alpha_opt must be >= 0");
    if (alpha_opt == 0.0)
        throw std::domain_error("no interior optimum: efficiency unbounded in L");
    return 2.0 / alpha_per_m_from_db(alpha_opt);
}

/// Microwave drive energy per bit into a matched load: (Vpp/2)^2 / Z0 / rate.
inline double energy_per_bit(double v_pp, double z0, double bit_rate) {
    if (!(z0 > 0)) throw std::domain_error("z0 must be > 0");
    if (!(bit_rate > 0)) throw std::domain_error("bit_rate must be > 0");
    double v_amp = v_pp / 2.0;
    return v_amp * v_amp / z0 / bit_rate;
}

/// Evaluate eta at the given length and package it with the optimum and the
/// effective half-wave voltage. Clamps eta into [0, 1].
inline EfficiencyResult make_efficiency_result(double p_opt, double vpi_l, double alpha_opt,
                                               double length, double z0, double f_mod,
                                               double wavelength) {
    EfficiencyResult r;
    r.eta_raw = length_dependent_efficiency(p_opt, vpi_l, alpha_opt, length, z0, f_mod, wavelength);
    r.clipped = r.eta_raw > 1.0;
    r.eta = r.clipped ? 1.0 : r.eta_raw;
    r.optimal_length = optimal_length(alpha_opt);
    r.vpi_effective = vpi_l / length;
    return r;
}

} // namespace twmod
