#pragma once

namespace twmod {

// Exact SI values (2019 redefinition).
inline constexpr double c0     = 299792458.0;          // vacuum light speed, m/s
inline constexpr double planck = 6.62607015e-34;       // J*s
inline constexpr double hbar   = 1.054571817e-34;      // J*s (h / 2pi, rounded at 10 digits)
inline constexpr double pi     = 3.141592653589793;

// Attenuation coefficients act on power: P(z) = P0 * exp(-alpha * z).
// alpha[1/m] = ln(10)/10 * alpha[dB/m].
inline constexpr double alpha_per_m_from_db(double a_db_per_m) {
    return a_db_per_m * 0.23025850929940457;
}

inline constexpr double alpha_db_from_per_m(double a_per_m) {
    return a_per_m * 4.342944819032518;
}

} // namespace twmod
