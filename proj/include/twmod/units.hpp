#pragma once

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>

namespace twmod {

// Physical dimension of a configuration value. Every dimensioned setting is
// written as a quoted "number unit" string; the unit must belong to the
// dimension the setting expects.
enum class Dim {
    length,
    cap_per_len,     // F/m
    ind_per_len,     // H/m
    temperature,     // K
    loss,            // dB/m (optical and microwave attenuation)
    loss_slope,      // dB/m/GHz (microwave loss per unit frequency)
    voltage_length,  // V*m
    resistance,      // Ohm
    res_per_len,     // Ohm/m
    voltage,         // V
    power,           // W
    frequency,       // Hz
    bit_rate,        // bit/s
    angle,           // rad
    energy,          // J
    dimensionless,
};

struct Quantity {
    double value = 0.0;
    std::string unit;  // empty for bare numbers
};

inline const char* dim_name(Dim d) {
    switch (d) {
        case Dim::length:          return "length";
        case Dim::cap_per_len:     return "capacitance per length";
        case Dim::ind_per_len:     return "inductance per length";
        case Dim::temperature:     return "temperature";
        case Dim::loss:            return "loss";
        case Dim::loss_slope:      return "loss slope";
        case Dim::voltage_length:  return "voltage*length";
        case Dim::resistance:      return "resistance";
        case Dim::res_per_len:     return "resistance per length";
        case Dim::voltage:         return "voltage";
        case Dim::power:           return "power";
        case Dim::frequency:       return "frequency";
        case Dim::bit_rate:        return "bit rate";
        case Dim::angle:           return "angle";
        case Dim::energy:          return "energy";
        case Dim::dimensionless:   return "dimensionless";
    }
    return "?";
}

namespace detail {

struct UnitEntry {
    const char* name;
    Dim dim;
    double factor;  // multiply by this to reach the SI base for the dimension
};

// Canonical bases: m, F/m, H/m, K, dB/m, dB/m/GHz, V*m, Ohm, Ohm/m, V, W,
// Hz, bit/s, rad, J.
inline constexpr UnitEntry unit_table[] = {
    {"m", Dim::length, 1.0},
    {"cm", Dim::length, 1e-2},
    {"mm", Dim::length, 1e-3},
    {"um", Dim::length, 1e-6},
    {"nm", Dim::length, 1e-9},

    {"F/m", Dim::cap_per_len, 1.0},
    {"pF/m", Dim::cap_per_len, 1e-12},
    {"pF/cm", Dim::cap_per_len, 1e-10},
    {"pF/mm", Dim::cap_per_len, 1e-9},
    {"fF/um", Dim::cap_per_len, 1e-9},
    {"nF/m", Dim::cap_per_len, 1e-9},

    {"H/m", Dim::ind_per_len, 1.0},
    {"nH/m", Dim::ind_per_len, 1e-9},
    {"nH/cm", Dim::ind_per_len, 1e-7},
    {"nH/mm", Dim::ind_per_len, 1e-6},
    {"uH/m", Dim::ind_per_len, 1e-6},
    {"pH/um", Dim::ind_per_len, 1e-6},

    {"K", Dim::temperature, 1.0},
    {"mK", Dim::temperature, 1e-3},

    {"dB/m", Dim::loss, 1.0},
    {"dB/cm", Dim::loss, 100.0},
    {"dB/mm", Dim::loss, 1000.0},
    {"dB/km", Dim::loss, 1e-3},

    {"dB/m/GHz", Dim::loss_slope, 1.0},
    {"dB/cm/GHz", Dim::loss_slope, 100.0},

    {"V*m", Dim::voltage_length, 1.0},
    {"V*cm", Dim::voltage_length, 1e-2},
    {"V*mm", Dim::voltage_length, 1e-3},

    {"Ohm", Dim::resistance, 1.0},
    {"ohm", Dim::resistance, 1.0},
    {"kOhm", Dim::resistance, 1e3},
    {"mOhm", Dim::resistance, 1e-3},

    {"Ohm/m", Dim::res_per_len, 1.0},
    {"Ohm/cm", Dim::res_per_len, 100.0},
    {"ohm/m", Dim::res_per_len, 1.0},
    {"mOhm/m", Dim::res_per_len, 1e-3},
    {"kOhm/m", Dim::res_per_len, 1e3},

    {"V", Dim::voltage, 1.0},
    {"mV", Dim::voltage, 1e-3},
    {"uV", Dim::voltage, 1e-6},
    {"kV", Dim::voltage, 1e3},

    {"W", Dim::power, 1.0},
    {"mW", Dim::power, 1e-3},
    {"uW", Dim::power, 1e-6},
    {"nW", Dim::power, 1e-9},

    {"Hz", Dim::frequency, 1.0},
    {"kHz", Dim::frequency, 1e3},
    {"MHz", Dim::frequency, 1e6},
    {"GHz", Dim::frequency, 1e9},
    {"THz", Dim::frequency, 1e12},

    {"bit/s", Dim::bit_rate, 1.0},
    {"bps", Dim::bit_rate, 1.0},
    {"kbps", Dim::bit_rate, 1e3},
    {"Mbps", Dim::bit_rate, 1e6},
    {"Gbps", Dim::bit_rate, 1e9},
    {"Gbit/s", Dim::bit_rate, 1e9},

    {"rad", Dim::angle, 1.0},
    {"mrad", Dim::angle, 1e-3},
    {"deg", Dim::angle, 0.017453292519943295},

    {"J", Dim::energy, 1.0},
    {"pJ", Dim::energy, 1e-12},
    {"fJ", Dim::energy, 1e-15},
    {"aJ", Dim::energy, 1e-18},
};

} // namespace detail

inline double dbm_to_watts(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w / 1e-3); }

/// Split "0.74 pF/cm" (or a bare number) into value and unit token.
inline Quantity parse_quantity(std::string_view text) {
    size_t begin = text.find_first_not_of(" \t");
    size_t end = text.find_last_not_of(" \t");
    if (begin == std::string_view::npos)
        throw std::invalid_argument("empty quantity");
    text = text.substr(begin, end - begin + 1);

    std::string s(text);
    char* num_end = nullptr;
    double v = std::strtod(s.c_str(), &num_end);
    if (num_end == s.c_str())
        throw std::invalid_argument("quantity '" + s + "' does not start with a number");

    std::string unit(num_end);
    size_t u = unit.find_first_not_of(" \t");
    unit = (u == std::string::npos) ? std::string{} : unit.substr(u);
    if (!unit.empty() && unit.find_first_of(" \t") != std::string::npos)
        throw std::invalid_argument("quantity '" + s + "' has a malformed unit token");
    return {v, unit};
}

/// Convert a parsed quantity to SI base units, checking the dimension.
/// dBm is accepted for power. Throws std::invalid_argument on mismatch.
inline double to_si(const Quantity& q, Dim dim) {
    if (q.unit.empty()) {
        if (dim == Dim::dimensionless) return q.value;
        throw std::invalid_argument(std::string("missing unit on a ") + dim_name(dim) +
                                    " value; write e.g. \"1.0 <unit>\"");
    }
    if (dim == Dim::dimensionless)
        throw std::invalid_argument("unexpected unit '" + q.unit + "' on a dimensionless value");
    if (q.unit == "dBm") {
        if (dim == Dim::power) return dbm_to_watts(q.value);
        throw std::invalid_argument(std::string("unit 'dBm' is not a ") + dim_name(dim));
    }
    for (const auto& e : detail::unit_table) {
        if (q.unit == e.name) {
            if (e.dim != dim)
                throw std::invalid_argument("unit '" + q.unit + "' is not a " + dim_name(dim));
            return q.value * e.factor;
        }
    }
    throw std::invalid_argument("unknown unit '" + q.unit + "'");
}

/// Parse and convert in one step.
inline double parse_si(std::string_view text, Dim dim) {
    return to_si(parse_quantity(text), dim);
}

} // namespace twmod
