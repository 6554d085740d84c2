#pragma once

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "twmod/device.hpp"
#include "twmod/units.hpp"

namespace twmod {

// Malformed input file (config or trace). what() carries a
// "path:line: message" diagnostic; the CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& file, int line, const std::string& msg)
        : std::runtime_error(line > 0 ? file + ":" + std::to_string(line) + ": " + msg
                                      : file + ": " + msg) {}
};

// One parsed right-hand side. Scalars keep their unquoted text in raw;
// arrays keep per-item text in items.
struct ConfigValue {
    std::string raw;
    std::vector<std::string> items;
    bool is_array = false;
    int line = 0;
};

// Sectioned key-value config:
//   [section]
//   key = "0.74 pF/cm"     # dimensioned values are quoted, with units
//   bare = 2.28            # dimensionless values are bare numbers
//   list = ["4.8 K", "5.6 K"]
class Config {
public:
    static Config parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError(path, 0, "cannot open config file");
        std::ostringstream buf;
        buf << in.rdbuf();
        return parse_string(buf.str(), path);
    }

    static Config parse_string(const std::string& text, const std::string& name) {
        Config cfg;
        cfg.name_ = name;
        std::istringstream in(text);
        std::string line;
        std::string section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            std::string s = strip_comment(line, name, lineno);
            s = trim(s);
            if (s.empty()) continue;
            if (s.front() == '[') {
                if (s.back() != ']' || s.size() < 3)
                    throw ConfigError(name, lineno, "malformed section header '" + s + "'");
                section = trim(s.substr(1, s.size() - 2));
                if (section.empty())
                    throw ConfigError(name, lineno, "empty section name");
                cfg.section_lines_[section] = lineno;
                cfg.sections_[section];
                continue;
            }
            size_t eq = s.find('=');
            if (eq == std::string::npos)
                throw ConfigError(name, lineno, "expected 'key = value', got '" + s + "'");
            if (section.empty())
                throw ConfigError(name, lineno, "key outside of any [section]");
            std::string key = trim(s.substr(0, eq));
            std::string val = trim(s.substr(eq + 1));
            if (key.empty()) throw ConfigError(name, lineno, "empty key name");
            if (val.empty())
                throw ConfigError(name, lineno, "key '" + key + "' has no value");
            auto& sect = cfg.sections_[section];
            if (sect.count(key))
                throw ConfigError(name, lineno, "duplicate key '" + key + "' in [" + section + "]");
            sect[key] = parse_value(val, name, lineno);
        }
        return cfg;
    }

    const std::string& name() const { return name_; }

    bool has_section(const std::string& section) const { return sections_.count(section) > 0; }

    bool has(const std::string& section, const std::string& key) const {
        auto it = sections_.find(section);
        return it != sections_.end() && it->second.count(key) > 0;
    }

    const ConfigValue& at(const std::string& section, const std::string& key) const {
        auto it = sections_.find(section);
        if (it == sections_.end())
            throw ConfigError(name_, 0, "missing section [" + section + "]");
        auto kt = it->second.find(key);
        if (kt == it->second.end())
            throw ConfigError(name_, section_lines_.at(section),
                              "missing key '" + key + "' in [" + section + "]");
        return kt->second;
    }

    /// Dimensioned scalar ("0.74 pF/cm") in SI base units.
    double get_si(const std::string& section, const std::string& key, Dim dim) const {
        const ConfigValue& v = scalar(section, key);
        return convert(v, key, dim);
    }

    double get_si_or(const std::string& section, const std::string& key, Dim dim,
                     double fallback) const {
        return has(section, key) ? get_si(section, key, dim) : fallback;
    }

    /// Bare dimensionless number.
    double get_number(const std::string& section, const std::string& key) const {
        return get_si(section, key, Dim::dimensionless);
    }

    double get_number_or(const std::string& section, const std::string& key,
                         double fallback) const {
        return has(section, key) ? get_number(section, key) : fallback;
    }

    long get_int(const std::string& section, const std::string& key) const {
        const ConfigValue& v = scalar(section, key);
        double d = convert(v, key, Dim::dimensionless);
        long n = static_cast<long>(d);
        if (static_cast<double>(n) != d)
            throw ConfigError(name_, v.line, "key '" + key + "' must be an integer");
        return n;
    }

    long get_int_or(const std::string& section, const std::string& key, long fallback) const {
        return has(section, key) ? get_int(section, key) : fallback;
    }

    std::string get_string(const std::string& section, const std::string& key) const {
        return scalar(section, key).raw;
    }

    std::string get_string_or(const std::string& section, const std::string& key,
                              const std::string& fallback) const {
        return has(section, key) ? get_string(section, key) : fallback;
    }

    bool get_bool_or(const std::string& section, const std::string& key, bool fallback) const {
        if (!has(section, key)) return fallback;
        const ConfigValue& v = scalar(section, key);
        if (v.raw == "true") return true;
        if (v.raw == "false") return false;
        throw ConfigError(name_, v.line, "key '" + key + "' must be true or false");
    }

    /// Array of dimensioned scalars, each converted to SI.
    std::vector<double> get_si_list(const std::string& section, const std::string& key,
                                    Dim dim) const {
        const ConfigValue& v = at(section, key);
        if (!v.is_array)
            throw ConfigError(name_, v.line, "key '" + key + "' must be an array");
        std::vector<double> out;
        out.reserve(v.items.size());
        for (const auto& item : v.items) {
            try {
                out.push_back(to_si(parse_quantity(item), dim));
            } catch (const std::invalid_argument& e) {
                throw ConfigError(name_, v.line, "key '" + key + "': " + e.what());
            }
        }
        return out;
    }

    std::vector<std::string> get_string_list(const std::string& section,
                                             const std::string& key) const {
        const ConfigValue& v = at(section, key);
        if (!v.is_array)
            throw ConfigError(name_, v.line, "key '" + key + "' must be an array");
        return v.items;
    }

private:
    const ConfigValue& scalar(const std::string& section, const std::string& key) const {
        const ConfigValue& v = at(section, key);
        if (v.is_array)
            throw ConfigError(name_, v.line, "key '" + key + "' must be a scalar, not an array");
        return v;
    }

    double convert(const ConfigValue& v, const std::string& key, Dim dim) const {
        try {
            return to_si(parse_quantity(v.raw), dim);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(name_, v.line, "key '" + key + "': " + e.what());
        }
    }

    static std::string trim(std::string_view s) {
        size_t b = s.find_first_not_of(" \t\r");
        if (b == std::string_view::npos) return {};
        size_t e = s.find_last_not_of(" \t\r");
        return std::string(s.substr(b, e - b + 1));
    }

    static std::string strip_comment(const std::string& line, const std::string& name,
                                     int lineno) {
        bool quoted = false;
        for (size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') quoted = !quoted;
            else if (line[i] == '#' && !quoted) return line.substr(0, i);
        }
        if (quoted) throw ConfigError(name, lineno, "unterminated quote");
        return line;
    }

    static ConfigValue parse_value(const std::string& val, const std::string& name, int lineno) {
        ConfigValue v;
        v.line = lineno;
        if (val.front() == '[') {
            if (val.back() != ']')
                throw ConfigError(name, lineno, "unterminated array value");
            v.is_array = true;
            std::string inner = val.substr(1, val.size() - 2);
            size_t pos = 0;
            while (pos < inner.size()) {
                size_t b = inner.find_first_not_of(" \t", pos);
                if (b == std::string::npos) break;
                std::string item;
                if (inner[b] == '"') {
                    size_t e = inner.find('"', b + 1);
                    if (e == std::string::npos)
                        throw ConfigError(name, lineno, "unterminated quote in array");
                    item = inner.substr(b + 1, e - b - 1);
                    pos = inner.find_first_not_of(" \t", e + 1);
                } else {
                    size_t e = inner.find(',', b);
                    item = trim(inner.substr(b, e == std::string::npos ? e : e - b));
                    pos = e;
                }
                if (pos != std::string::npos && pos < inner.size()) {
                    if (inner[pos] != ',')
                        throw ConfigError(name, lineno, "expected ',' between array items");
                    ++pos;
                }
                if (item.empty())
                    throw ConfigError(name, lineno, "empty array item");
                v.items.push_back(item);
            }
            return v;
        }
        if (val.front() == '"') {
            if (val.size() < 2 || val.back() != '"')
                throw ConfigError(name, lineno, "unterminated quoted value");
            v.raw = val.substr(1, val.size() - 2);
            return v;
        }
        v.raw = val;
        return v;
    }

    std::string name_;
    std::map<std::string, std::map<std::string, ConfigValue>> sections_;
    std::map<std::string, int> section_lines_;
};

/// Assemble and validate the device description from [line], [waveguide]
/// and [design].
inline Device device_from_config(const Config& cfg) {
    Device dev;
    dev.line.cap_per_len = cfg.get_si("line", "cap_per_len", Dim::cap_per_len);
    dev.line.l_geo = cfg.get_si("line", "l_geo", Dim::ind_per_len);
    dev.line.l_kin0 = cfg.get_si("line", "l_kin0", Dim::ind_per_len);
    dev.line.t_c = cfg.get_si("line", "t_c", Dim::temperature);
    dev.line.alpha_m_coef = cfg.get_si_or("line", "alpha_m_coef", Dim::loss_slope, 0.0);
    dev.line.r_normal = cfg.get_si_or("line", "r_normal", Dim::res_per_len, 0.0);
    if (cfg.has("line", "loss_table")) {
        for (const auto& item : cfg.get_string_list("line", "loss_table")) {
            size_t comma = item.find(',');
            if (comma == std::string::npos)
                throw ConfigError(cfg.name(), cfg.at("line", "loss_table").line,
                                  "loss_table items must be \"<freq>, <loss>\" pairs");
            try {
                double f = parse_si(item.substr(0, comma), Dim::frequency);
                double a = parse_si(item.substr(comma + 1), Dim::loss);
                dev.line.loss_table.emplace_back(f, a);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(cfg.name(), cfg.at("line", "loss_table").line,
                                  std::string("loss_table: ") + e.what());
            }
        }
    }

    dev.waveguide.n_g_opt = cfg.get_number("waveguide", "n_g_opt");
    dev.waveguide.alpha_opt = cfg.get_si("waveguide", "alpha_opt", Dim::loss);
    dev.waveguide.wavelength = cfg.get_si("waveguide", "wavelength", Dim::length);

    dev.design.arm_length = cfg.get_si("design", "arm_length", Dim::length);
    dev.design.vpi_l = cfg.get_si("design", "vpi_l", Dim::voltage_length);
    dev.design.z_term = cfg.get_si("design", "z_term", Dim::resistance);

    try {
        validate(dev);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(cfg.name(), 0, e.what());
    }
    return dev;
}

/// Operating point from [operating]; temperature is required, the rest
/// default to quadrature bias, zero drive, 1 Gbps and 10 GHz.
inline OperatingPoint operating_from_config(const Config& cfg) {
    OperatingPoint op;
    op.temperature = cfg.get_si("operating", "temperature", Dim::temperature);
    op.p_opt_in = cfg.get_si_or("operating", "p_opt_in", Dim::power, 0.0);
    op.bias_phase = cfg.get_si_or("operating", "bias_phase", Dim::angle, pi / 2.0);
    op.v_pp = cfg.get_si_or("operating", "v_pp", Dim::voltage, 0.0);
    op.bit_rate = cfg.get_si_or("operating", "bit_rate", Dim::bit_rate, 1e9);
    op.f_mod = cfg.get_si_or("operating", "f_mod", Dim::frequency, 10e9);
    try {
        validate(op);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(cfg.name(), 0, e.what());
    }
    return op;
}

// Two-column numeric trace with a header row naming the columns.
struct Trace {
    std::string x_name, y_name;
    std::vector<std::pair<double, double>> rows;
};

/// Read a two-column CSV trace (headers required, '#' comments allowed).
inline Trace read_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, 0, "cannot open trace file");
    Trace tr;
    std::string line;
    int lineno = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        size_t b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        size_t e = line.find_last_not_of(" \t\r");
        line = line.substr(b, e - b + 1);
        size_t comma = line.find(',');
        if (comma == std::string::npos)
            throw ConfigError(path, lineno, "expected two comma-separated columns");
        auto cell = [](std::string s) {
            size_t cb = s.find_first_not_of(" \t");
            if (cb == std::string::npos) return std::string();
            size_t ce = s.find_last_not_of(" \t");
            return s.substr(cb, ce - cb + 1);
        };
        std::string c1 = cell(line.substr(0, comma)), c2 = cell(line.substr(comma + 1));
        if (!saw_header) {
            char* endp = nullptr;
            std::strtod(c1.c_str(), &endp);
            if (endp == c1.c_str()) {
                tr.x_name = c1;
                tr.y_name = c2;
                saw_header = true;
                continue;
            }
            throw ConfigError(path, lineno, "trace must start with a header row naming columns");
        }
        char* e1 = nullptr;
        char* e2 = nullptr;
        double x = std::strtod(c1.c_str(), &e1);
        double y = std::strtod(c2.c_str(), &e2);
        if (e1 == c1.c_str() || e2 == c2.c_str())
            throw ConfigError(path, lineno, "malformed numeric row");
        tr.rows.emplace_back(x, y);
    }
    if (!saw_header) throw ConfigError(path, 0, "empty trace file");
    return tr;
}

} // namespace twmod
