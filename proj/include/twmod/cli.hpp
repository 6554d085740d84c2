#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "twmod/config.hpp"
#include "twmod/constants.hpp"
#include "twmod/device.hpp"
#include "twmod/eo_transfer.hpp"
#include "twmod/eye.hpp"
#include "twmod/fitting.hpp"
#include "twmod/plot.hpp"
#include "twmod/response.hpp"
#include "twmod/sweep.hpp"
#include "twmod/version.hpp"

namespace twmod {

namespace fs = std::filesystem;
using nlohmann::json;

struct CliOptions {
    std::string config_path;
    std::string out_dir = ".";
    std::string format = "both";  // csv | json | both
    std::optional<std::uint64_t> seed;
    bool quiet = false;
    bool plot = false;
};

// Provenance record for one command invocation. Its hash is stamped into
// every file the run writes, so any artifact can be traced to the exact
// resolved parameters that produced it.
struct RunManifest {
    std::string command;
    std::string config_path;
    json params = json::object();   // resolved parameter snapshot
    std::vector<std::string> outputs;
    std::uint64_t seed = 0;
    std::string toolkit_version = version;

    std::uint64_t hash() const {
        json j = base_json();
        return fnv1a64(j.dump());
    }

    std::string hash_hex() const {
        char buf[24];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
        return buf;
    }

    json to_json() const {
        json j = base_json();
        j["manifest_hash"] = hash_hex();
        return j;
    }

private:
    json base_json() const {
        json j;
        j["schema"] = json_schema;
        j["command"] = command;
        j["config"] = config_path;
        j["params"] = params;
        j["outputs"] = outputs;
        j["seed"] = seed;
        j["toolkit_version"] = toolkit_version;
        return j;
    }
};

namespace detail {

// Write-then-rename file sink: the final path appears only on commit, so a
// failed run never leaves a partial file behind.
class AtomicFile {
public:
    explicit AtomicFile(const fs::path& path)
        : final_(path), tmp_(path.string() + ".tmp"), out_(tmp_, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot open '" + tmp_.string() + "' for writing");
    }

    ~AtomicFile() {
        if (out_.is_open()) {
            out_.close();
            std::error_code ec;
            fs::remove(tmp_, ec);
        }
    }

    std::ofstream& stream() { return out_; }

    void commit() {
        out_.close();
        if (out_.fail())
            throw std::runtime_error("write to '" + tmp_.string() + "' failed");
        fs::rename(tmp_, final_);
    }

private:
    fs::path final_, tmp_;
    std::ofstream out_;
};

inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline json device_json(const Device& d) {
    json j;
    j["line"] = {{"cap_per_len_f_per_m", d.line.cap_per_len},
                 {"l_geo_h_per_m", d.line.l_geo},
                 {"l_kin0_h_per_m", d.line.l_kin0},
                 {"t_c_k", d.line.t_c},
                 {"alpha_m_coef_db_per_m_per_ghz", d.line.alpha_m_coef},
                 {"r_normal_ohm_per_m", d.line.r_normal}};
    if (!d.line.loss_table.empty()) {
        json tab = json::array();
        for (const auto& [f, a] : d.line.loss_table) tab.push_back({{"freq_hz", f}, {"loss_db_per_m", a}});
        j["line"]["loss_table"] = tab;
    }
    j["waveguide"] = {{"n_g_opt", d.waveguide.n_g_opt},
                      {"alpha_opt_db_per_m", d.waveguide.alpha_opt},
                      {"wavelength_m", d.waveguide.wavelength}};
    j["design"] = {{"arm_length_m", d.design.arm_length},
                   {"vpi_l_v_m", d.design.vpi_l},
                   {"z_term_ohm", d.design.z_term}};
    return j;
}

inline json operating_json(const OperatingPoint& op) {
    return {{"temperature_k", op.temperature}, {"p_opt_in_w", op.p_opt_in},
            {"bias_phase_rad", op.bias_phase}, {"v_pp_v", op.v_pp},
            {"bit_rate_bit_per_s", op.bit_rate}, {"f_mod_hz", op.f_mod}};
}

inline std::vector<double> make_grid(double start, double stop, long n, const std::string& scale) {
    if (n < 1) throw std::invalid_argument("grid needs at least 1 point");
    if (n == 1) return {start};
    if (!(stop > start)) throw std::invalid_argument("grid stop must exceed grid start");
    std::vector<double> g;
    g.reserve(static_cast<size_t>(n));
    if (scale == "log") {
        if (!(start > 0)) throw std::invalid_argument("log grid needs start > 0");
        double a = std::log10(start), b = std::log10(stop);
        for (long i = 0; i < n; ++i) g.push_back(std::pow(10.0, a + (b - a) * i / (n - 1)));
    } else if (scale == "lin") {
        for (long i = 0; i < n; ++i) g.push_back(start + (stop - start) * i / (n - 1));
    } else {
        throw std::invalid_argument("grid scale must be 'lin' or 'log'");
    }
    return g;
}

inline void write_json_file(const fs::path& path, const json& j) {
    AtomicFile f(path);
    f.stream() << j.dump(2) << '\n';
    f.commit();
}

inline void write_svg_file(const fs::path& path, const std::string& svg,
                           const std::string& hash_hex) {
    AtomicFile f(path);
    f.stream() << "<!-- manifest_hash=" << hash_hex << " -->\n" << svg;
    f.commit();
}

inline void verify_outputs(const fs::path& dir, const std::vector<std::string>& names) {
    for (const auto& n : names) {
        fs::path p = dir / n;
        if (!fs::exists(p) || fs::file_size(p) == 0)
            throw std::runtime_error("output '" + p.string() + "' missing or empty");
    }
}

inline std::string resolve_trace_path(const std::string& trace, const std::string& config_path) {
    fs::path p(trace);
    if (p.is_absolute()) return p.string();
    return (fs::path(config_path).parent_path() / p).string();
}

struct Emit {
    bool csv, js;
};

inline Emit emission(const CliOptions& opt) {
    return {opt.format != "json", opt.format != "csv"};
}

} // namespace detail

/// EO response curves, one CSV per requested temperature, plus a JSON
/// summary of 3 dB bandwidths and an optional overlay plot.
inline int cmd_response(const CliOptions& opt) {
    Config cfg = Config::parse_file(opt.config_path);
    Device dev = device_from_config(cfg);
    OperatingPoint op = operating_from_config(cfg);

    std::vector<double> temps = cfg.has("response", "temperatures")
                                    ? cfg.get_si_list("response", "temperatures", Dim::temperature)
                                    : std::vector<double>{op.temperature};
    double f_start = cfg.get_si_or("response", "f_start", Dim::frequency, 0.1e9);
    double f_stop = cfg.get_si_or("response", "f_stop", Dim::frequency, 40e9);
    long n_points = cfg.get_int_or("response", "n_points", 1597);
    std::string scale = cfg.get_string_or("response", "scale", "lin");
    auto grid = detail::make_grid(f_start, f_stop, n_points, scale);

    auto em = detail::emission(opt);
    fs::create_directories(opt.out_dir);

    RunManifest man;
    man.command = "response";
    man.config_path = opt.config_path;
    man.params["device"] = detail::device_json(dev);
    man.params["operating"] = detail::operating_json(op);
    man.params["temperatures_k"] = temps;
    man.params["f_start_hz"] = f_start;
    man.params["f_stop_hz"] = f_stop;
    man.params["n_points"] = n_points;
    man.params["scale"] = scale;

    std::vector<std::string> csv_names;
    for (double t : temps) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "response_T%gK.csv", t);
        csv_names.emplace_back(buf);
        if (em.csv) man.outputs.push_back(buf);
    }
    if (em.js) man.outputs.push_back("response_summary.json");
    if (opt.plot) man.outputs.push_back("response.svg");
    man.outputs.push_back("response_manifest.json");
    std::string hash = man.hash_hex();

    json summary;
    summary["schema"] = json_schema;
    summary["manifest_hash"] = hash;
    summary["curves"] = json::array();
    std::vector<PlotSeries> series;
    for (size_t i = 0; i < temps.size(); ++i) {
        EOResponseCurve curve = eo_response(dev, temps[i], grid);
        if (em.csv) {
            detail::AtomicFile f(fs::path(opt.out_dir) / csv_names[i]);
            f.stream() << "# manifest_hash=" << hash << "\n"
                       << "freq_hz,response_db,alpha_m_db_per_m\n";
            for (size_t k = 0; k < curve.freqs.size(); ++k)
                f.stream() << detail::num(curve.freqs[k]) << ',' << detail::num(curve.response_db[k])
                           << ',' << detail::num(curve.alpha_m_curve[k]) << '\n';
            f.commit();
        }
        auto bw = bandwidth_3db(curve);
        json entry;
        entry["temperature_k"] = temps[i];
        entry["n_m"] = microwave_index(dev.line, temps[i]);
        entry["delta_n"] = curve.delta_n;
        entry["csv"] = csv_names[i];
        entry["bandwidth_3db_hz"] = bw ? json(*bw) : json("beyond grid");
        summary["curves"].push_back(entry);
        if (opt.plot) {
            char label[48];
            std::snprintf(label, sizeof label, "T = %g K", temps[i]);
            series.push_back({label, curve.freqs, curve.response_db});
        }
        if (!opt.quiet) {
            std::cout << "response: T = " << temps[i] << " K, delta_n = " << curve.delta_n
                      << ", 3 dB bandwidth = "
                      << (bw ? detail::num(*bw) + " Hz" : std::string("beyond grid")) << '\n';
        }
    }
    if (em.js)
        detail::write_json_file(fs::path(opt.out_dir) / "response_summary.json", summary);
    if (opt.plot)
        detail::write_svg_file(fs::path(opt.out_dir) / "response.svg",
                               render_line_chart("EO response", "frequency (Hz)", "response (dB)",
                                                 series, true, false),
                               hash);
    detail::write_json_file(fs::path(opt.out_dir) / "response_manifest.json", man.to_json());
    detail::verify_outputs(opt.out_dir, man.outputs);
    return 0;
}

/// Transduction efficiency at the design point plus eta(L) curves for a
/// family of optical losses, with per-family peaks annotated.
inline int cmd_efficiency(const CliOptions& opt) {
    Config cfg = Config::parse_file(opt.config_path);
    Device dev = device_from_config(cfg);
    OperatingPoint op = operating_from_config(cfg);

    std::vector<double> family = cfg.has("efficiency", "alpha_opt_family")
                                     ? cfg.get_si_list("efficiency", "alpha_opt_family", Dim::loss)
                                     : std::vector<double>{dev.waveguide.alpha_opt};
    double g_start = cfg.get_si_or("efficiency", "grid_start", Dim::length, 0.01);
    double g_stop = cfg.get_si_or("efficiency", "grid_stop", Dim::length, 10.0);
    long g_points = cfg.get_int_or("efficiency", "grid_points", 301);
    std::string g_scale = cfg.get_string_or("efficiency", "grid_scale", "log");

    SweepSpec spec;
    spec.swept_parameter = "arm_length";
    spec.unit = "m";
    spec.grid = detail::make_grid(g_start, g_stop, g_points, g_scale);
    spec.device = dev;
    spec.op = op;
    spec.outputs = {"eta"};
    spec.family = family;

    auto em = detail::emission(opt);
    fs::create_directories(opt.out_dir);

    RunManifest man;
    man.command = "efficiency";
    man.config_path = opt.config_path;
    man.params["device"] = detail::device_json(dev);
    man.params["operating"] = detail::operating_json(op);
    man.params["alpha_opt_family_db_per_m"] = family;
    man.params["grid_points"] = g_points;
    man.params["grid_start_m"] = g_start;
    man.params["grid_stop_m"] = g_stop;
    man.params["grid_scale"] = g_scale;
    if (em.csv) man.outputs.push_back("efficiency_vs_length.csv");
    if (em.js) man.outputs.push_back("efficiency_summary.json");
    if (opt.plot) man.outputs.push_back("efficiency.svg");
    man.outputs.push_back("efficiency_manifest.json");
    std::string hash = man.hash_hex();

    std::vector<EfficiencyPeak> peaks;
    std::vector<PlotSeries> series(family.size());
    size_t fam_idx = 0, row_in_fam = 0;
    auto collect = [&](const std::vector<double>& row) {
        if (opt.plot) {
            series[fam_idx].x.push_back(row[1]);
            series[fam_idx].y.push_back(row[2]);
        }
        if (++row_in_fam == spec.grid.size()) {
            row_in_fam = 0;
            ++fam_idx;
        }
    };
    if (em.csv) {
        detail::AtomicFile f(fs::path(opt.out_dir) / "efficiency_vs_length.csv");
        char spec_hex[24];
        std::snprintf(spec_hex, sizeof spec_hex, "%016llx",
                      static_cast<unsigned long long>(spec_hash(spec)));
        f.stream() << "# manifest_hash=" << hash << "\n# spec_hash=" << spec_hex << "\n"
                   << efficiency_columns << "\n";
        peaks = efficiency_vs_length(spec, [&](const std::vector<double>& row) {
            f.stream() << detail::num(row[0]) << ',' << detail::num(row[1]) << ','
                       << detail::num(row[2]) << '\n';
            collect(row);
        });
        f.commit();
    } else {
        peaks = efficiency_vs_length(spec, collect);
    }

    EfficiencyResult point =
        make_efficiency_result(op.p_opt_in, dev.design.vpi_l, dev.waveguide.alpha_opt,
                               dev.design.arm_length, dev.design.z_term, op.f_mod,
                               dev.waveguide.wavelength);
    if (point.clipped)
        std::cerr << "warning: efficiency clipped to 1; inputs exceed the linear model's range\n";

    json summary;
    summary["schema"] = json_schema;
    summary["manifest_hash"] = hash;
    summary["design_point"] = {{"arm_length_m", dev.design.arm_length},
                               {"eta", point.eta},
                               {"eta_raw", point.eta_raw},
                               {"clipped", point.clipped},
                               {"vpi_effective_v", point.vpi_effective},
                               {"optimal_length_m", point.optimal_length}};
    summary["peaks"] = json::array();
    for (const auto& p : peaks) {
        summary["peaks"].push_back({{"alpha_opt_db_per_m", p.alpha_opt},
                                    {"peak_length_m", p.length},
                                    {"peak_eta", p.eta},
                                    {"optimal_length_m", optimal_length(p.alpha_opt)}});
        if (!opt.quiet)
            std::cout << "efficiency: alpha_opt = " << p.alpha_opt << " dB/m, peak eta = "
                      << detail::num(p.eta) << " at L = " << detail::num(p.length) << " m\n";
    }
    if (em.js)
        detail::write_json_file(fs::path(opt.out_dir) / "efficiency_summary.json", summary);
    if (opt.plot) {
        for (size_t i = 0; i < family.size(); ++i) {
            char label[48];
            std::snprintf(label, sizeof label, "%g dB/m", family[i]);
            series[i].label = label;
        }
        detail::write_svg_file(fs::path(opt.out_dir) / "efficiency.svg",
                               render_line_chart("Transduction efficiency vs length", "length (m)",
                                                 "eta", series, true, true),
                               hash);
    }
    detail::write_json_file(fs::path(opt.out_dir) / "efficiency_manifest.json", man.to_json());
    detail::verify_outputs(opt.out_dir, man.outputs);
    return 0;
}

/// Shot-noise eye simulation: analytic and Monte Carlo SNR/BER, optimal
/// bias, drive energy per bit, optional per-bit sample dump.
inline int cmd_eye(const CliOptions& opt) {
    Config cfg = Config::parse_file(opt.config_path);
    Device dev = device_from_config(cfg);
    OperatingPoint op = operating_from_config(cfg);

    long n_bits = cfg.get_int_or("eye", "n_bits", 100000);
    double p_peak = cfg.get_si_or("eye", "p_peak", Dim::power, op.p_opt_in);
    double penalty_db = cfg.get_number_or("eye", "snr_penalty_db", 0.0);
    double bias_offset = cfg.get_si_or("eye", "bias_offset", Dim::angle, 0.0);
    bool optimize = cfg.get_bool_or("eye", "optimize_bias", false);
    bool emit_samples = cfg.get_bool_or("eye", "emit_samples", false);

    std::uint64_t seed;
    if (opt.seed) {
        seed = *opt.seed;
    } else {
        std::random_device rd;
        seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
        std::cout << "seed = " << seed << '\n';
    }

    OperatingPoint run_op = op;
    run_op.bias_phase += bias_offset;
    double v_pi = vpi_from_length(dev.design);
    double wavelength = dev.waveguide.wavelength;

    json optimal = json::object();
    if (run_op.v_pp > 0) {
        auto [bias, snr] = optimal_bias(run_op, v_pi, p_peak, wavelength);
        optimal["bias_rad"] = bias;
        optimal["snr"] = snr;
        if (optimize) run_op.bias_phase = bias;
    }
    EyeResult analytic = analytic_snr(run_op, v_pi, p_peak, wavelength, penalty_db);
    EyeResult mc = monte_carlo_eye(run_op, v_pi, p_peak, static_cast<std::size_t>(n_bits), seed,
                                   wavelength, penalty_db);

    auto em = detail::emission(opt);
    fs::create_directories(opt.out_dir);

    RunManifest man;
    man.command = "eye";
    man.config_path = opt.config_path;
    man.seed = seed;
    man.params["device"] = detail::device_json(dev);
    man.params["operating"] = detail::operating_json(op);
    man.params["n_bits"] = n_bits;
    man.params["p_peak_w"] = p_peak;
    man.params["snr_penalty_db"] = penalty_db;
    man.params["bias_offset_rad"] = bias_offset;
    man.params["optimize_bias"] = optimize;
    man.params["bias_used_rad"] = run_op.bias_phase;
    if (em.js) man.outputs.push_back("eye_summary.json");
    if (em.csv && emit_samples) man.outputs.push_back("eye_samples.csv");
    man.outputs.push_back("eye_manifest.json");
    std::string hash = man.hash_hex();

    auto eye_json = [](const EyeResult& r) {
        return json{{"n1_mean", r.n1_mean},
                    {"n2_mean", r.n2_mean},
                    {"snr", r.snr},
                    {"snr_db_20log10", r.snr > 0 ? json(20.0 * std::log10(r.snr)) : json()},
                    {"snr_db_10log10", r.snr > 0 ? json(10.0 * std::log10(r.snr)) : json()},
                    {"ber", r.ber}};
    };
    json summary;
    summary["schema"] = json_schema;
    summary["manifest_hash"] = hash;
    summary["seed"] = seed;
    summary["n_bits"] = n_bits;
    summary["v_pi_v"] = v_pi;
    summary["p_peak_w"] = p_peak;
    summary["bias_used_rad"] = run_op.bias_phase;
    summary["analytic"] = eye_json(analytic);
    summary["monte_carlo"] = eye_json(mc);
    if (!optimal.empty()) summary["optimal_bias"] = optimal;
    summary["energy_per_bit_j"] =
        run_op.v_pp > 0 ? json(energy_per_bit(run_op.v_pp, dev.design.z_term, run_op.bit_rate))
                        : json(0.0);

    if (em.js) detail::write_json_file(fs::path(opt.out_dir) / "eye_summary.json", summary);
    if (em.csv && emit_samples) {
        detail::AtomicFile f(fs::path(opt.out_dir) / "eye_samples.csv");
        f.stream() << "# manifest_hash=" << hash << "\nbit_index,photons\n";
        for (size_t i = 0; i < mc.samples.size(); ++i)
            f.stream() << i << ',' << detail::num(mc.samples[i]) << '\n';
        f.commit();
    }
    detail::write_json_file(fs::path(opt.out_dir) / "eye_manifest.json", man.to_json());
    if (!opt.quiet)
        std::cout << "eye: analytic snr = " << detail::num(analytic.snr)
                  << ", monte carlo snr = " << detail::num(mc.snr)
                  << ", ber = " << detail::num(mc.ber) << '\n';
    detail::verify_outputs(opt.out_dir, man.outputs);
    return 0;
}

/// Run one of the three fitters on a CSV trace named in [fit] and emit the
/// estimates as JSON.
inline int cmd_fit(const CliOptions& opt) {
    Config cfg = Config::parse_file(opt.config_path);
    std::string kind = cfg.get_string("fit", "kind");
    std::string trace_rel = cfg.get_string("fit", "trace");
    std::string trace_path = detail::resolve_trace_path(trace_rel, opt.config_path);
    Trace trace = read_trace_csv(trace_path);

    FitResult fr;
    json extra = json::object();
    if (kind == "index_vs_temperature") {
        double t_c = cfg.has("fit", "t_c") ? cfg.get_si("fit", "t_c", Dim::temperature)
                                           : cfg.get_si("line", "t_c", Dim::temperature);
        fr = fit_index_vs_temperature(trace.rows, t_c);
        extra["t_c_k"] = t_c;
    } else if (kind == "loss_slope") {
        double line_length = cfg.get_si("fit", "line_length", Dim::length);
        int window = static_cast<int>(cfg.get_int_or("fit", "window", 21));
        fr = fit_loss_slope(trace.rows, line_length, window);
        extra["line_length_m"] = line_length;
        extra["window"] = window;
    } else if (kind == "optical_index") {
        Device dev = device_from_config(cfg);
        double temperature = cfg.has("fit", "temperature")
                                 ? cfg.get_si("fit", "temperature", Dim::temperature)
                                 : operating_from_config(cfg).temperature;
        double n_o_init = cfg.get_number_or("fit", "n_o_init", 2.25);
        fr = fit_optical_index(trace.rows, dev, temperature, n_o_init);
        extra["temperature_k"] = temperature;
        extra["n_o_init"] = n_o_init;
        extra["n_m"] = microwave_index(dev.line, temperature);
    } else {
        throw ConfigError(cfg.name(), cfg.at("fit", "kind").line,
                          "unknown fit kind '" + kind +
                              "'; expected index_vs_temperature, loss_slope or optical_index");
    }

    fs::create_directories(opt.out_dir);
    RunManifest man;
    man.command = "fit";
    man.config_path = opt.config_path;
    man.params["kind"] = kind;
    man.params["trace"] = trace_path;
    man.params["extra"] = extra;
    man.outputs.push_back("fit_result.json");
    man.outputs.push_back("fit_manifest.json");
    std::string hash = man.hash_hex();

    json out;
    out["schema"] = json_schema;
    out["manifest_hash"] = hash;
    out["kind"] = kind;
    out["trace"] = trace_path;
    out["converged"] = fr.converged;
    out["iterations"] = fr.iterations;
    out["residual_rms"] = fr.residual_rms;
    if (!fr.diagnostic.empty()) out["diagnostic"] = fr.diagnostic;
    json params = json::object(), stderrs = json::object();
    for (size_t i = 0; i < fr.params.size(); ++i) {
        params[fr.params[i].first] = fr.params[i].second;
        stderrs[fr.params[i].first] = std::sqrt(std::max(0.0, fr.covariance_diag[i]));
    }
    out["params"] = params;
    out["std_error"] = stderrs;
    for (auto& [k, v] : extra.items()) out[k] = v;

    detail::write_json_file(fs::path(opt.out_dir) / "fit_result.json", out);
    detail::write_json_file(fs::path(opt.out_dir) / "fit_manifest.json", man.to_json());
    if (!opt.quiet) {
        std::cout << "fit " << kind << ": converged = " << (fr.converged ? "true" : "false");
        for (const auto& [k, v] : fr.params) std::cout << ", " << k << " = " << detail::num(v);
        std::cout << '\n';
    }
    detail::verify_outputs(opt.out_dir, man.outputs);
    return 0;
}

/// Generic sweep driver: arm_length -> efficiency curves, delta_n -> EO
/// response family, v_pi -> ohmic trade-off boundary.
inline int cmd_sweep(const CliOptions& opt) {
    Config cfg = Config::parse_file(opt.config_path);
    std::string parameter = cfg.get_string("sweep", "parameter");

    SweepSpec spec;
    spec.swept_parameter = parameter;
    spec.device = device_from_config(cfg);
    spec.op = operating_from_config(cfg);

    Dim grid_dim;
    double def_start, def_stop;
    long def_points;
    std::string def_scale;
    if (parameter == "arm_length") {
        spec.unit = "m";
        grid_dim = Dim::length;
        def_start = 0.01; def_stop = 10.0; def_points = 301; def_scale = "log";
        spec.outputs = {"eta"};
    } else if (parameter == "delta_n") {
        spec.unit = "";
        grid_dim = Dim::dimensionless;
        def_start = 0.0; def_stop = 0.2; def_points = 5; def_scale = "lin";
        spec.outputs = {"response_db", "bandwidth_3db_hz"};
    } else if (parameter == "v_pi") {
        spec.unit = "V";
        grid_dim = Dim::voltage;
        def_start = 0.01; def_stop = 10.0; def_points = 301; def_scale = "log";
        spec.outputs = {"f_3db_hz"};
    } else {
        throw ConfigError(cfg.name(), cfg.at("sweep", "parameter").line,
                          "unknown swept parameter '" + parameter +
                              "'; expected arm_length, delta_n or v_pi");
    }

    if (cfg.has("sweep", "grid")) {
        spec.grid = cfg.get_si_list("sweep", "grid", grid_dim);
    } else {
        double start = cfg.get_si_or("sweep", "grid_start", grid_dim, def_start);
        double stop = cfg.get_si_or("sweep", "grid_stop", grid_dim, def_stop);
        long points = cfg.get_int_or("sweep", "grid_points", def_points);
        std::string scale = cfg.get_string_or("sweep", "grid_scale", def_scale);
        spec.grid = detail::make_grid(start, stop, points, scale);
    }

    if (parameter == "arm_length") {
        spec.family = cfg.has("sweep", "family")
                          ? cfg.get_si_list("sweep", "family", Dim::loss)
                          : std::vector<double>{spec.device.waveguide.alpha_opt};
    } else if (parameter == "delta_n") {
        spec.family = cfg.has("sweep", "family")
                          ? cfg.get_si_list("sweep", "family", Dim::loss_slope)
                          : std::vector<double>{spec.device.line.alpha_m_coef};
        if (cfg.has("sweep", "freq_start") || cfg.has("sweep", "freq_stop") ||
            cfg.has("sweep", "freq_points")) {
            double fa = cfg.get_si_or("sweep", "freq_start", Dim::frequency, 0.1e9);
            double fb = cfg.get_si_or("sweep", "freq_stop", Dim::frequency, 100e9);
            long fn = cfg.get_int_or("sweep", "freq_points", 601);
            std::string fsc = cfg.get_string_or("sweep", "freq_scale", "log");
            spec.freq_grid = detail::make_grid(fa, fb, fn, fsc);
        } else {
            spec.freq_grid = default_freq_grid();
        }
    }

    auto em = detail::emission(opt);
    fs::create_directories(opt.out_dir);

    std::string csv_name = "sweep_" + parameter + ".csv";
    RunManifest man;
    man.command = "sweep";
    man.config_path = opt.config_path;
    man.params["device"] = detail::device_json(spec.device);
    man.params["operating"] = detail::operating_json(spec.op);
    man.params["parameter"] = parameter;
    man.params["grid_size"] = spec.grid.size();
    man.params["family"] = spec.family;
    char spec_hex[24];
    std::snprintf(spec_hex, sizeof spec_hex, "%016llx",
                  static_cast<unsigned long long>(spec_hash(spec)));
    man.params["spec_hash"] = spec_hex;
    if (em.csv) man.outputs.push_back(csv_name);
    if (em.js) man.outputs.push_back("sweep_summary.json");
    man.outputs.push_back("sweep_manifest.json");
    std::string hash = man.hash_hex();

    json summary;
    summary["schema"] = json_schema;
    summary["manifest_hash"] = hash;
    summary["spec_hash"] = spec_hex;
    summary["parameter"] = parameter;

    std::optional<detail::AtomicFile> file;
    if (em.csv) file.emplace(fs::path(opt.out_dir) / csv_name);
    auto header = [&](const char* columns) {
        if (file)
            file->stream() << "# manifest_hash=" << hash << "\n# spec_hash=" << spec_hex << "\n"
                           << columns << "\n";
    };
    auto sink = [&](const std::vector<double>& row) {
        if (!file) return;
        auto& s = file->stream();
        for (size_t i = 0; i < row.size(); ++i)
            s << (i ? "," : "") << detail::num(row[i]);
        s << '\n';
    };

    if (parameter == "arm_length") {
        header(efficiency_columns);
        auto peaks = efficiency_vs_length(spec, sink);
        summary["peaks"] = json::array();
        for (const auto& p : peaks)
            summary["peaks"].push_back({{"alpha_opt_db_per_m", p.alpha_opt},
                                        {"peak_length_m", p.length},
                                        {"peak_eta", p.eta}});
    } else if (parameter == "delta_n") {
        header(response_columns);
        auto bws = response_vs_mismatch(spec, sink);
        summary["bandwidths"] = json::array();
        for (const auto& b : bws)
            summary["bandwidths"].push_back(
                {{"delta_n", b.delta_n},
                 {"alpha_m_coef_db_per_m_per_ghz", b.alpha_m_coef},
                 {"bandwidth_3db_hz", b.bandwidth_hz ? json(*b.bandwidth_hz) : json("beyond grid")}});
    } else {
        header(tradeoff_columns);
        tradeoff_overlay(spec.grid, sink);
        summary["rows"] = spec.grid.size();
    }
    if (file) file->commit();

    if (em.js) detail::write_json_file(fs::path(opt.out_dir) / "sweep_summary.json", summary);
    detail::write_json_file(fs::path(opt.out_dir) / "sweep_manifest.json", man.to_json());
    if (!opt.quiet) std::cout << "sweep " << parameter << ": " << spec.grid.size() << " grid points\n";
    detail::verify_outputs(opt.out_dir, man.outputs);
    return 0;
}

/// Ohmic bandwidth/drive trade-off boundary f_3dB = 20 GHz (Vpi/V)^2.
inline int cmd_tradeoff(const CliOptions& opt) {
    Config cfg = Config::parse_file(opt.config_path);
    std::vector<double> grid;
    if (cfg.has("tradeoff", "grid")) {
        grid = cfg.get_si_list("tradeoff", "grid", Dim::voltage);
    } else {
        double start = cfg.get_si_or("tradeoff", "grid_start", Dim::voltage, 0.01);
        double stop = cfg.get_si_or("tradeoff", "grid_stop", Dim::voltage, 10.0);
        long points = cfg.get_int_or("tradeoff", "grid_points", 401);
        std::string scale = cfg.get_string_or("tradeoff", "grid_scale", "log");
        grid = detail::make_grid(start, stop, points, scale);
    }

    auto em = detail::emission(opt);
    fs::create_directories(opt.out_dir);

    RunManifest man;
    man.command = "tradeoff";
    man.config_path = opt.config_path;
    man.params["grid_size"] = grid.size();
    man.params["grid_start_v"] = grid.front();
    man.params["grid_stop_v"] = grid.back();
    if (em.csv) man.outputs.push_back("tradeoff.csv");
    if (em.js) man.outputs.push_back("tradeoff_summary.json");
    if (opt.plot) man.outputs.push_back("tradeoff.svg");
    man.outputs.push_back("tradeoff_manifest.json");
    std::string hash = man.hash_hex();

    PlotSeries series{"f_3dB", {}, {}};
    std::optional<detail::AtomicFile> file;
    if (em.csv) {
        file.emplace(fs::path(opt.out_dir) / "tradeoff.csv");
        file->stream() << "# manifest_hash=" << hash << "\n" << tradeoff_columns << "\n";
    }
    tradeoff_overlay(grid, [&](const std::vector<double>& row) {
        if (file) file->stream() << detail::num(row[0]) << ',' << detail::num(row[1]) << '\n';
        if (opt.plot) {
            series.x.push_back(row[0]);
            series.y.push_back(row[1]);
        }
    });
    if (file) file->commit();

    json summary;
    summary["schema"] = json_schema;
    summary["manifest_hash"] = hash;
    summary["rows"] = grid.size();
    summary["f_3db_at_1v_hz"] = ohmic_tradeoff_bandwidth(1.0);
    if (em.js) detail::write_json_file(fs::path(opt.out_dir) / "tradeoff_summary.json", summary);
    if (opt.plot)
        detail::write_svg_file(fs::path(opt.out_dir) / "tradeoff.svg",
                               render_line_chart("Ohmic bandwidth trade-off", "Vpi (V)",
                                                 "f_3dB (Hz)", {series}, true, true),
                               hash);
    detail::write_json_file(fs::path(opt.out_dir) / "tradeoff_manifest.json", man.to_json());
    if (!opt.quiet)
        std::cout << "tradeoff: " << grid.size() << " grid points, f_3dB(1 V) = 20 GHz\n";
    detail::verify_outputs(opt.out_dir, man.outputs);
    return 0;
}

/// Dispatch a named subcommand, mapping malformed input to exit code 2 and
/// computation errors to exit code 1.
inline int run_command(const std::string& name, const CliOptions& opt) {
    try {
        if (name == "response") return cmd_response(opt);
        if (name == "efficiency") return cmd_efficiency(opt);
        if (name == "eye") return cmd_eye(opt);
        if (name == "fit") return cmd_fit(opt);
        if (name == "sweep") return cmd_sweep(opt);
        if (name == "tradeoff") return cmd_tradeoff(opt);
        std::cerr << "error: unknown command '" << name << "'\n";
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace twmod
