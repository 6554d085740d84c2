#include <CLI11.hpp>

#include "twmod/cli.hpp"
#include "twmod/version.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Traveling-wave electro-optic modulator design toolkit"};
    app.set_version_flag("--version", std::string(twmod::version));
    app.require_subcommand(1);

    twmod::CliOptions opt;
    std::uint64_t seed_value = 0;

    static const char* commands[][2] = {
        {"response", "EO frequency response curves and 3 dB bandwidths"},
        {"efficiency", "Transduction efficiency vs modulation length"},
        {"eye", "Shot-noise eye simulation: SNR, BER, optimal bias"},
        {"fit", "Parameter fits: index vs temperature, loss slope, optical index"},
        {"sweep", "Design-space sweeps streamed to CSV"},
        {"tradeoff", "Ohmic bandwidth/drive-voltage trade-off boundary"},
    };
    for (const auto& c : commands) {
        CLI::App* sub = app.add_subcommand(c[0], c[1]);
        sub->add_option("--config", opt.config_path, "Config file path")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out_dir, "Output directory")->capture_default_str();
        sub->add_option("--format", opt.format, "Artifact selection: csv, json or both")
            ->check(CLI::IsMember({"csv", "json", "both"}))
            ->capture_default_str();
        sub->add_option("--seed", seed_value, "RNG seed (eye simulation)")
            ->check(CLI::NonNegativeNumber);
        sub->add_flag("--quiet", opt.quiet, "Suppress progress output");
        sub->add_flag("--plot", opt.plot, "Also emit an SVG chart");
    }

    CLI11_PARSE(app, argc, argv);

    CLI::App* sub = app.get_subcommands().front();
    if (sub->count("--seed")) opt.seed = seed_value;
    return twmod::run_command(sub->get_name(), opt);
}
