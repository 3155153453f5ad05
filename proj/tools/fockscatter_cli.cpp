// Command-line front end: figure presets, convergence sweeps and the
// acceptance suite.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>

#include "fockscatter/acceptance.hpp"
#include "fockscatter/experiment.hpp"

namespace fs = fockscatter;

namespace {

constexpr const char* kOutEnv = "FOCKSCATTER_OUT";

fs::ExperimentConfig resolve_config(const std::string& config_path, const std::string& preset,
                                    const std::string& out_dir) {
    std::optional<fs::Preset> override_preset;
    if (!preset.empty()) override_preset = fs::preset_from_string(preset);

    fs::ExperimentConfig config;
    if (!config_path.empty()) {
        config = fs::load_config(config_path, override_preset);
    } else {
        config = fs::apply_preset(config, override_preset.value_or(fs::Preset::Fig2a));
    }
    if (const char* env = std::getenv(kOutEnv); env && *env) config.outputs.directory = env;
    if (!out_dir.empty()) config.outputs.directory = out_dir;
    return config;
}

std::vector<double> parse_values(const std::string& list) {
    std::vector<double> values;
    std::stringstream ss(list);
    for (std::string item; std::getline(ss, item, ',');) {
        if (item.empty()) continue;
        std::size_t used = 0;
        const double v = std::stod(item, &used);
        if (used != item.size()) throw std::invalid_argument("bad sweep value '" + item + "'");
        values.push_back(v);
    }
    return values;
}

void print_report(const fs::ValidationReport& report) {
    for (const auto& c : report.checks) std::cout << fs::format_check(c) << '\n';
    std::cout << (report.passed() ? "overall: PASS" : "overall: FAIL") << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fock-state pulse scattering off a chiral two-level emitter"};
    app.require_subcommand(1);

    std::string config_path, preset, out_dir;
    bool dump = false;
    auto* run = app.add_subcommand("run", "Run a configuration or figure preset");
    run->add_option("--config", config_path, "TOML configuration file");
    run->add_option("--preset", preset, "fig2a|fig2b|fig2c|fig2d|fig3|fig5|none");
    run->add_option("--out", out_dir, "Output directory (overrides config and $FOCKSCATTER_OUT)");
    run->add_flag("--dump-config", dump, "Print the resolved configuration and exit");

    std::string axis, values_list, sweep_config, sweep_preset, sweep_out;
    auto* sweep = app.add_subcommand("sweep", "Convergence sweep of the population error");
    sweep->add_option("--axis", axis, "dt|chi|cutoff")->required();
    sweep->add_option("--values", values_list, "Comma-separated monotone settings")->required();
    sweep->add_option("--config", sweep_config, "TOML configuration file");
    sweep->add_option("--preset", sweep_preset, "Preset to sweep (default fig2a)");
    sweep->add_option("--out", sweep_out, "Output directory");

    std::string validate_out;
    auto* validate = app.add_subcommand("validate", "Run the acceptance suite");
    validate->add_option("--out", validate_out, "Directory for report.json");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            const auto config = resolve_config(config_path, preset, out_dir);
            if (dump) {
                std::cout << fs::dump_config(config);
                return 0;
            }
            const auto report = fs::run(config);
            print_report(report);
            std::cout << "artifacts written to " << config.outputs.directory.string() << '\n';
            return report.passed() ? 0 : 1;
        }
        if (*sweep) {
            const auto config = resolve_config(sweep_config, sweep_preset, sweep_out);
            const auto sweep_axis = fs::sweep_axis_from_string(axis);
            const auto values = parse_values(values_list);
            const auto points = fs::sweep_convergence(config, sweep_axis, values);
            const auto path = config.outputs.directory / ("sweep_" + fs::to_string(sweep_axis) + ".csv");
            fs::write_sweep_csv(points, sweep_axis, config, path);
            for (const auto& p : points)
                std::cout << fs::to_string(sweep_axis) << '=' << p.setting << " error=" << p.error
                          << " max_bond=" << p.max_bond << '\n';
            std::cout << "wrote " << path.string() << '\n';
            return 0;
        }
        if (*validate) {
            fs::AcceptanceOptions options;
            options.on_check = [](const fs::Check& c) { std::cout << fs::format_check(c) << std::endl; };
            const auto report = fs::run_acceptance_suite(options);
            std::filesystem::path dir = validate_out;
            if (dir.empty()) {
                const char* env = std::getenv(kOutEnv);
                dir = env && *env ? env : "out";
            }
            report.write(dir / "report.json");
            std::cout << (report.passed() ? "overall: PASS" : "overall: FAIL") << '\n';
            return report.passed() ? 0 : 1;
        }
    } catch (const fs::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
