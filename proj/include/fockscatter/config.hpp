#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fockscatter/analytic.hpp"
#include "fockscatter/pulse.hpp"

namespace fockscatter {

// Parse or consistency failure, carrying the offending field path (e.g. "pulse.duration").
class ConfigError : public std::invalid_argument {
   public:
    ConfigError(std::string field, const std::string& message)
        : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

   private:
    std::string field_;
};

enum class Preset { None, Fig2a, Fig2b, Fig2c, Fig2d, Fig3, Fig5 };

std::string to_string(Preset preset);
Preset preset_from_string(const std::string& name);

struct NumericsSettings {
    double dt = 0.01;
    std::size_t chi_max = 32;
    double svd_tol = 1e-10;
    int bin_cutoff = 0;  // 0 selects photon number + 1
    double tail = 16.0;  // decay window after the pulse, units of 1/gamma
    double truncation_budget = 1e-6;

    int cutoff_for(int photon_number) const { return bin_cutoff > 0 ? bin_cutoff : photon_number + 1; }
};

struct ObservableSettings {
    double omega_min = -10.0;  // omega - omega_p, units of gamma
    double omega_max = 10.0;
    std::size_t omega_points = 401;
    std::size_t time_stride = 10;  // dynamical spectra sampled every stride bins

    std::vector<double> omega_grid() const { return linear_grid(omega_min, omega_max, omega_points); }
};

struct OutputSettings {
    std::filesystem::path directory = "out";
    bool population = true;
    bool flux = true;
    bool input_spectrum = true;
    bool stationary_spectrum = true;
    bool dynamical_spectrum = true;
    bool checkpoint = false;
    bool no_tls = false;  // also emit the decoupled reference run
};

struct ExperimentConfig {
    Preset preset = Preset::None;
    SystemParams system;
    PulseSpec pulse;
    NumericsSettings numerics;
    ObservableSettings observables;
    OutputSettings outputs;
};

// One physical run inside a (possibly multi-panel) preset.
struct ExperimentCase {
    std::string label;
    PulseSpec pulse;
};

std::vector<ExperimentCase> expand_cases(const ExperimentConfig& config);

// Applies the preset's physics on top of `config`. Throws ConfigError when an
// explicitly set physics field disagrees with the preset.
ExperimentConfig apply_preset(ExperimentConfig config, Preset preset,
                              const std::vector<std::string>& explicit_fields = {});

ExperimentConfig parse_config(const std::string& toml_text, std::optional<Preset> preset_override = std::nullopt);
ExperimentConfig load_config(const std::filesystem::path& path, std::optional<Preset> preset_override = std::nullopt);

// Resolved configuration as TOML.
std::string dump_config(const ExperimentConfig& config);

}  // namespace fockscatter
