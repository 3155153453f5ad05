#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fockscatter/config.hpp"
#include "fockscatter/mps.hpp"
#include "fockscatter/observables.hpp"
#include "fockscatter/report.hpp"

namespace fockscatter {

struct CaseSettings {
    SystemParams system;
    PulseSpec pulse;
    NumericsSettings numerics;
    ObservableSettings observables;
    bool coupling = true;
    bool spectra = true;  // correlation matrix and all spectra
};

struct CaseResult {
    std::string label;
    CaseSettings settings;
    TimeGrid grid;
    CollisionConfig collision;
    EvolutionResult evolution;
    PopulationSeries population;
    PopulationSeries flux;
    std::vector<double> omega;
    std::vector<double> input_spectrum;    // n |f(omega)|^2
    std::vector<double> sampled_input;     // n dt |sum_k f_k exp(i omega t_k)|^2
    std::optional<CorrelationMatrix> correlations;
    std::optional<SpectrumResult> stationary;
    std::optional<DynamicalSpectrum> running_spectrum;  // S(omega, t), strided
    std::optional<DynamicalSpectrum> intensity;         // I(omega, t), every bin
    double evolve_seconds = 0.0;
    double spectra_seconds = 0.0;

    int photon_number() const { return settings.pulse.photon_number; }
};

CaseResult simulate_case(const CaseSettings& settings, std::string label = "case");

// Closed-form population for rectangular resonant coupled runs, evaluated on
// the population time axis; empty otherwise.
std::optional<std::vector<double>> closed_form_population(const CaseResult& result);

// Widest contiguous region around omega = 0 where S - n|f|^2 stays above half
// its central value; NaN when the centre shows no excess.
double central_excess_fwhm(const std::vector<double>& omega, const std::vector<double>& spectrum,
                           const std::vector<double>& input);

// Worst relative deviation between the post-pulse correlation block and the
// closed form, over entries where the closed form exceeds `floor` of its peak.
struct PostPulseComparison {
    double flux_error = 0.0;
    double correlation_error = 0.0;
    double flux_population_error = 0.0;  // flux versus gamma n_TLS from the same run
};
PostPulseComparison compare_post_pulse(const CaseResult& result, double floor = 1e-3);

ValidationReport validate_case(const CaseResult& result);

// Writes the case's CSV artifacts into `directory`.
void write_case_outputs(const CaseResult& result, const ExperimentConfig& config,
                        const std::filesystem::path& directory);

CaseSettings case_settings(const ExperimentConfig& config, const ExperimentCase& c, bool coupling = true);

// Runs every case of the config, writes artifacts and report.json under the
// output directory and returns the combined report.
ValidationReport run(const ExperimentConfig& config);

// Decoupled reference runs for every case, written to <case>/no_tls/.
ValidationReport compare_no_tls(const ExperimentConfig& config);

enum class SweepAxis { Dt, ChiMax, BinCutoff };
SweepAxis sweep_axis_from_string(const std::string& name);
std::string to_string(SweepAxis axis);

struct SweepPoint {
    double setting = 0.0;
    double error = 0.0;  // max |n_TLS - oracle|
    std::size_t max_bond = 0;
    double truncation_error = 0.0;
    double wall_seconds = 0.0;
};

std::vector<SweepPoint> sweep_convergence(const ExperimentConfig& config, SweepAxis axis,
                                          std::span<const double> values);
void write_sweep_csv(const std::vector<SweepPoint>& points, SweepAxis axis, const ExperimentConfig& config,
                     const std::filesystem::path& path);

}  // namespace fockscatter
