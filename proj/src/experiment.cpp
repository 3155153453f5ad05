#include "fockscatter/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace fockscatter {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

bool is_rectangular_resonant(const CaseSettings& s) {
    return s.pulse.shape == PulseShape::Rectangular && s.system.delta == 0.0 && s.pulse.carrier_detuning == 0.0;
}

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

std::ofstream open_csv(const std::filesystem::path& path, const std::string& header_block,
                       const std::string& columns) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << header_block << columns << '\n';
    return os;
}

std::string header_block(const CaseResult& r, const ExperimentConfig& config) {
    std::ostringstream os;
    os << "# fockscatter output\n";
    os << "# case = " << r.label << "\n";
    os << "# coupling = " << (r.settings.coupling ? "on" : "off") << "\n";
    os << "# photons = " << r.photon_number() << ", shape = " << to_string(r.settings.pulse.shape)
       << ", duration = " << num(r.settings.pulse.duration) << "\n";
    if (r.settings.pulse.shape == PulseShape::Gaussian)
        os << "# gaussian width convention: sigma = duration, centre = 5 sigma (default choice)\n";
    os << "# omega axis: omega - omega_p in units of gamma (window set in [observables])\n";
    std::istringstream cfg(dump_config(config));
    for (std::string line; std::getline(cfg, line);) os << "# " << line << "\n";
    return os.str();
}

Check make_check(std::string name, double oracle, double simulated, double tolerance, bool passed,
                 std::string detail = {}) {
    return Check{std::move(name), oracle, simulated, tolerance, passed, std::move(detail)};
}

}  // namespace

CaseSettings case_settings(const ExperimentConfig& config, const ExperimentCase& c, bool coupling) {
    CaseSettings s;
    s.system = config.system;
    s.pulse = c.pulse;
    s.numerics = config.numerics;
    s.observables = config.observables;
    s.coupling = coupling;
    return s;
}

CaseResult simulate_case(const CaseSettings& settings, std::string label) {
    settings.system.validate();
    settings.pulse.validate();

    CaseResult r;
    r.label = std::move(label);
    r.settings = settings;
    const int n = settings.pulse.photon_number;
    r.grid = TimeGrid::covering(settings.pulse, settings.numerics.dt, settings.numerics.tail, settings.system.gamma);

    CollisionConfig& cfg = r.collision;
    cfg.dt = settings.numerics.dt;
    cfg.n_bins = r.grid.n_bins;
    cfg.chi_max = settings.numerics.chi_max;
    cfg.svd_tol = settings.numerics.svd_tol;
    cfg.bin_cutoff = settings.numerics.cutoff_for(n);
    cfg.truncation_budget = settings.numerics.truncation_budget;
    cfg.coupling = settings.coupling;

    const auto start = Clock::now();
    const auto fk = discretize(settings.pulse, r.grid);
    r.evolution = evolve(build_input_mps(fk, n, cfg), settings.system, cfg, settings.pulse.carrier_detuning);
    r.evolve_seconds = seconds_since(start);

    r.population = population_series(r.evolution.steps, r.label);
    r.flux = output_flux(r.evolution.steps, cfg.dt, r.label);
    r.omega = settings.observables.omega_grid();
    r.input_spectrum = envelope_spectrum(settings.pulse, r.omega);
    for (double& v : r.input_spectrum) v *= n;
    r.sampled_input = sampled_spectrum(fk, r.grid.dt, r.omega);
    for (double& v : r.sampled_input) v *= n;

    if (settings.spectra) {
        const auto spectra_start = Clock::now();
        r.correlations = correlation_matrix(r.evolution.state);
        r.stationary = stationary_spectrum(*r.correlations, r.omega);
        r.running_spectrum = time_dependent_spectrum(*r.correlations, r.omega, settings.observables.time_stride);
        r.intensity = spectral_intensity(*r.correlations, r.omega, 1);
        r.spectra_seconds = seconds_since(spectra_start);
    }
    return r;
}

std::optional<std::vector<double>> closed_form_population(const CaseResult& r) {
    if (!r.settings.coupling || !is_rectangular_resonant(r.settings)) return std::nullopt;
    const int n = r.photon_number();
    std::vector<double> out;
    out.reserve(r.population.times.size());
    for (double t : r.population.times)
        out.push_back(n == 1 ? n_tls_one_photon(r.settings.system, r.settings.pulse.duration, t)
                             : n_tls_two_photon(r.settings.system, r.settings.pulse.duration, t));
    return out;
}

double central_excess_fwhm(const std::vector<double>& omega, const std::vector<double>& spectrum,
                           const std::vector<double>& input) {
    if (omega.empty() || omega.size() != spectrum.size() || omega.size() != input.size()) return nan();
    std::size_t c = 0;
    for (std::size_t i = 1; i < omega.size(); ++i)
        if (std::abs(omega[i]) < std::abs(omega[c])) c = i;
    auto excess = [&](std::size_t i) { return spectrum[i] - input[i]; };
    const double peak = excess(c);
    if (!(peak > 0.0)) return nan();
    const double half = 0.5 * peak;

    std::size_t i = c;
    while (i + 1 < omega.size() && excess(i + 1) >= half) ++i;
    if (i + 1 == omega.size()) return nan();
    const double right = omega[i] + (excess(i) - half) / (excess(i) - excess(i + 1)) * (omega[i + 1] - omega[i]);
    std::size_t j = c;
    while (j > 0 && excess(j - 1) >= half) --j;
    if (j == 0) return nan();
    const double left = omega[j] - (excess(j) - half) / (excess(j) - excess(j - 1)) * (omega[j] - omega[j - 1]);
    return right - left;
}

PostPulseComparison compare_post_pulse(const CaseResult& r, double floor) {
    PostPulseComparison out;
    if (!r.correlations) throw std::invalid_argument("post-pulse comparison needs the correlation matrix");
    const SystemParams& p = r.settings.system;
    const double tp = r.settings.pulse.duration;
    const double dt = r.grid.dt;
    const auto& g = r.correlations->values;
    const std::size_t n = r.correlations->size();

    std::size_t first = 0;
    while (first < n && r.grid.midpoint(first) <= tp) ++first;
    if (first >= n) return out;

    const double flux_peak = flux_after_pulse(p, tp, r.grid.midpoint(first));
    const double corr_peak = std::abs(correlation_after_pulse(p, tp, r.grid.midpoint(first), 0.0));
    for (std::size_t j = first; j < n; ++j) {
        const double t = r.grid.midpoint(j);
        const double exact_flux = flux_after_pulse(p, tp, t);
        if (exact_flux < floor * flux_peak) break;
        const auto jj = static_cast<Eigen::Index>(j);
        out.flux_error = std::max(out.flux_error, std::abs(g(jj, jj).real() - exact_flux) / exact_flux);

        // Population on the bin midpoint from the two bracketing samples (exponential decay).
        const double before = r.population.values[j];
        const double after = r.population.values[j + 1];
        if (before > 0.0 && after > 0.0) {
            const double mid_population = std::sqrt(before * after);
            const double flux = r.flux.values[j];
            out.flux_population_error =
                std::max(out.flux_population_error, std::abs(flux - p.gamma * mid_population) / (p.gamma * mid_population));
        }

        for (std::size_t k = j; k < n; ++k) {
            const double tau = static_cast<double>(k - j) * dt;
            const cplx exact = correlation_after_pulse(p, tp, t, tau);
            if (std::abs(exact) < floor * corr_peak) break;
            const cplx sim = g(jj, static_cast<Eigen::Index>(k));
            out.correlation_error = std::max(out.correlation_error, std::abs(sim - exact) / std::abs(exact));
        }
    }
    return out;
}

ValidationReport validate_case(const CaseResult& r) {
    ValidationReport report;
    const int n = r.photon_number();
    const auto& evo = r.evolution;

    double exc = 0.0;
    for (const auto& s : evo.steps) exc = std::max(exc, std::abs(s.excitation_number - n));
    report.add(make_check("excitation_conservation", n, n + exc, 1e-8, exc <= 1e-8, "max deviation over the run"));

    const double drift = std::abs(evo.state.norm_squared() - 1.0);
    report.add(make_check("norm_drift", 1.0, evo.state.norm_squared(), 1e-6, drift < 1e-6));

    double emitted = 0.0;
    for (const auto& s : evo.steps) emitted += s.bin_occupation;
    report.add(make_check("flux_sum_rule", n, emitted, 1e-4, std::abs(emitted - n) <= 1e-4));

    report.add(make_check("truncation_budget", 0.0, evo.state.truncation_error, r.collision.truncation_budget,
                          !evo.budget_exceeded));

    if (r.stationary) {
        const auto& s = *r.stationary;
        const double rel = std::abs(s.band_integral - n) / n;
        report.add(make_check("spectral_sum_rule", n, s.band_integral, 1e-3, rel <= 1e-3,
                              "(1/2pi) int S d omega over the full band"));
        report.add(make_check("emission_tail", 0.0, s.tail_ratio, kTailThreshold, s.tail_ok,
                              "final-bin flux relative to peak"));

        double peak = 0.0;
        for (double v : s.values) peak = std::max(peak, std::abs(v));
        const auto integrated = integrate_over_time(*r.intensity, r.grid.dt);
        const auto& running = r.running_spectrum->values;
        double identity = 0.0;
        for (std::size_t i = 0; i < s.values.size(); ++i) {
            const double scale = std::max(std::abs(s.values[i]), 1e-12 * peak);
            const double last = running(static_cast<Eigen::Index>(i), running.cols() - 1);
            identity = std::max({identity, std::abs(integrated[i] - s.values[i]) / scale,
                                 std::abs(last - s.values[i]) / scale});
        }
        report.add(make_check("spectral_identity", 0.0, identity, 1e-6, identity <= 1e-6,
                              "int I dt and S(omega, t_end) against S(omega), pointwise relative"));
    }

    if (r.settings.coupling) {
        if (auto exact = closed_form_population(r)) {
            double err = 0.0;
            for (std::size_t i = 0; i < exact->size(); ++i)
                err = std::max(err, std::abs((*exact)[i] - r.population.values[i]));
            report.add(make_check("population_vs_closed_form", 0.0, err, 5e-3, err < 5e-3, "max abs error"));

            const double tp = r.settings.pulse.duration;
            const auto k = static_cast<std::size_t>(std::llround(tp / r.grid.dt));
            const double at_end = r.population.values.at(k);
            const double expected = n == 1 ? n_tls_one_photon(r.settings.system, tp, tp)
                                           : n_tls_two_photon(r.settings.system, tp, tp);
            report.add(make_check("population_at_pulse_end", expected, at_end, 0.01,
                                  std::abs(at_end - expected) <= 0.01 * expected, "relative"));
        } else if (n == 1) {
            const auto ode = propagate_one_photon_sector(r.settings.pulse, r.settings.system, r.grid);
            double err = 0.0;
            for (std::size_t i = 0; i < r.population.values.size(); ++i)
                err = std::max(err, std::abs(ode.population.values[i] - r.population.values[i]));
            report.add(make_check("population_vs_sector_ode", 0.0, err, 5e-3, err < 5e-3, "max abs error"));
        }

        if (r.stationary && n == 1) {
            double peak = 0.0, diff = 0.0;
            for (std::size_t i = 0; i < r.omega.size(); ++i) {
                peak = std::max(peak, r.input_spectrum[i]);
                diff = std::max(diff, std::abs(r.stationary->values[i] - r.input_spectrum[i]));
            }
            report.add(make_check("stationary_equals_input", 0.0, diff / peak, 0.01, diff <= 0.01 * peak,
                                  "max |S - |f|^2| relative to peak"));
        }
        if (r.stationary && n == 1 && is_rectangular_resonant(r.settings)) {
            const auto cmp = compare_post_pulse(r);
            report.add(make_check("flux_vs_closed_form", 0.0, cmp.flux_error, 0.02, cmp.flux_error < 0.02,
                                  "max relative error, t > t_p"));
            report.add(make_check("correlation_vs_closed_form", 0.0, cmp.correlation_error, 0.02,
                                  cmp.correlation_error < 0.02, "max relative error, t > t_p, tau >= 0"));
            report.add(make_check("flux_equals_gamma_population", 0.0, cmp.flux_population_error, 0.02,
                                  cmp.flux_population_error < 0.02, "max relative error, t > t_p"));
        }
        if (r.stationary && n == 2) {
            std::size_t c = 0;
            for (std::size_t i = 1; i < r.omega.size(); ++i)
                if (std::abs(r.omega[i]) < std::abs(r.omega[c])) c = i;
            const double ratio = r.stationary->values[c] / r.input_spectrum[c];
            const double fwhm = central_excess_fwhm(r.omega, r.stationary->values, r.input_spectrum) /
                                r.settings.system.gamma;
            const bool ok = ratio > 1.0 && fwhm >= 0.5 && fwhm <= 2.0;
            std::ostringstream detail;
            detail << "S(omega_p) / input = " << num(ratio) << ", excess FWHM = " << num(fwhm) << " gamma";
            report.add(make_check("central_enhancement", 1.0, ratio, 0.0, ok, detail.str()));
        }
    } else {
        double pop = 0.0;
        for (double v : r.population.values) pop = std::max(pop, std::abs(v));
        report.add(make_check("no_tls_population_zero", 0.0, pop, 1e-12, pop <= 1e-12));
        if (r.stationary) {
            double peak = 0.0, diff = 0.0, continuous = 0.0;
            for (std::size_t i = 0; i < r.omega.size(); ++i) {
                peak = std::max(peak, r.sampled_input[i]);
                diff = std::max(diff, std::abs(r.stationary->values[i] - r.sampled_input[i]));
                continuous = std::max(continuous, std::abs(r.stationary->values[i] - r.input_spectrum[i]));
            }
            std::ostringstream detail;
            detail << "against the sampled input, relative to peak; continuous |f|^2 differs by "
                   << num(continuous / peak) << " (bin quadrature)";
            report.add(make_check("no_tls_spectrum_equals_input", 0.0, diff / peak, 1e-6, diff <= 1e-6 * peak,
                                  detail.str()));
            const double smin = r.running_spectrum->values.minCoeff();
            const double smax = r.running_spectrum->values.maxCoeff();
            report.add(make_check("no_tls_negative_running_spectrum", 0.0, smin / smax, 1e-6, smin < -1e-6 * smax,
                                  "min S(omega, t) relative to max; must be below -tol"));
        }
    }

    report.metadata = {{"case", r.label},
                       {"photons", n},
                       {"coupling", r.settings.coupling},
                       {"n_bins", r.grid.n_bins},
                       {"dt", r.grid.dt},
                       {"bin_cutoff", r.collision.bin_cutoff},
                       {"chi_max", r.collision.chi_max},
                       {"svd_tol", r.collision.svd_tol},
                       {"max_bond_dimension", evo.max_bond_dimension},
                       {"truncation_error", evo.state.truncation_error},
                       {"evolve_seconds", r.evolve_seconds},
                       {"spectra_seconds", r.spectra_seconds},
                       {"warnings", evo.warnings}};
    if (r.stationary && !r.stationary->warnings.empty()) report.metadata["spectrum_warnings"] = r.stationary->warnings;
    return report;
}

void write_case_outputs(const CaseResult& r, const ExperimentConfig& config, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const std::string head = header_block(r, config);
    const OutputSettings& out = config.outputs;
    const int n = r.photon_number();

    if (out.population) {
        std::vector<double> reference(r.population.times.size(), nan());
        std::string source = "none";
        if (!r.settings.coupling) {
            std::fill(reference.begin(), reference.end(), 0.0);
            source = "decoupled emitter";
        } else if (auto exact = closed_form_population(r)) {
            reference = *exact;
            source = "closed form";
        } else if (n == 1) {
            reference = propagate_one_photon_sector(r.settings.pulse, r.settings.system, r.grid).population.values;
            source = "one-photon sector ODE";
        }
        auto os = open_csv(dir / "population.csv", head + "# n_analytic source: " + source + "\n", "t,n_mps,n_analytic");
        for (std::size_t i = 0; i < r.population.times.size(); ++i)
            os << num(r.population.times[i]) << ',' << num(r.population.values[i]) << ',' << num(reference[i]) << '\n';
    }

    if (out.flux) {
        const bool closed = r.settings.coupling && n == 1 && is_rectangular_resonant(r.settings);
        auto os = open_csv(dir / "flux.csv", head, "t,n_out_mps,flux_analytic");
        for (std::size_t i = 0; i < r.flux.times.size(); ++i) {
            const double t = r.flux.times[i];
            double reference = nan();
            if (!r.settings.coupling)
                reference = n * std::norm(sample_envelope(r.settings.pulse, t));
            else if (closed && t > r.settings.pulse.duration)
                reference = flux_after_pulse(r.settings.system, r.settings.pulse.duration, t);
            os << num(t) << ',' << num(r.flux.values[i]) << ',' << num(reference) << '\n';
        }
    }

    if (out.input_spectrum) {
        auto os = open_csv(dir / "input_spectrum.csv", head, "delta_omega,value");
        for (std::size_t i = 0; i < r.omega.size(); ++i) os << num(r.omega[i]) << ',' << num(r.input_spectrum[i]) << '\n';
    }

    if (out.stationary_spectrum && r.stationary) {
        auto os = open_csv(dir / "stationary_spectrum.csv", head, "delta_omega,value,input");
        for (std::size_t i = 0; i < r.omega.size(); ++i)
            os << num(r.omega[i]) << ',' << num(r.stationary->values[i]) << ',' << num(r.input_spectrum[i]) << '\n';
    }

    if (out.dynamical_spectrum && r.running_spectrum && r.intensity) {
        auto os = open_csv(dir / "dynamical_spectrum.csv", head, "delta_omega,t,value,kind");
        const auto& s = *r.running_spectrum;
        for (std::size_t i = 0; i < s.omega_grid.size(); ++i)
            for (std::size_t m = 0; m < s.time_grid.size(); ++m)
                os << num(s.omega_grid[i]) << ',' << num(s.time_grid[m]) << ','
                   << num(s.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m))) << ",S\n";
        const auto& in = *r.intensity;
        const std::size_t stride = std::max<std::size_t>(r.settings.observables.time_stride, 1);
        for (std::size_t i = 0; i < in.omega_grid.size(); ++i)
            for (std::size_t m = 0; m < in.time_grid.size(); m += stride)
                os << num(in.omega_grid[i]) << ',' << num(in.time_grid[m]) << ','
                   << num(in.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m))) << ",I\n";
    }

    if (out.checkpoint) save_checkpoint(r.evolution.state, dir / "final_state.mps");
}

ValidationReport compare_no_tls(const ExperimentConfig& config) {
    ValidationReport report;
    for (const auto& c : expand_cases(config)) {
        const CaseResult r = simulate_case(case_settings(config, c, false), c.label + "/no_tls");
        write_case_outputs(r, config, config.outputs.directory / c.label / "no_tls");
        report.append(validate_case(r), c.label + "/no_tls/");
    }
    return report;
}

ValidationReport run(const ExperimentConfig& config) {
    const auto start = Clock::now();
    ValidationReport report;
    std::filesystem::create_directories(config.outputs.directory);
    try {
        for (const auto& c : expand_cases(config)) {
            const CaseResult r = simulate_case(case_settings(config, c), c.label);
            write_case_outputs(r, config, config.outputs.directory / c.label);
            report.append(validate_case(r), c.label + "/");
        }
        if (config.outputs.no_tls) report.append(compare_no_tls(config), "");
    } catch (const std::exception& e) {
        report.add(make_check("run_completed", 1.0, 0.0, 0.0, false, e.what()));
    }
    report.metadata["preset"] = to_string(config.preset);
    report.metadata["wall_seconds"] = seconds_since(start);
    report.metadata["config"] = dump_config(config);
    report.write(config.outputs.directory / "report.json");
    return report;
}

SweepAxis sweep_axis_from_string(const std::string& name) {
    if (name == "dt") return SweepAxis::Dt;
    if (name == "chi" || name == "chi_max") return SweepAxis::ChiMax;
    if (name == "cutoff" || name == "bin_cutoff") return SweepAxis::BinCutoff;
    throw std::invalid_argument("unknown sweep axis '" + name + "' (expected dt, chi or cutoff)");
}

std::string to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::Dt: return "dt";
        case SweepAxis::ChiMax: return "chi_max";
        case SweepAxis::BinCutoff: return "bin_cutoff";
    }
    return "dt";
}

std::vector<SweepPoint> sweep_convergence(const ExperimentConfig& config, SweepAxis axis,
                                          std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("sweep needs at least one value");
    const bool increasing = std::is_sorted(values.begin(), values.end());
    const bool decreasing = std::is_sorted(values.begin(), values.end(), std::greater<>());
    if (!increasing && !decreasing) throw std::invalid_argument("sweep values must be monotone");

    const ExperimentCase base = expand_cases(config).front();
    std::vector<SweepPoint> points;
    for (double v : values) {
        CaseSettings s = case_settings(config, base);
        s.spectra = false;
        switch (axis) {
            case SweepAxis::Dt: s.numerics.dt = v; break;
            case SweepAxis::ChiMax: s.numerics.chi_max = static_cast<std::size_t>(std::llround(v)); break;
            case SweepAxis::BinCutoff: s.numerics.bin_cutoff = static_cast<int>(std::llround(v)); break;
        }
        const auto start = Clock::now();
        const CaseResult r = simulate_case(s, base.label);

        std::vector<double> reference;
        if (auto exact = closed_form_population(r))
            reference = *exact;
        else if (r.photon_number() == 1)
            reference = propagate_one_photon_sector(s.pulse, s.system, r.grid).population.values;
        else
            throw UnsupportedConfiguration("no population oracle for this configuration");

        SweepPoint p;
        p.setting = v;
        for (std::size_t i = 0; i < reference.size(); ++i)
            p.error = std::max(p.error, std::abs(reference[i] - r.population.values[i]));
        p.max_bond = r.evolution.max_bond_dimension;
        p.truncation_error = r.evolution.state.truncation_error;
        p.wall_seconds = seconds_since(start);
        points.push_back(p);
    }
    return points;
}

void write_sweep_csv(const std::vector<SweepPoint>& points, SweepAxis axis, const ExperimentConfig& config,
                     const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ostringstream head;
    head << "# fockscatter convergence sweep over " << to_string(axis) << "\n";
    std::istringstream cfg(dump_config(config));
    for (std::string line; std::getline(cfg, line);) head << "# " << line << "\n";
    auto os = open_csv(path, head.str(), "setting,error,max_bond,truncation_error,wall_time");
    for (const auto& p : points)
        os << num(p.setting) << ',' << num(p.error) << ',' << p.max_bond << ',' << num(p.truncation_error) << ','
           << num(p.wall_seconds) << '\n';
}

}  // namespace fockscatter
