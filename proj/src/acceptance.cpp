#include "fockscatter/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "fockscatter/experiment.hpp"

namespace fockscatter {

namespace {

constexpr double kPeakOnePhoton = 0.79915;   // 2 (1 - e^-1)^2
constexpr double kPulseEndTwoPhoton = 0.75586;  // 4 (-2 e^-1 - 3 + 29 e^-2)

CaseSettings rectangular(int photons, double tp, int cutoff = 0) {
    CaseSettings s;
    s.pulse.shape = PulseShape::Rectangular;
    s.pulse.duration = tp;
    s.pulse.photon_number = photons;
    s.numerics.bin_cutoff = cutoff;
    return s;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

double max_population(const CaseResult& r) {
    return *std::max_element(r.population.values.begin(), r.population.values.end());
}

double population_at(const CaseResult& r, double t) {
    return r.population.values.at(static_cast<std::size_t>(std::llround(t / r.grid.dt)));
}

double population_error(const CaseResult& r) {
    const auto exact = closed_form_population(r);
    return exact ? max_abs_diff(*exact, r.population.values) : std::nan("");
}

struct Conservation {
    double excitation = 0.0;
    double norm_drift = 0.0;
    double sum_rule = 0.0;
};

Conservation conservation(const CaseResult& r) {
    Conservation c;
    double emitted = 0.0;
    for (const auto& s : r.evolution.steps) {
        c.excitation = std::max(c.excitation, std::abs(s.excitation_number - r.photon_number()));
        emitted += s.bin_occupation;
    }
    c.norm_drift = std::abs(r.evolution.state.norm_squared() - 1.0);
    c.sum_rule = std::abs(emitted - r.photon_number());
    return c;
}

double stationary_vs_input(const CaseResult& r) {
    double peak = 0.0, diff = 0.0;
    for (std::size_t i = 0; i < r.omega.size(); ++i) {
        peak = std::max(peak, r.input_spectrum[i]);
        diff = std::max(diff, std::abs(r.stationary->values[i] - r.input_spectrum[i]));
    }
    return diff / peak;
}

double spectral_identity(const CaseResult& r) {
    const auto& s = r.stationary->values;
    double peak = 0.0;
    for (double v : s) peak = std::max(peak, std::abs(v));
    const auto integrated = integrate_over_time(*r.intensity, r.grid.dt);
    const auto& running = r.running_spectrum->values;
    double worst = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double scale = std::max(std::abs(s[i]), 1e-12 * peak);
        const double last = running(static_cast<Eigen::Index>(i), running.cols() - 1);
        worst = std::max({worst, std::abs(integrated[i] - s[i]) / scale, std::abs(last - s[i]) / scale});
    }
    return worst;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

ValidationReport run_acceptance_suite(const AcceptanceOptions& options) {
    ValidationReport report;
    auto emit = [&](Check c) {
        report.add(c);
        if (options.on_check) options.on_check(c);
    };

    // A1: one-photon population against the continuous closed form.
    const CaseResult one = simulate_case(rectangular(1, 2.0, 2), "n1_tp2");
    {
        const double err = population_error(one);
        const double peak = max_population(one);
        const bool ok = err < 5e-3 && std::abs(peak - kPeakOnePhoton) <= 0.01 * kPeakOnePhoton &&
                        one.evolve_seconds < 10.0;
        emit({"A1 one-photon population", kPeakOnePhoton, peak, 5e-3, ok,
              "max abs error " + fmt(err) + " (< 5e-3), peak within 1%, evolve " + fmt(one.evolve_seconds) +
                  " s (< 10 s)"});
    }

    // A2: two-photon population.
    const CaseResult two = simulate_case(rectangular(2, 2.0, 2), "n2_tp2");
    {
        const double err = population_error(two);
        const double at_end = population_at(two, 2.0);
        const double peak1 = max_population(one);
        const double peak2 = max_population(two);
        const bool ok = err < 5e-3 && std::abs(at_end - kPulseEndTwoPhoton) <= 0.01 * kPulseEndTwoPhoton &&
                        peak1 > peak2 && two.evolve_seconds < 30.0;
        emit({"A2 two-photon population", kPulseEndTwoPhoton, at_end, 5e-3, ok,
              "max abs error " + fmt(err) + " (< 5e-3), n(t_p) within 1%, peaks one-photon " + fmt(peak1) +
                  " > two-photon " + fmt(peak2) + ", evolve " + fmt(two.evolve_seconds) + " s (< 30 s)"});
    }

    // A3: stationary one-photon spectrum equals the input spectrum for any shape.
    const CaseResult short_one = simulate_case(rectangular(1, 0.5), "n1_tp0.5");
    CaseSettings gaussian_settings;
    gaussian_settings.pulse.shape = PulseShape::Gaussian;
    gaussian_settings.pulse.duration = 1.0;
    gaussian_settings.pulse.photon_number = 1;
    const CaseResult gaussian = simulate_case(gaussian_settings, "n1_gaussian");
    {
        double worst = 0.0, slowest = 0.0;
        std::string detail;
        for (const CaseResult* r : {&one, &short_one, &gaussian}) {
            const double d = stationary_vs_input(*r);
            worst = std::max(worst, d);
            slowest = std::max(slowest, r->evolve_seconds + r->spectra_seconds);
            detail += r->label + " " + fmt(d) + "; ";
        }
        const bool ok = worst <= 0.01 && slowest < 120.0;
        emit({"A3 one-photon spectrum cancellation", 0.0, worst, 0.01, ok,
              detail + "slowest run " + fmt(slowest) + " s (< 120 s)"});
    }

    // A4: central enhancement of the two-photon spectrum.
    const CaseResult short_two = simulate_case(rectangular(2, 0.5), "n2_tp0.5");
    {
        bool ok = true;
        double min_ratio = 1e300;
        std::string detail;
        for (const CaseResult* r : {&two, &short_two}) {
            std::size_t c = 0;
            for (std::size_t i = 1; i < r->omega.size(); ++i)
                if (std::abs(r->omega[i]) < std::abs(r->omega[c])) c = i;
            const double ratio = r->stationary->values[c] / r->input_spectrum[c];
            const double fwhm = central_excess_fwhm(r->omega, r->stationary->values, r->input_spectrum);
            ok = ok && ratio > 1.0 && fwhm >= 0.5 && fwhm <= 2.0;
            min_ratio = std::min(min_ratio, ratio);
            detail += r->label + " ratio " + fmt(ratio) + " FWHM " + fmt(fwhm) + "; ";
        }
        emit({"A4 two-photon central enhancement", 1.0, min_ratio, 0.0, ok,
              detail + "need ratio > 1 and FWHM in [0.5, 2] gamma"});
    }

    // A5: int I dt = S(omega) = S(omega, t_end).
    {
        double worst = 0.0;
        for (const CaseResult* r : {&one, &two, &short_one, &short_two, &gaussian})
            worst = std::max(worst, spectral_identity(*r));
        emit({"A5 spectral identity", 0.0, worst, 1e-6, worst <= 1e-6, "pointwise relative, five runs"});
    }

    // A6: two-time correlation after the pulse.
    {
        const auto cmp = compare_post_pulse(one);
        // Closed forms: flux = gamma n_TLS for t > t_p.
        double identity = 0.0;
        const SystemParams p;
        for (double t = 2.01; t < 18.0; t += 0.37)
            identity = std::max(identity, std::abs(flux_after_pulse(p, 2.0, t) - p.gamma * n_tls_one_photon(p, 2.0, t)) /
                                              flux_after_pulse(p, 2.0, t));
        const double worst = std::max({cmp.flux_error, cmp.correlation_error, cmp.flux_population_error});
        const bool ok = worst < 0.02 && identity < 1e-12;
        emit({"A6 two-time correlation", 0.0, worst, 0.02, ok,
              "correlation " + fmt(cmp.correlation_error) + ", flux " + fmt(cmp.flux_error) +
                  ", flux vs gamma n_TLS " + fmt(cmp.flux_population_error) + ", closed-form identity " +
                  fmt(identity)});
    }

    // A7: conservation laws on every run.
    {
        Conservation worst;
        for (const CaseResult* r : {&one, &two, &short_one, &short_two, &gaussian}) {
            const Conservation c = conservation(*r);
            worst.excitation = std::max(worst.excitation, c.excitation);
            worst.norm_drift = std::max(worst.norm_drift, c.norm_drift);
            worst.sum_rule = std::max(worst.sum_rule, c.sum_rule);
        }
        const bool ok = worst.excitation <= 1e-8 && worst.norm_drift < 1e-6 && worst.sum_rule <= 1e-4;
        emit({"A7 conservation", 0.0, worst.excitation, 1e-8, ok,
              "excitation " + fmt(worst.excitation) + " (<= 1e-8), norm drift " + fmt(worst.norm_drift) +
                  " (< 1e-6), flux sum rule " + fmt(worst.sum_rule) + " (<= 1e-4)"});
    }

    // A8: independent one-photon sector propagator.
    {
        PulseSpec rect;
        rect.duration = 2.0;
        const SystemParams p;
        const auto grid = TimeGrid::covering(rect, 1e-3, 16.0);
        const auto ode = propagate_one_photon_sector(rect, p, grid);
        double closed = 0.0;
        for (std::size_t i = 0; i < ode.population.times.size(); ++i)
            closed = std::max(closed, std::abs(ode.population.values[i] - n_tls_one_photon(p, 2.0, ode.population.times[i])));
        const auto ode_gauss = propagate_one_photon_sector(gaussian.settings.pulse, gaussian.settings.system, gaussian.grid);
        const double vs_mps = max_abs_diff(ode_gauss.population.values, gaussian.population.values);
        const bool ok = closed < 1e-6 && vs_mps < 5e-3;
        emit({"A8 sector ODE oracle", 0.0, closed, 1e-6, ok,
              "ODE vs closed form " + fmt(closed) + " (< 1e-6), ODE vs MPS gaussian " + fmt(vs_mps) + " (< 5e-3)"});
    }

    // A9: decoupled reference run.
    {
        CaseSettings s = rectangular(1, 2.0);
        s.coupling = false;
        const CaseResult ref = simulate_case(s, "n1_tp2_no_tls");
        const double pop = *std::max_element(ref.population.values.begin(), ref.population.values.end(),
                                             [](double a, double b) { return std::abs(a) < std::abs(b); });
        double peak = 0.0, spec = 0.0;
        for (std::size_t i = 0; i < ref.omega.size(); ++i) {
            peak = std::max(peak, ref.sampled_input[i]);
            spec = std::max(spec, std::abs(ref.stationary->values[i] - ref.sampled_input[i]));
        }
        spec /= peak;
        const double smin = ref.running_spectrum->values.minCoeff();
        const double smax = ref.running_spectrum->values.maxCoeff();
        const bool negative = smin < -1e-6 * smax;
        const bool ok = std::abs(pop) <= 1e-12 && spec <= 1e-6 && negative;
        emit({"A9 decoupled reference", 0.0, smin / smax, 1e-6, ok,
              "population " + fmt(pop) + " (0), spectrum vs sampled input " + fmt(spec) + " (<= 1e-6; continuous |f|^2 " +
                  fmt(stationary_vs_input(ref)) + "), min S(omega,t)/max " +
                  fmt(smin / smax) + " (must be < -1e-6)"});
    }

    // A10: convergence order and invariance under cutoff and bond dimension.
    {
        std::vector<double> errs;
        for (double dt : {0.02, 0.01, 0.005}) {
            CaseSettings s = rectangular(1, 2.0);
            s.numerics.dt = dt;
            s.spectra = false;
            errs.push_back(population_error(simulate_case(s)));
        }
        const double r1 = errs[0] / errs[1];
        const double r2 = errs[1] / errs[2];

        auto run_two = [](int cutoff, std::size_t chi) {
            CaseSettings s = rectangular(2, 2.0, cutoff);
            s.numerics.chi_max = chi;
            s.spectra = false;
            return simulate_case(s);
        };
        const CaseResult base = run_two(3, 32);
        const CaseResult more_cutoff = run_two(4, 32);
        const CaseResult chi8 = run_two(3, 8);
        const double cutoff_diff = std::max(max_abs_diff(base.population.values, more_cutoff.population.values),
                                            max_abs_diff(base.flux.values, more_cutoff.flux.values));
        const double chi_diff = std::max(max_abs_diff(base.population.values, chi8.population.values),
                                         max_abs_diff(base.flux.values, chi8.flux.values));
        const bool ok = r1 >= 1.5 && r1 <= 2.5 && r2 >= 1.5 && r2 <= 2.5 && cutoff_diff <= 1e-8 && chi_diff <= 1e-8;
        emit({"A10 convergence", 2.0, r2, 0.5, ok,
              "dt-halving ratios " + fmt(r1) + ", " + fmt(r2) + " (in [1.5, 2.5]), cutoff 3 vs 4 diff " +
                  fmt(cutoff_diff) + ", chi 8 vs 32 diff " + fmt(chi_diff) + " (<= 1e-8)"});
    }

    return report;
}

}  // namespace fockscatter
