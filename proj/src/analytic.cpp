#include "fockscatter/analytic.hpp"

#include <algorithm>
#include <cmath>

namespace fockscatter {

namespace {

void check_closed_form_domain(const SystemParams& p, double t_p, double t) {
    p.validate();
    if (p.delta != 0.0)
        throw UnsupportedConfiguration("closed-form populations assume a resonant pulse (delta = 0)");
    if (!(t_p > 0.0)) throw std::invalid_argument("pulse duration must be positive");
    if (!(t >= 0.0) || !std::isfinite(t)) throw OutOfDomain("time must be finite and non-negative");
}

// (4 / t_p) (exp(gamma t_p / 2) - 1)^2, the post-pulse flux amplitude.
double post_pulse_prefactor(const SystemParams& p, double t_p) {
    const double a = std::expm1(0.5 * p.gamma * t_p);
    return 4.0 / t_p * a * a;
}

}  // namespace

void SystemParams::validate() const {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be positive");
    if (!std::isfinite(delta)) throw std::invalid_argument("delta must be finite");
}

double n_tls_one_photon(const SystemParams& p, double t_p, double t) {
    check_closed_form_domain(p, t_p, t);
    const double x = p.gamma * t_p;
    if (t <= t_p) {
        const double a = std::expm1(-0.5 * p.gamma * t);
        return 4.0 / x * a * a;
    }
    const double a = std::expm1(0.5 * x);
    return 4.0 / x * a * a * std::exp(-p.gamma * t);
}

double n_tls_two_photon(const SystemParams& p, double t_p, double t) {
    check_closed_form_domain(p, t_p, t);
    const double x = p.gamma * t_p;
    const double pre = 8.0 / x;
    if (t <= t_p) {
        const double s = t / t_p;
        return pre * ((-32.0 / x + 16.0 * s - 2.0) * std::exp(-0.5 * p.gamma * t) - 8.0 / x + 1.0 +
                      (40.0 / x + 8.0 * s + 1.0) * std::exp(-p.gamma * t));
    }
    return pre *
           ((-32.0 / x + 14.0) * std::exp(0.5 * x) + (-8.0 / x + 1.0) * std::exp(x) + (40.0 / x + 9.0)) *
           std::exp(-p.gamma * t);
}

std::vector<double> stationary_spectrum_one_photon(const PulseSpec& spec, const SystemParams& p,
                                                   std::span<const double> omega_grid) {
    p.validate();
    if (spec.photon_number != 1)
        throw UnsupportedConfiguration("the cancellation result holds for one-photon input only");
    return envelope_spectrum(spec, omega_grid);
}

cplx correlation_after_pulse(const SystemParams& p, double t_p, double t, double tau) {
    check_closed_form_domain(p, t_p, 0.0);
    if (!(t > t_p)) throw OutOfDomain("two-time correlation closed form requires t > t_p");
    if (!(tau >= 0.0)) throw OutOfDomain("tau must be non-negative");
    return post_pulse_prefactor(p, t_p) * std::exp(-p.gamma * (t + 0.5 * tau));
}

double flux_after_pulse(const SystemParams& p, double t_p, double t) {
    check_closed_form_domain(p, t_p, 0.0);
    if (!(t > t_p)) throw OutOfDomain("output flux closed form requires t > t_p");
    return post_pulse_prefactor(p, t_p) * std::exp(-p.gamma * t);
}

SectorSolution propagate_one_photon_sector(const PulseSpec& spec, const SystemParams& p,
                                           const TimeGrid& grid, int substeps) {
    spec.validate();
    p.validate();
    grid.validate();
    if (spec.photon_number != 1)
        throw UnsupportedConfiguration("sector propagator handles one-photon input only");
    if (substeps < 2 || substeps % 2 != 0) throw std::invalid_argument("substeps must be a positive even number");

    const cplx rate(0.5 * p.gamma, p.delta - spec.carrier_detuning);
    const double root_gamma = std::sqrt(p.gamma);
    const double h = grid.dt / substeps;

    // The envelope may jump at step boundaries (rectangular edges); stages
    // sample it from inside the current step so each step sees a smooth drive.
    struct State {
        cplx e;
        double n_out;
    };
    auto drive = [&](double t, double a, double b) {
        const double eps = 1e-9 * h;
        return sample_envelope(spec, std::clamp(t, a + eps, b - eps));
    };
    auto rhs = [&](const State& s, double t, double a, double b) {
        const cplx f = drive(t, a, b);
        const cplx out = f + root_gamma * s.e;
        return State{-rate * s.e - root_gamma * f, std::norm(out)};
    };

    SectorSolution sol;
    sol.population.label = "one-photon sector ODE";
    sol.population.times.reserve(grid.n_bins + 1);
    sol.population.values.reserve(grid.n_bins + 1);
    sol.output_amplitude.reserve(grid.n_bins);
    sol.population.times.push_back(0.0);
    sol.population.values.push_back(0.0);

    State s{0.0, 0.0};
    for (std::size_t k = 0; k < grid.n_bins; ++k) {
        const double t0 = grid.time(k);
        for (int i = 0; i < substeps; ++i) {
            const double a = t0 + h * i;
            const double b = a + h;
            const State k1 = rhs(s, a, a, b);
            const State k2 = rhs({s.e + 0.5 * h * k1.e, 0.0}, a + 0.5 * h, a, b);
            const State k3 = rhs({s.e + 0.5 * h * k2.e, 0.0}, a + 0.5 * h, a, b);
            const State k4 = rhs({s.e + h * k3.e, 0.0}, b, a, b);
            s.e += h / 6.0 * (k1.e + 2.0 * k2.e + 2.0 * k3.e + k4.e);
            s.n_out += h / 6.0 * (k1.n_out + 2.0 * k2.n_out + 2.0 * k3.n_out + k4.n_out);
            if (2 * (i + 1) == substeps) {
                sol.output_amplitude.push_back(drive(grid.midpoint(k), t0, t0 + grid.dt) + root_gamma * s.e);
            }
        }
        sol.population.times.push_back(grid.time(k + 1));
        sol.population.values.push_back(std::norm(s.e));
    }
    sol.output_norm = s.n_out;
    return sol;
}

}  // namespace fockscatter
