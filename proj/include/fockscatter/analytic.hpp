#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fockscatter/pulse.hpp"

namespace fockscatter {

// Chiral emitter: couples to right-moving photons only, so gamma = gamma_R.
struct SystemParams {
    double gamma = 1.0;
    double delta = 0.0;  // omega_a - omega_0

    void validate() const;
};

class UnsupportedConfiguration : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

class OutOfDomain : public std::domain_error {
   public:
    using std::domain_error::domain_error;
};

struct PopulationSeries {
    std::vector<double> times;
    std::vector<double> values;
    std::string label;
};

// Emitter population for a resonant rectangular one-photon pulse of length t_p.
// After the pulse it decays as
//   (4 / gamma t_p) (exp(gamma t_p / 2) - 1)^2 exp(-gamma t),
// continuous at t_p and equal to the output flux divided by gamma.
double n_tls_one_photon(const SystemParams& p, double t_p, double t);

// Emitter population for a resonant rectangular two-photon Fock pulse.
double n_tls_two_photon(const SystemParams& p, double t_p, double t);

// Transmitted one-photon spectrum. Every emitter contribution cancels, so the
// result is the input |f(omega)|^2 for any pulse shape and detuning.
std::vector<double> stationary_spectrum_one_photon(const PulseSpec& spec, const SystemParams& p,
                                                   std::span<const double> omega_grid);

// v_g <a_R^dag(t) a_R(t + tau)> after a rectangular one-photon pulse (t > t_p).
cplx correlation_after_pulse(const SystemParams& p, double t_p, double t, double tau);

// v_g <a_R^dag(t) a_R(t)> for t > t_p.
double flux_after_pulse(const SystemParams& p, double t_p, double t);

struct SectorSolution {
    PopulationSeries population;        // |e(t)|^2 at t = i dt, i = 0..n_bins
    std::vector<cplx> output_amplitude;  // f(t) + sqrt(gamma) e(t) at bin midpoints
    double output_norm = 0.0;           // int |f_out|^2 dt over the grid
};

// Single-excitation amplitude equation
//   de/dt = -(gamma/2 + i delta_eff) e - sqrt(gamma) f(t)
// integrated with fixed-step RK4 at step dt/10. delta_eff = delta - carrier detuning.
SectorSolution propagate_one_photon_sector(const PulseSpec& spec, const SystemParams& p,
                                           const TimeGrid& grid, int substeps = 10);

}  // namespace fockscatter
