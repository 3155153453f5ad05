#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

namespace fockscatter {

using cplx = std::complex<double>;

enum class PulseShape { Rectangular, Gaussian };

std::string to_string(PulseShape shape);
PulseShape pulse_shape_from_string(const std::string& name);

// Quantum pulse description. Times are in units of 1/gamma.
//
// Rectangular: flat envelope of length `duration` starting at t = 0.
// Gaussian: exp(-(t - t_c)^2 / (2 sigma^2)) with sigma = duration and
// t_c = 5 sigma, cut off where the envelope falls below 1e-8.
struct PulseSpec {
    PulseShape shape = PulseShape::Rectangular;
    double duration = 2.0;
    // omega_p - omega_0; enters the dynamics as a shift of the emitter
    // detuning in the frame rotating with the pulse carrier.
    double carrier_detuning = 0.0;
    int photon_number = 1;

    void validate() const;

    // End of the region where the envelope is non-negligible.
    double support_end() const;
    double gaussian_center() const { return 5.0 * duration; }
};

struct TimeGrid {
    double dt = 0.01;
    std::size_t n_bins = 0;

    double time(std::size_t k) const { return static_cast<double>(k) * dt; }
    double midpoint(std::size_t k) const { return (static_cast<double>(k) + 0.5) * dt; }
    double span() const { return static_cast<double>(n_bins) * dt; }

    void validate() const;

    // Grid covering the pulse support followed by `tail` (in 1/gamma).
    static TimeGrid covering(const PulseSpec& spec, double dt, double tail, double gamma = 1.0);
};

struct DiscretizeOptions {
    std::size_t min_bins_in_support = 20;
};

// Continuous envelope f(t), normalised so that the integral of |f|^2 is 1.
cplx sample_envelope(const PulseSpec& spec, double t);

// Bin amplitudes f_k = f(t_k + dt/2) sqrt(dt), renormalised so sum |f_k|^2 = 1.
std::vector<cplx> discretize(const PulseSpec& spec, const TimeGrid& grid,
                             const DiscretizeOptions& options = {});

// |f(omega)|^2 with f(omega) = int f(t) exp(i (omega - omega_p) t) dt, evaluated
// on offsets omega - omega_p.
std::vector<double> envelope_spectrum(const PulseSpec& spec, std::span<const double> omega_grid);

// Bin-sum counterpart of envelope_spectrum for sampled amplitudes:
// dt |sum_k f_k exp(i omega t_k)|^2. This is the spectrum the simulation
// actually receives; it differs from the continuous one by O((omega dt)^2).
std::vector<double> sampled_spectrum(std::span<const cplx> f_k, double dt, std::span<const double> omega_grid);

// Uniform frequency grid [lo, hi] with `points` samples.
std::vector<double> linear_grid(double lo, double hi, std::size_t points);

}  // namespace fockscatter
