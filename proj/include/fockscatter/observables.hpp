#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "fockscatter/analytic.hpp"
#include "fockscatter/mps.hpp"

namespace fockscatter {

// G[j][k] = v_g <a_R^dag(t_j) a_R(t_k)> over the output bins, in flux units.
struct CorrelationMatrix {
    TimeGrid grid;
    Matrix values;

    std::size_t size() const { return static_cast<std::size_t>(values.rows()); }
    // sum_j G[j][j] dt
    double photon_number() const;
    // G[N-1][N-1] relative to the largest diagonal entry.
    double tail_ratio() const;
};

enum class SpectrumKind { TimeDependentSpectrum, SpectralIntensity };
std::string to_string(SpectrumKind kind);

// values(i, m): frequency omega_grid[i], time time_grid[m].
struct DynamicalSpectrum {
    std::vector<double> omega_grid;
    std::vector<double> time_grid;
    Eigen::MatrixXd values;
    SpectrumKind kind = SpectrumKind::TimeDependentSpectrum;
};

struct SpectrumResult {
    std::vector<double> omega_grid;
    std::vector<double> values;
    double band_integral = 0.0;       // (1/2pi) int S d omega over the full band |omega| < pi/dt
    double max_imag_residue = 0.0;    // |Im| of the un-projected sums relative to the peak
    double tail_ratio = 0.0;
    bool tail_ok = true;
    std::vector<std::string> warnings;
};

constexpr double kTailThreshold = 1e-4;

CorrelationMatrix correlation_matrix(const TimeBinState& state);

// Spectra are all built from the one-sided correlation sum
//   2 Re sum_{j <= k} w_jk G[j][k] exp(i Delta (t_k - t_j)) dt^2,  w_jj = 1/2,
// so that S equals the full two-time Fourier transform of the output field.
SpectrumResult stationary_spectrum(const CorrelationMatrix& g, std::span<const double> omega_grid);

// S(omega, t) at t = 0, stride dt, 2 stride dt, ..., N dt (the grid end is
// always included). At time c dt the sum covers bins 0..c-1.
DynamicalSpectrum time_dependent_spectrum(const CorrelationMatrix& g, std::span<const double> omega_grid,
                                          std::size_t stride = 1);

// I(omega, t_j) for t_j = j dt, j = 0, stride, ... < N, tau integral cut at the grid end.
DynamicalSpectrum spectral_intensity(const CorrelationMatrix& g, std::span<const double> omega_grid,
                                     std::size_t stride = 1);

// Bin sum over time, sum_j I(omega, t_j) dt, of a stride-1 intensity.
std::vector<double> integrate_over_time(const DynamicalSpectrum& intensity, double dt);

PopulationSeries population_series(const std::vector<StepRecord>& steps, std::string label = "mps");

// n_R^out = <Delta B_k^dag Delta B_k> / dt^2 at bin midpoints.
PopulationSeries output_flux(const std::vector<StepRecord>& steps, double dt, std::string label = "mps");

}  // namespace fockscatter
