#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fockscatter/analytic.hpp"
#include "fockscatter/pulse.hpp"

namespace fockscatter {

using Matrix = Eigen::MatrixXcd;

// One MPS site: a (left bond x right bond) matrix per physical index.
using SiteTensor = std::vector<Matrix>;

struct CollisionConfig {
    double dt = 0.01;
    std::size_t n_bins = 0;
    std::size_t chi_max = 32;
    double svd_tol = 1e-10;
    int bin_cutoff = 2;
    double truncation_budget = 1e-6;
    // When false the emitter is decoupled (gamma -> 0 in the collision unitary).
    bool coupling = true;

    void validate(int photon_number) const;
    TimeGrid grid() const { return {dt, n_bins}; }
};

// Emitter plus waveguide time bins. Sites are ordered
//   [scattered bins][emitter][unscattered bins]
// so the emitter position equals the number of bins already scattered.
// Sites left of `center` are left-isometric, sites right of it right-isometric.
struct TimeBinState {
    std::vector<SiteTensor> sites;
    std::size_t emitter_position = 0;
    std::size_t center = 0;
    int bin_dim = 2;
    double dt = 0.01;
    double truncation_error = 0.0;

    std::size_t n_bins() const { return sites.empty() ? 0 : sites.size() - 1; }
    std::size_t scattered_bins() const { return emitter_position; }
    std::size_t bin_position(std::size_t k) const { return k < emitter_position ? k : k + 1; }
    std::vector<std::size_t> bond_dimensions() const;
    std::size_t max_bond_dimension() const;
    double norm_squared() const;
};

// Truncated bosonic annihilator on {0..cutoff}.
Matrix annihilation_operator(int cutoff);
Matrix number_operator(int cutoff);
// Emitter operators in the basis {g, e}.
Matrix sigma_minus();
Matrix sigma_plus_sigma_minus();

// Fock state (sum_k f_k b_k^dag)^n / sqrt(n!) on the bins, emitter in its
// ground state at site 0, right-canonicalised with the centre on the emitter.
TimeBinState build_input_mps(std::span<const cplx> f_k, int photon_number, const CollisionConfig& cfg);

// exp(-i delta sigma+ sigma- dt + sqrt(gamma dt) (sigma+ b - sigma- b^dag)) on
// the emitter (x) bin space, basis index = emitter * (cutoff + 1) + photons.
Matrix collision_unitary(const SystemParams& p, double dt, int bin_cutoff);

// True when gamma dt is large enough for the first-order collision error to matter.
bool collision_step_is_coarse(const SystemParams& p, double dt);

struct StepRecord {
    double time = 0.0;  // end of the collision window
    double emitter_population = 0.0;
    double bin_occupation = 0.0;  // <b_k^dag b_k> of the bin just scattered
    double norm_squared = 1.0;
    double excitation_number = 0.0;
    std::size_t bond_dimension = 1;
};

// Collides the emitter with bin k (which must be the next unscattered bin)
// and moves the emitter past it. The emitter site must be the centre.
StepRecord step(TimeBinState& state, std::size_t k, const Matrix& unitary, const CollisionConfig& cfg);

struct EvolutionResult {
    TimeBinState state;
    std::vector<StepRecord> steps;
    std::vector<double> input_occupations;
    double initial_norm_squared = 1.0;
    std::size_t max_bond_dimension = 1;
    bool budget_exceeded = false;
    std::vector<std::string> warnings;
};

EvolutionResult evolve(TimeBinState state, const SystemParams& p, const CollisionConfig& cfg,
                       double carrier_detuning = 0.0);

// <O> on the site at `position`.
cplx expectation_local(const TimeBinState& state, std::size_t position, const Matrix& op);

// <b_k^dag b_k> for every bin, in one sweep.
std::vector<double> bin_occupations(const TimeBinState& state);

// <Delta B_j^dag Delta B_k> / dt^2 between two scattered bins.
cplx two_point_correlation(const TimeBinState& state, std::size_t j, std::size_t k);

// Dense v_g <a^dag(t_j) a(t_k)> over all scattered bins. Upper triangle by
// transfer-matrix sweeps, lower triangle mirrored.
Matrix output_correlations(const TimeBinState& state);

void save_checkpoint(const TimeBinState& state, const std::filesystem::path& path);
TimeBinState load_checkpoint(const std::filesystem::path& path);

}  // namespace fockscatter
