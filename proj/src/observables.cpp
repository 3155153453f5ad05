#include "fockscatter/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace fockscatter {

namespace {

// Runs body(i) for i in [0, n) on a few threads; each index is independent.
template <typename Body>
void parallel_for(std::size_t n, Body body) {
    const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 16);
    if (workers == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) body(i);
        });
}

// Spectral sums cancel down to ~1e-12 of their peak in the far tails, so they
// accumulate in extended precision.
using wide = std::complex<long double>;

wide widen(const cplx& v) { return {v.real(), v.imag()}; }

// exp(i delta l dt) for l = 0..n-1.
std::vector<cplx> phase_table(double delta, double dt, std::size_t n) {
    std::vector<cplx> z(n);
    for (std::size_t l = 0; l < n; ++l) z[l] = std::polar(1.0, delta * dt * static_cast<double>(l));
    return z;
}

void check_grid(std::span<const double> omega_grid) {
    for (double w : omega_grid)
        if (!std::isfinite(w)) throw std::invalid_argument("frequency grid must be finite");
}

std::vector<std::size_t> sample_indices(std::size_t last, std::size_t stride, bool include_last) {
    if (stride == 0) throw std::invalid_argument("stride must be positive");
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i <= last; i += stride) idx.push_back(i);
    if (include_last && idx.back() != last) idx.push_back(last);
    return idx;
}

}  // namespace

double CorrelationMatrix::photon_number() const { return values.diagonal().real().sum() * grid.dt; }

double CorrelationMatrix::tail_ratio() const {
    if (values.rows() == 0) return 0.0;
    const double peak = values.diagonal().real().maxCoeff();
    if (peak <= 0.0) return 0.0;
    return values(values.rows() - 1, values.rows() - 1).real() / peak;
}

std::string to_string(SpectrumKind kind) {
    return kind == SpectrumKind::TimeDependentSpectrum ? "S" : "I";
}

CorrelationMatrix correlation_matrix(const TimeBinState& state) {
    CorrelationMatrix g;
    g.grid = {state.dt, state.scattered_bins()};
    g.values = output_correlations(state);
    return g;
}

SpectrumResult stationary_spectrum(const CorrelationMatrix& g, std::span<const double> omega_grid) {
    check_grid(omega_grid);
    const std::size_t n = g.size();
    const double dt = g.grid.dt;

    // The stationary spectrum depends on G only through its lag sums.
    std::vector<wide> upper(n, 0.0L), lower(n, 0.0L);
    for (std::size_t j = 0; j < n; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        for (std::size_t k = j; k < n; ++k) {
            const auto kk = static_cast<Eigen::Index>(k);
            upper[k - j] += widen(g.values(jj, kk));
            lower[k - j] += widen(g.values(kk, jj));
        }
    }

    auto evaluate = [&](double w, double* imag) {
        wide one_sided = 0.5L * upper[0];
        wide other_side = 0.5L * lower[0];
        for (std::size_t l = 1; l < n; ++l) {
            const wide z = widen(std::polar(1.0, w * dt * static_cast<double>(l)));
            one_sided += upper[l] * z;
            other_side += lower[l] * std::conj(z);
        }
        if (imag) *imag = static_cast<double>(std::abs((one_sided + other_side).imag())) * dt * dt;
        return static_cast<double>(2.0L * one_sided.real()) * dt * dt;
    };

    SpectrumResult out;
    out.omega_grid.assign(omega_grid.begin(), omega_grid.end());
    out.values.resize(omega_grid.size());
    std::vector<double> imag(omega_grid.size());
    parallel_for(omega_grid.size(), [&](std::size_t i) { out.values[i] = evaluate(omega_grid[i], &imag[i]); });

    double peak = 0.0;
    for (double v : out.values) peak = std::max(peak, std::abs(v));
    for (double v : imag) out.max_imag_residue = std::max(out.max_imag_residue, peak > 0.0 ? v / peak : v);

    // Periodic trapezoid over one full band is exact for this trigonometric polynomial.
    if (n > 0) {
        const std::size_t m = 2 * n;
        const double step = 2.0 * std::numbers::pi / (dt * static_cast<double>(m));
        std::vector<double> band(m);
        parallel_for(m, [&](std::size_t i) {
            band[i] = evaluate(-std::numbers::pi / dt + step * static_cast<double>(i), nullptr);
        });
        double sum = 0.0;
        for (double v : band) sum += v;
        out.band_integral = sum * step / (2.0 * std::numbers::pi);
    }

    out.tail_ratio = g.tail_ratio();
    out.tail_ok = out.tail_ratio < kTailThreshold;
    if (!out.tail_ok)
        out.warnings.push_back("output flux at the grid end is " + std::to_string(out.tail_ratio) +
                               " of its peak; the emission tail is cut off");
    return out;
}

DynamicalSpectrum time_dependent_spectrum(const CorrelationMatrix& g, std::span<const double> omega_grid,
                                          std::size_t stride) {
    check_grid(omega_grid);
    const std::size_t n = g.size();
    const double dt = g.grid.dt;
    const auto counts = sample_indices(n, stride, true);

    DynamicalSpectrum out;
    out.kind = SpectrumKind::TimeDependentSpectrum;
    out.omega_grid.assign(omega_grid.begin(), omega_grid.end());
    for (std::size_t c : counts) out.time_grid.push_back(dt * static_cast<double>(c));
    out.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(omega_grid.size()),
                                       static_cast<Eigen::Index>(counts.size()));

    parallel_for(omega_grid.size(), [&](std::size_t i) {
        const auto z = phase_table(omega_grid[i], dt, n);
        long double running = 0.0L;
        std::size_t next = 0;
        const auto row = static_cast<Eigen::Index>(i);
        for (std::size_t c = 0; c <= n; ++c) {
            // Add column c-1 (pairs whose later index is c-1).
            if (c > 0) {
                const std::size_t k = c - 1;
                const auto kk = static_cast<Eigen::Index>(k);
                wide col = 0.5L * widen(g.values(kk, kk));
                for (std::size_t j = 0; j < k; ++j)
                    col += widen(g.values(static_cast<Eigen::Index>(j), kk)) * widen(z[k - j]);
                running += 2.0L * col.real();
            }
            if (next < counts.size() && counts[next] == c) {
                out.values(row, static_cast<Eigen::Index>(next)) = static_cast<double>(running) * dt * dt;
                ++next;
            }
        }
    });
    return out;
}

DynamicalSpectrum spectral_intensity(const CorrelationMatrix& g, std::span<const double> omega_grid,
                                     std::size_t stride) {
    check_grid(omega_grid);
    const std::size_t n = g.size();
    const double dt = g.grid.dt;

    DynamicalSpectrum out;
    out.kind = SpectrumKind::SpectralIntensity;
    out.omega_grid.assign(omega_grid.begin(), omega_grid.end());
    if (n == 0) return out;
    const auto rows = sample_indices(n - 1, stride, false);
    for (std::size_t j : rows) out.time_grid.push_back(dt * static_cast<double>(j));
    out.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(omega_grid.size()),
                                       static_cast<Eigen::Index>(rows.size()));

    parallel_for(omega_grid.size(), [&](std::size_t i) {
        const auto z = phase_table(omega_grid[i], dt, n);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const std::size_t j = rows[r];
            const auto jj = static_cast<Eigen::Index>(j);
            // G[j][k] = conj(G[k][j]); walk column j for contiguous access.
            wide acc = 0.5L * widen(g.values(jj, jj));
            for (std::size_t k = j + 1; k < n; ++k)
                acc += widen(std::conj(g.values(static_cast<Eigen::Index>(k), jj))) * widen(z[k - j]);
            out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(r)) = static_cast<double>(2.0L * acc.real()) * dt;
        }
    });
    return out;
}

std::vector<double> integrate_over_time(const DynamicalSpectrum& intensity, double dt) {
    if (intensity.kind != SpectrumKind::SpectralIntensity)
        throw std::invalid_argument("time integration expects a spectral intensity");
    std::vector<double> out(static_cast<std::size_t>(intensity.values.rows()));
    for (Eigen::Index i = 0; i < intensity.values.rows(); ++i) {
        long double sum = 0.0L;
        for (Eigen::Index j = 0; j < intensity.values.cols(); ++j) sum += intensity.values(i, j);
        out[static_cast<std::size_t>(i)] = static_cast<double>(sum) * dt;
    }
    return out;
}

PopulationSeries population_series(const std::vector<StepRecord>& steps, std::string label) {
    PopulationSeries series;
    series.label = std::move(label);
    series.times.reserve(steps.size() + 1);
    series.values.reserve(steps.size() + 1);
    series.times.push_back(0.0);
    series.values.push_back(0.0);
    for (const auto& rec : steps) {
        series.times.push_back(rec.time);
        series.values.push_back(rec.emitter_population);
    }
    return series;
}

PopulationSeries output_flux(const std::vector<StepRecord>& steps, double dt, std::string label) {
    PopulationSeries series;
    series.label = std::move(label);
    series.times.reserve(steps.size());
    series.values.reserve(steps.size());
    for (std::size_t k = 0; k < steps.size(); ++k) {
        series.times.push_back((static_cast<double>(k) + 0.5) * dt);
        series.values.push_back(steps[k].bin_occupation / dt);
    }
    return series;
}

}  // namespace fockscatter
