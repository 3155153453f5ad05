#include "fockscatter/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fockscatter {

namespace {

constexpr double kGaussianCutoff = 1e-8;

double gaussian_peak(const PulseSpec& spec) {
    return 1.0 / std::sqrt(spec.duration * std::sqrt(std::numbers::pi));
}

double gaussian_half_width(const PulseSpec& spec) {
    return spec.duration * std::sqrt(2.0 * std::log(gaussian_peak(spec) / kGaussianCutoff));
}

double support_begin(const PulseSpec& spec) {
    if (spec.shape == PulseShape::Rectangular) return 0.0;
    return std::max(0.0, spec.gaussian_center() - gaussian_half_width(spec));
}

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) throw std::invalid_argument(std::string(what) + " must be finite");
}

}  // namespace

std::string to_string(PulseShape shape) {
    return shape == PulseShape::Rectangular ? "rectangular" : "gaussian";
}

PulseShape pulse_shape_from_string(const std::string& name) {
    if (name == "rectangular" || name == "rect") return PulseShape::Rectangular;
    if (name == "gaussian") return PulseShape::Gaussian;
    throw std::invalid_argument("unknown pulse shape '" + name + "'");
}

void PulseSpec::validate() const {
    if (!(duration > 0.0) || !std::isfinite(duration))
        throw std::invalid_argument("pulse duration must be positive and finite");
    require_finite(carrier_detuning, "carrier detuning");
    if (photon_number != 1 && photon_number != 2)
        throw std::invalid_argument("photon number must be 1 or 2");
}

double PulseSpec::support_end() const {
    if (shape == PulseShape::Rectangular) return duration;
    return gaussian_center() + gaussian_half_width(*this);
}

void TimeGrid::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("time step must be positive");
    if (n_bins == 0) throw std::invalid_argument("time grid has no bins");
}

TimeGrid TimeGrid::covering(const PulseSpec& spec, double dt, double tail, double gamma) {
    if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
    const double span = spec.support_end() + tail / gamma;
    TimeGrid grid;
    grid.dt = dt;
    grid.n_bins = static_cast<std::size_t>(std::ceil(span / dt - 1e-9));
    return grid;
}

cplx sample_envelope(const PulseSpec& spec, double t) {
    require_finite(t, "sample time");
    if (t < 0.0) return 0.0;
    switch (spec.shape) {
        case PulseShape::Rectangular:
            return t <= spec.duration ? 1.0 / std::sqrt(spec.duration) : 0.0;
        case PulseShape::Gaussian: {
            const double x = (t - spec.gaussian_center()) / spec.duration;
            const double value = gaussian_peak(spec) * std::exp(-0.5 * x * x);
            return value < kGaussianCutoff ? 0.0 : value;
        }
    }
    return 0.0;
}

std::vector<cplx> discretize(const PulseSpec& spec, const TimeGrid& grid,
                             const DiscretizeOptions& options) {
    spec.validate();
    grid.validate();
    const double end = spec.support_end();
    if (grid.span() < end * (1.0 - 1e-12))
        throw std::invalid_argument("time grid ends at " + std::to_string(grid.span()) +
                                    " before the pulse support ends at " + std::to_string(end));

    const double begin = support_begin(spec);
    std::size_t inside = 0;
    for (std::size_t k = 0; k < grid.n_bins; ++k) {
        const double tm = grid.midpoint(k);
        if (tm >= begin && tm <= end) ++inside;
    }
    if (inside < options.min_bins_in_support)
        throw std::invalid_argument("time grid too coarse: " + std::to_string(inside) +
                                    " bins inside the pulse support, need " +
                                    std::to_string(options.min_bins_in_support));

    std::vector<cplx> fk(grid.n_bins);
    const double root_dt = std::sqrt(grid.dt);
    double norm2 = 0.0;
    for (std::size_t k = 0; k < grid.n_bins; ++k) {
        fk[k] = sample_envelope(spec, grid.midpoint(k)) * root_dt;
        norm2 += std::norm(fk[k]);
    }
    const double scale = 1.0 / std::sqrt(norm2);
    for (auto& f : fk) f *= scale;
    return fk;
}

std::vector<double> envelope_spectrum(const PulseSpec& spec, std::span<const double> omega_grid) {
    spec.validate();
    std::vector<double> out;
    out.reserve(omega_grid.size());
    double max_abs = 0.0;
    for (double w : omega_grid) {
        require_finite(w, "frequency");
        max_abs = std::max(max_abs, std::abs(w));
    }

    if (spec.shape == PulseShape::Rectangular) {
        const double tp = spec.duration;
        for (double w : omega_grid) {
            const double x = 0.5 * w * tp;
            const double sinc = std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
            out.push_back(tp * sinc * sinc);
        }
        return out;
    }

    // Composite Simpson over the Gaussian support.
    const double a = support_begin(spec);
    const double b = spec.support_end();
    double h = spec.duration / 200.0;
    if (max_abs > 0.0) h = std::min(h, std::numbers::pi / (40.0 * max_abs));
    auto n = static_cast<std::size_t>(std::ceil((b - a) / h));
    if (n % 2 == 1) ++n;
    h = (b - a) / static_cast<double>(n);

    std::vector<double> f(n + 1);
    for (std::size_t i = 0; i <= n; ++i) f[i] = sample_envelope(spec, a + h * static_cast<double>(i)).real();

    for (double w : omega_grid) {
        cplx acc = 0.0;
        for (std::size_t i = 0; i <= n; ++i) {
            const double weight = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
            acc += weight * f[i] * std::polar(1.0, w * (a + h * static_cast<double>(i)));
        }
        acc *= h / 3.0;
        out.push_back(std::norm(acc));
    }
    return out;
}

std::vector<double> sampled_spectrum(std::span<const cplx> f_k, double dt, std::span<const double> omega_grid) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    std::vector<double> out;
    out.reserve(omega_grid.size());
    for (double w : omega_grid) {
        std::complex<long double> acc = 0.0L;
        for (std::size_t k = 0; k < f_k.size(); ++k) {
            const cplx z = f_k[k] * std::polar(1.0, w * dt * static_cast<double>(k));
            acc += std::complex<long double>(z.real(), z.imag());
        }
        out.push_back(static_cast<double>(std::norm(acc)) * dt);
    }
    return out;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t points) {
    if (points < 2) throw std::invalid_argument("frequency grid needs at least two points");
    if (!(hi > lo)) throw std::invalid_argument("frequency grid bounds must be increasing");
    std::vector<double> grid(points);
    const double step = (hi - lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) grid[i] = lo + step * static_cast<double>(i);
    return grid;
}

}  // namespace fockscatter
