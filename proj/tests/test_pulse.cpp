#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fockscatter/pulse.hpp"

using namespace fockscatter;

TEST_CASE("rectangular envelope samples") {
    PulseSpec spec;
    spec.duration = 2.0;
    CHECK(std::abs(sample_envelope(spec, 1.0)) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(std::abs(sample_envelope(spec, 3.0)) == 0.0);
    CHECK(std::abs(sample_envelope(spec, -0.1)) == 0.0);
    CHECK_THROWS(sample_envelope(spec, std::nan("")));
}

TEST_CASE("discretised rectangular amplitudes are uniform and normalised") {
    PulseSpec spec;
    spec.duration = 2.0;
    const TimeGrid grid{0.01, 400};
    const auto f = discretize(spec, grid);
    REQUIRE(f.size() == 400);
    double norm = 0.0;
    for (const auto& v : f) norm += std::norm(v);
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(f[0]) == doctest::Approx(0.0707107).epsilon(1e-5));
    CHECK(std::abs(f[199]) == doctest::Approx(0.0707107).epsilon(1e-5));
    CHECK(std::abs(f[200]) == 0.0);
}

TEST_CASE("discretisation rejects coarse or clipped grids") {
    PulseSpec spec;
    spec.duration = 0.1;
    CHECK_THROWS(discretize(spec, TimeGrid{0.01, 100}));  // 10 bins in support
    spec.duration = 2.0;
    CHECK_THROWS(discretize(spec, TimeGrid{0.01, 150}));  // ends inside the pulse
    CHECK_THROWS(TimeGrid{0.0, 10}.validate());
}

TEST_CASE("gaussian norm is independent of dt") {
    PulseSpec spec;
    spec.shape = PulseShape::Gaussian;
    spec.duration = 1.0;
    for (double dt : {0.02, 0.01, 0.005}) {
        const auto grid = TimeGrid::covering(spec, dt, 8.0);
        const auto f = discretize(spec, grid);
        double norm = 0.0;
        for (const auto& v : f) norm += std::norm(v);
        CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
        const std::size_t centre = static_cast<std::size_t>(spec.gaussian_center() / dt);
        CHECK(std::abs(f[centre]) / std::sqrt(dt) ==
              doctest::Approx(std::pow(std::numbers::pi, -0.25)).epsilon(1e-3));
    }
}

TEST_CASE("envelope spectrum obeys Parseval") {
    for (auto shape : {PulseShape::Rectangular, PulseShape::Gaussian}) {
        PulseSpec spec;
        spec.shape = shape;
        spec.duration = 2.0;
        // sinc^2 tails need a wide window; the gaussian is negligible beyond |omega| = 20.
        const double w = shape == PulseShape::Rectangular ? 200.0 : 20.0;
        const auto omega = linear_grid(-w, w, shape == PulseShape::Rectangular ? 40001 : 2001);
        const auto s = envelope_spectrum(spec, omega);
        double total = 0.0;
        for (std::size_t i = 0; i + 1 < omega.size(); ++i)
            total += 0.5 * (s[i] + s[i + 1]) * (omega[i + 1] - omega[i]);
        CHECK(total / (2.0 * std::numbers::pi) == doctest::Approx(1.0).epsilon(2e-3));
    }
}

TEST_CASE("rectangular spectrum at the carrier equals t_p") {
    PulseSpec spec;
    spec.duration = 2.0;
    const std::vector<double> omega{0.0, std::numbers::pi};
    const auto s = envelope_spectrum(spec, omega);
    CHECK(s[0] == doctest::Approx(2.0));
    CHECK(s[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("shape names round-trip") {
    CHECK(pulse_shape_from_string(to_string(PulseShape::Gaussian)) == PulseShape::Gaussian);
    CHECK_THROWS(pulse_shape_from_string("triangle"));
}
