#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fockscatter/analytic.hpp"

using namespace fockscatter;

TEST_CASE("frozen closed-form populations") {
    const SystemParams p;
    CHECK(n_tls_one_photon(p, 2.0, 2.0) == doctest::Approx(0.79915).epsilon(1e-5));
    CHECK(n_tls_one_photon(p, 2.0, 3.0) == doctest::Approx(0.29399).epsilon(1e-4));
    CHECK(n_tls_two_photon(p, 2.0, 2.0) == doctest::Approx(0.75586).epsilon(1e-5));
    CHECK(n_tls_one_photon(p, 2.0, 0.0) == 0.0);
    CHECK(n_tls_two_photon(p, 2.0, 0.0) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("closed forms are continuous at the pulse end") {
    const SystemParams p;
    for (double tp : {0.5, 2.0, 10.0}) {
        const double eps = 1e-12;
        CHECK(std::abs(n_tls_one_photon(p, tp, tp - eps) - n_tls_one_photon(p, tp, tp + eps)) < 1e-10);
        CHECK(std::abs(n_tls_two_photon(p, tp, tp - eps) - n_tls_two_photon(p, tp, tp + eps)) < 1e-10);
    }
}

TEST_CASE("one photon peaks higher than two") {
    const SystemParams p;
    double max1 = 0.0, max2 = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        const double t = 0.01 * i;
        max1 = std::max(max1, n_tls_one_photon(p, 2.0, t));
        max2 = std::max(max2, n_tls_two_photon(p, 2.0, t));
    }
    CHECK(max1 > max2);
}

TEST_CASE("flux after the pulse equals gamma times population") {
    const SystemParams p{1.3, 0.0};
    for (double t : {2.5, 4.0, 9.0}) {
        CHECK(flux_after_pulse(p, 2.0, t) == doctest::Approx(p.gamma * n_tls_one_photon(p, 2.0, t)).epsilon(1e-12));
        CHECK(correlation_after_pulse(p, 2.0, t, 0.0).real() == doctest::Approx(flux_after_pulse(p, 2.0, t)));
    }
    CHECK_THROWS_AS(flux_after_pulse(p, 2.0, 1.0), OutOfDomain);
    CHECK_THROWS_AS(correlation_after_pulse(p, 2.0, 2.0, 0.5), OutOfDomain);
}

TEST_CASE("correlation decays with the lag") {
    const SystemParams p;
    const double g0 = correlation_after_pulse(p, 2.0, 3.0, 0.0).real();
    const double g1 = correlation_after_pulse(p, 2.0, 3.0, 1.0).real();
    CHECK(g1 / g0 == doctest::Approx(std::exp(-0.5)));
}

TEST_CASE("invalid parameters are rejected") {
    CHECK_THROWS((SystemParams{-1.0, 0.0}.validate()));
    CHECK_THROWS(n_tls_one_photon(SystemParams{}, -1.0, 1.0));
    PulseSpec spec;
    spec.photon_number = 2;
    const std::vector<double> omega{0.0};
    CHECK_THROWS_AS(stationary_spectrum_one_photon(spec, SystemParams{}, omega), UnsupportedConfiguration);
}

TEST_CASE("sector ODE reproduces the closed form") {
    const SystemParams p;
    PulseSpec spec;
    spec.duration = 2.0;
    const TimeGrid grid{1e-3, 10000};
    const auto sol = propagate_one_photon_sector(spec, p, grid);
    double err = 0.0;
    for (std::size_t i = 0; i < sol.population.times.size(); ++i)
        err = std::max(err, std::abs(sol.population.values[i] - n_tls_one_photon(p, 2.0, sol.population.times[i])));
    CHECK(err < 1e-6);
    CHECK(sol.output_norm == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("sector ODE conserves the photon for a gaussian pulse") {
    PulseSpec spec;
    spec.shape = PulseShape::Gaussian;
    spec.duration = 1.0;
    const auto grid = TimeGrid::covering(spec, 0.01, 16.0);
    const auto sol = propagate_one_photon_sector(spec, SystemParams{}, grid);
    CHECK(std::abs(sol.output_norm - 1.0) < 1e-6);
}

TEST_CASE("sector ODE rejects odd substeps and bad rates") {
    PulseSpec spec;
    CHECK_THROWS(propagate_one_photon_sector(spec, SystemParams{}, TimeGrid{0.01, 500}, 3));
    CHECK_THROWS(propagate_one_photon_sector(spec, SystemParams{0.0, 0.0}, TimeGrid{0.01, 500}));
}
