#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "fockscatter/mps.hpp"

using namespace fockscatter;

namespace {

CollisionConfig small_config(std::size_t n_bins, int cutoff, double dt = 0.1) {
    CollisionConfig cfg;
    cfg.dt = dt;
    cfg.n_bins = n_bins;
    cfg.bin_cutoff = cutoff;
    return cfg;
}

std::vector<cplx> uniform_amplitudes(std::size_t n) {
    return std::vector<cplx>(n, cplx(1.0 / std::sqrt(static_cast<double>(n)), 0.0));
}

// Contract every site into a dense vector, site 0 most significant.
Eigen::VectorXcd dense(const TimeBinState& s) {
    std::vector<Matrix> partial{Matrix::Identity(1, 1)};
    for (const auto& site : s.sites) {
        std::vector<Matrix> next;
        next.reserve(partial.size() * site.size());
        for (const auto& p : partial)
            for (const auto& a : site) next.push_back(p * a);
        partial = std::move(next);
    }
    Eigen::VectorXcd v(static_cast<Eigen::Index>(partial.size()));
    for (std::size_t i = 0; i < partial.size(); ++i) v(static_cast<Eigen::Index>(i)) = partial[i](0, 0);
    return v;
}

// Applies `op` to the site at `position` of a dense vector.
Eigen::VectorXcd apply_dense(const TimeBinState& s, const Eigen::VectorXcd& v, std::size_t position,
                             const Matrix& op) {
    std::size_t inner = 1;
    for (std::size_t i = position + 1; i < s.sites.size(); ++i) inner *= s.sites[i].size();
    const std::size_t d = s.sites[position].size();
    const std::size_t outer = static_cast<std::size_t>(v.size()) / (inner * d);
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(v.size());
    for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b) {
                const cplx m = op(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
                if (m == cplx(0.0)) continue;
                for (std::size_t i = 0; i < inner; ++i)
                    out(static_cast<Eigen::Index>((o * d + a) * inner + i)) +=
                        m * v(static_cast<Eigen::Index>((o * d + b) * inner + i));
            }
    return out;
}

}  // namespace

TEST_CASE("input Fock state has the right norm and photon number") {
    for (int n : {1, 2}) {
        const auto cfg = small_config(6, n + 1);
        const auto state = build_input_mps(uniform_amplitudes(6), n, cfg);
        CHECK(state.norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
        double total = 0.0;
        for (double v : bin_occupations(state)) total += v;
        CHECK(total == doctest::Approx(n).epsilon(1e-12));
        CHECK(state.max_bond_dimension() <= static_cast<std::size_t>(n + 1));
    }
}

TEST_CASE("photon in a single bin is a product state") {
    std::vector<cplx> f(5, cplx(0.0));
    f[2] = 1.0;
    const auto state = build_input_mps(f, 1, small_config(5, 2));
    CHECK(state.max_bond_dimension() == 1);
    CHECK(bin_occupations(state)[2] == doctest::Approx(1.0));
}

TEST_CASE("input rejects bad amplitudes and cutoffs") {
    CHECK_THROWS(build_input_mps(std::vector<cplx>(4, cplx(1.0)), 1, small_config(4, 2)));
    CHECK_THROWS(build_input_mps(uniform_amplitudes(3), 1, small_config(4, 2)));
    CHECK_THROWS(build_input_mps(uniform_amplitudes(4), 2, small_config(4, 1)));
}

TEST_CASE("collision unitary") {
    const SystemParams p{1.0, 0.3};
    const Matrix u = collision_unitary(p, 0.1, 2);
    CHECK((u.adjoint() * u - Matrix::Identity(6, 6)).norm() < 1e-12);

    // Decoupled emitter: diagonal phases only.
    const Matrix u0 = collision_unitary(SystemParams{0.0, 0.3}, 0.1, 2);
    Matrix expected = Matrix::Identity(6, 6);
    for (int i = 3; i < 6; ++i) expected(i, i) = std::exp(cplx(0.0, -0.03));
    CHECK((u0 - expected).norm() < 1e-12);

    // Excited emitter, empty bin: |e,0> -> cos(sqrt(gamma dt))|e,0> - sin(...)|g,1>.
    const double x = std::sqrt(0.1);
    const Matrix u1 = collision_unitary(SystemParams{1.0, 0.0}, 0.1, 2);
    CHECK(std::abs(u1(3, 3) - std::cos(x)) < 1e-12);
    CHECK(std::abs(u1(1, 3) + std::sin(x)) < 1e-12);

    CHECK(collision_step_is_coarse(SystemParams{}, 0.1));
    CHECK_FALSE(collision_step_is_coarse(SystemParams{}, 0.01));
}

TEST_CASE("vacuum is a fixed point") {
    const auto cfg = small_config(10, 2);
    auto state = build_input_mps(uniform_amplitudes(10), 0, cfg);
    const auto result = evolve(state, SystemParams{}, cfg);
    for (const auto& r : result.steps) {
        CHECK(r.emitter_population < 1e-14);
        CHECK(r.excitation_number < 1e-14);
    }
}

TEST_CASE("evolution conserves excitations and keeps bonds small") {
    for (int n : {1, 2}) {
        auto cfg = small_config(60, n + 1, 0.05);
        std::vector<cplx> f(60, cplx(0.0));
        for (std::size_t k = 0; k < 20; ++k) f[k] = 1.0 / std::sqrt(20.0);
        const auto result = evolve(build_input_mps(f, n, cfg), SystemParams{}, cfg);
        for (const auto& r : result.steps) {
            CHECK(r.excitation_number == doctest::Approx(n).epsilon(1e-10));
            CHECK(r.norm_squared == doctest::Approx(1.0).epsilon(1e-10));
        }
        CHECK(result.max_bond_dimension <= 4);
        CHECK(result.state.scattered_bins() == 60);
    }
}

TEST_CASE("one photon results do not depend on the cutoff") {
    std::vector<cplx> f(40, cplx(0.0));
    for (std::size_t k = 0; k < 20; ++k) f[k] = 1.0 / std::sqrt(20.0);
    std::vector<double> pops[2];
    for (int cutoff : {1, 2}) {
        const auto cfg = small_config(40, cutoff, 0.05);
        for (const auto& r : evolve(build_input_mps(f, 1, cfg), SystemParams{}, cfg).steps)
            pops[cutoff - 1].push_back(r.emitter_population);
    }
    for (std::size_t i = 0; i < pops[0].size(); ++i) CHECK(std::abs(pops[0][i] - pops[1][i]) < 1e-12);
}

TEST_CASE("scattered bins are untouched by later collisions") {
    const auto cfg = small_config(30, 2, 0.05);
    std::vector<cplx> f(30, cplx(0.0));
    for (std::size_t k = 0; k < 10; ++k) f[k] = 1.0 / std::sqrt(10.0);
    auto state = build_input_mps(f, 1, cfg);
    const Matrix u = collision_unitary(SystemParams{}, cfg.dt, cfg.bin_cutoff);
    for (std::size_t k = 0; k < 12; ++k) step(state, k, u, cfg);
    const auto before = bin_occupations(state);
    for (std::size_t k = 12; k < 30; ++k) step(state, k, u, cfg);
    const auto after = bin_occupations(state);
    for (std::size_t k = 0; k < 12; ++k) CHECK(std::abs(before[k] - after[k]) < 1e-12);
    CHECK_THROWS(step(state, 5, u, cfg));
}

TEST_CASE("first collision excites the emitter by gamma dt |f_0|^2") {
    const auto cfg = small_config(5, 2, 0.01);
    std::vector<cplx> f(5, cplx(0.0));
    f[0] = 1.0;
    auto state = build_input_mps(f, 1, cfg);
    const auto rec = step(state, 0, collision_unitary(SystemParams{}, cfg.dt, 2), cfg);
    CHECK(rec.emitter_population == doctest::Approx(std::pow(std::sin(0.1), 2)).epsilon(1e-12));
}

TEST_CASE("two-point correlations match a dense state") {
    for (int n : {1, 2}) {
        const auto cfg = small_config(5, n + 1, 0.2);
        std::vector<cplx> f{0.5, cplx(0.3, 0.4), 0.5, cplx(0.1, -0.2), 0.0};
        double norm = 0.0;
        for (const auto& v : f) norm += std::norm(v);
        for (auto& v : f) v /= std::sqrt(norm);
        const auto result = evolve(build_input_mps(f, n, cfg), SystemParams{1.0, 0.4}, cfg);
        const auto& s = result.state;
        const auto psi = dense(s);
        const Matrix b = annihilation_operator(cfg.bin_cutoff);
        const Matrix g = output_correlations(s);
        CHECK((g - g.adjoint()).norm() < 1e-12);
        for (std::size_t j = 0; j < 5; ++j)
            for (std::size_t k = 0; k < 5; ++k) {
                const auto bk = apply_dense(s, psi, s.bin_position(k), b);
                const auto bj = apply_dense(s, psi, s.bin_position(j), b);
                const cplx expected = bj.dot(bk) / cfg.dt;
                CHECK(std::abs(two_point_correlation(s, j, k) - expected) < 1e-10);
                CHECK(std::abs(g(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) - expected) < 1e-10);
            }
    }
}

TEST_CASE("correlations require scattered bins") {
    const auto cfg = small_config(4, 2);
    auto state = build_input_mps(uniform_amplitudes(4), 1, cfg);
    CHECK_THROWS(two_point_correlation(state, 0, 1));
    CHECK_THROWS(expectation_local(state, 0, Matrix::Identity(3, 3)));
}

TEST_CASE("checkpoint round-trip is bit exact") {
    const auto cfg = small_config(8, 3, 0.1);
    const auto result = evolve(build_input_mps(uniform_amplitudes(8), 2, cfg), SystemParams{}, cfg);
    const auto path = std::filesystem::temp_directory_path() / "fockscatter_checkpoint_test.mps";
    save_checkpoint(result.state, path);
    const auto loaded = load_checkpoint(path);
    REQUIRE(loaded.sites.size() == result.state.sites.size());
    CHECK(loaded.emitter_position == result.state.emitter_position);
    CHECK(loaded.center == result.state.center);
    CHECK(loaded.dt == result.state.dt);
    for (std::size_t i = 0; i < loaded.sites.size(); ++i)
        for (std::size_t s = 0; s < loaded.sites[i].size(); ++s)
            CHECK(loaded.sites[i][s] == result.state.sites[i][s]);

    std::ofstream(path, std::ios::binary) << "garbage";
    CHECK_THROWS(load_checkpoint(path));
    std::filesystem::remove(path);
}
