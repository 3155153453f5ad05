#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fockscatter/experiment.hpp"

using namespace fockscatter;
namespace fsys = std::filesystem;

namespace {

ExperimentConfig quick_config(const fsys::path& dir) {
    auto c = parse_config(R"(
[pulse]
duration = 1.0
[numerics]
dt = 0.05
[observables]
omega_min = -5.0
omega_max = 5.0
omega_points = 21
time_stride = 4
)");
    c.outputs.directory = dir;
    return c;
}

std::string slurp(const fsys::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fsys::path scratch(const std::string& name) {
    const auto dir = fsys::temp_directory_path() / ("fockscatter_test_" + name);
    fsys::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("run writes artifacts and passes its own checks") {
    const auto dir = scratch("run");
    auto config = quick_config(dir);
    config.outputs.no_tls = true;
    config.outputs.checkpoint = true;
    config.numerics.dt = 0.01;
    const auto report = run(config);
    for (const auto& c : report.checks) {
        INFO(format_check(c));
        if (c.name.ends_with("no_tls_negative_running_spectrum")) {
            // The running spectrum of a free pulse is a squared modulus.
            CHECK_FALSE(c.passed);
            CHECK(c.simulated >= 0.0);
        } else {
            CHECK(c.passed);
        }
    }

    const auto label = expand_cases(config).front().label;
    for (const char* f : {"population.csv", "flux.csv", "input_spectrum.csv", "stationary_spectrum.csv",
                          "dynamical_spectrum.csv", "final_state.mps"})
        CHECK(fsys::exists(dir / label / f));
    CHECK(fsys::exists(dir / label / "no_tls" / "stationary_spectrum.csv"));
    CHECK(fsys::exists(dir / "report.json"));

    const auto json = nlohmann::json::parse(slurp(dir / "report.json"));
    CHECK(json["schema_version"] == ValidationReport::kSchemaVersion);
    CHECK(json["status"] == (report.passed() ? "pass" : "fail"));
    CHECK(json["checks"].size() == report.checks.size());

    std::istringstream pop(slurp(dir / label / "population.csv"));
    std::string line;
    while (std::getline(pop, line) && line.rfind("# ", 0) == 0) {
    }
    CHECK(line == "t,n_mps,n_analytic");
    fsys::remove_all(dir);
}

TEST_CASE("runs are deterministic") {
    const auto a = scratch("det_a"), b = scratch("det_b");
    auto ca = quick_config(a), cb = quick_config(b);
    run(ca);
    run(cb);
    const auto label = expand_cases(ca).front().label;
    for (const char* f : {"population.csv", "flux.csv", "stationary_spectrum.csv", "dynamical_spectrum.csv"}) {
        // Headers echo the output directory; compare the data only.
        auto body = [&](const fsys::path& p) {
            std::istringstream in(slurp(p));
            std::string out, line;
            while (std::getline(in, line))
                if (line.rfind("# ", 0) != 0) out += line + '\n';
            return out;
        };
        CHECK(body(a / label / f) == body(b / label / f));
    }
    fsys::remove_all(a);
    fsys::remove_all(b);
}

TEST_CASE("case validation flags a cut-off emission tail") {
    auto config = quick_config(scratch("tail"));
    config.numerics.tail = 2.0;
    const auto result = simulate_case(case_settings(config, expand_cases(config).front()));
    const auto report = validate_case(result);
    bool tail_failed = false;
    for (const auto& c : report.checks)
        if (c.name == "emission_tail") tail_failed = !c.passed;
    CHECK(tail_failed);
    CHECK_FALSE(report.passed());
}

TEST_CASE("excess width of a known bump") {
    const auto omega = linear_grid(-3.0, 3.0, 601);
    std::vector<double> input(omega.size(), 1.0), spectrum(omega.size());
    for (std::size_t i = 0; i < omega.size(); ++i) spectrum[i] = 1.0 + std::exp(-omega[i] * omega[i] / 2.0);
    CHECK(central_excess_fwhm(omega, spectrum, input) == doctest::Approx(2.0 * std::sqrt(2.0 * std::log(2.0))).epsilon(1e-2));
    CHECK(std::isnan(central_excess_fwhm(omega, input, input)));
}

TEST_CASE("dt sweep converges at first order") {
    const auto dir = scratch("sweep");
    auto config = quick_config(dir);
    const std::vector<double> values{0.04, 0.02, 0.01};
    const auto points = sweep_convergence(config, SweepAxis::Dt, values);
    REQUIRE(points.size() == 3);
    CHECK(points[0].error / points[1].error == doctest::Approx(2.0).epsilon(0.25));
    CHECK(points[1].error / points[2].error == doctest::Approx(2.0).epsilon(0.25));
    write_sweep_csv(points, SweepAxis::Dt, config, dir / "sweep_dt.csv");
    const auto text = slurp(dir / "sweep_dt.csv");
    CHECK(text.find("setting,error,max_bond,truncation_error,wall_time") != std::string::npos);
    CHECK_THROWS(sweep_axis_from_string("temperature"));
    fsys::remove_all(dir);
}
