#include <doctest.h>

#include "fockscatter/config.hpp"

using namespace fockscatter;

namespace {

std::string field_of(const std::string& toml, std::optional<Preset> preset = std::nullopt) {
    try {
        parse_config(toml, preset);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "";
}

}  // namespace

TEST_CASE("defaults") {
    const auto c = parse_config("");
    CHECK(c.preset == Preset::None);
    CHECK(c.numerics.dt == 0.01);
    CHECK(c.numerics.chi_max == 32);
    CHECK(c.numerics.cutoff_for(2) == 3);
    CHECK(c.observables.omega_grid().size() == 401);
    CHECK(expand_cases(c).size() == 1);
}

TEST_CASE("full configuration parses") {
    const auto c = parse_config(R"(
[system]
gamma = 2.0
delta = 0.5
[pulse]
shape = "gaussian"
duration = 1.5
carrier_detuning = 0.25
photons = 2
[numerics]
dt = 0.005
chi_max = 16
bin_cutoff = 4
tail = 12
[observables]
omega_points = 11
time_stride = 5
[output]
directory = "results"
checkpoint = true
)");
    CHECK(c.system.gamma == 2.0);
    CHECK(c.pulse.shape == PulseShape::Gaussian);
    CHECK(c.pulse.photon_number == 2);
    CHECK(c.numerics.cutoff_for(2) == 4);
    CHECK(c.numerics.tail == 12.0);
    CHECK(c.outputs.directory == "results");
    CHECK(c.outputs.checkpoint);
}

TEST_CASE("errors name the offending field") {
    CHECK(field_of("[pulse]\nwidth = 2") == "pulse.width");
    CHECK(field_of("[physics]\n") == "physics");
    CHECK(field_of("[pulse]\nduration = \"long\"") == "pulse.duration");
    CHECK(field_of("[numerics]\ndt = -0.1") == "numerics.dt");
    CHECK(field_of("[pulse]\nphotons = 2\n[numerics]\nbin_cutoff = 1") == "numerics.bin_cutoff");
    CHECK(field_of("[pulse]\nshape = \"triangle\"") == "pulse.shape");
    CHECK(field_of("preset = \"fig9\"") == "preset");
    CHECK(field_of("[pulse\n") == "<toml>");
}

TEST_CASE("presets reject contradicting physics") {
    CHECK(field_of("preset = \"fig2a\"\n[pulse]\nphotons = 2") == "pulse.photons");
    CHECK(field_of("preset = \"fig2c\"\n[pulse]\nduration = 3.0") == "pulse.duration");
    CHECK(field_of("preset = \"fig2b\"\n[system]\ndelta = 1.0") == "system.delta");
    CHECK(field_of("[pulse]\nshape = \"gaussian\"", Preset::Fig5) == "pulse.shape");
    // Agreeing values and numerics overrides are fine.
    const auto c = parse_config("preset = \"fig2d\"\n[pulse]\nphotons = 2\nduration = 0.5\n[numerics]\ndt = 0.02");
    CHECK(c.numerics.dt == 0.02);
}

TEST_CASE("preset expansion") {
    const auto fig2c = parse_config("preset = \"fig2c\"");
    const auto cases = expand_cases(fig2c);
    REQUIRE(cases.size() == 2);
    CHECK(cases[0].label == "fig2c_tp2");
    CHECK(cases[1].pulse.duration == 0.5);

    const auto fig3 = parse_config("", Preset::Fig3);
    CHECK(fig3.outputs.no_tls);
    CHECK(expand_cases(fig3).size() == 2);

    const auto fig5 = apply_preset(ExperimentConfig{}, Preset::Fig5);
    for (const auto& c : expand_cases(fig5)) CHECK(c.pulse.duration == 10.0);
    CHECK(preset_from_string(to_string(Preset::Fig2b)) == Preset::Fig2b);
}

TEST_CASE("dump round-trips") {
    const auto c = parse_config(R"(
preset = "fig2b"
[numerics]
dt = 0.02
svd_tol = 1e-12
[observables]
omega_min = -4.5
[output]
no_tls = true
)");
    const auto again = parse_config(dump_config(c));
    CHECK(again.preset == c.preset);
    CHECK(again.pulse.photon_number == 2);
    CHECK(again.numerics.dt == c.numerics.dt);
    CHECK(again.numerics.svd_tol == c.numerics.svd_tol);
    CHECK(again.observables.omega_min == c.observables.omega_min);
    CHECK(again.outputs.no_tls);
    CHECK(dump_config(again) == dump_config(c));
}
