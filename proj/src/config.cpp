#include "fockscatter/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

namespace fockscatter {

namespace {

struct PresetPhysics {
    std::vector<int> photons;
    std::vector<double> durations;
};

PresetPhysics physics_of(Preset preset) {
    switch (preset) {
        case Preset::Fig2a: return {{1}, {2.0}};
        case Preset::Fig2b: return {{2}, {2.0}};
        case Preset::Fig2c: return {{1}, {2.0, 0.5}};
        case Preset::Fig2d: return {{2}, {2.0, 0.5}};
        case Preset::Fig3: return {{1, 2}, {2.0}};
        case Preset::Fig5: return {{1, 2}, {10.0}};
        case Preset::None: break;
    }
    return {};
}

std::string format_number(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    std::string s = os.str();
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

class Reader {
   public:
    explicit Reader(const toml::table& root) : root_(root) {}

    const toml::table* table(const std::string& name) {
        const toml::node* node = root_.get(name);
        if (!node) return nullptr;
        if (!node->is_table()) throw ConfigError(name, "expected a table");
        return node->as_table();
    }

    void check_keys(const toml::table* tbl, const std::string& prefix, const std::set<std::string>& allowed) {
        if (!tbl) return;
        for (const auto& [key, node] : *tbl) {
            const std::string k(key.str());
            if (!allowed.count(k)) throw ConfigError(prefix + k, "unknown field");
            (void)node;
        }
    }

    bool number(const toml::table* tbl, const std::string& prefix, const char* key, double& out) {
        const toml::node* node = tbl ? tbl->get(key) : nullptr;
        if (!node) return false;
        auto v = node->value<double>();
        if (!v || !(node->is_floating_point() || node->is_integer()))
            throw ConfigError(prefix + key, "expected a number");
        out = *v;
        mark(prefix + key);
        return true;
    }

    template <typename Int>
    bool integer(const toml::table* tbl, const std::string& prefix, const char* key, Int& out) {
        const toml::node* node = tbl ? tbl->get(key) : nullptr;
        if (!node) return false;
        if (!node->is_integer()) throw ConfigError(prefix + key, "expected an integer");
        const std::int64_t v = *node->value<std::int64_t>();
        if (v < 0) throw ConfigError(prefix + key, "must be non-negative");
        out = static_cast<Int>(v);
        mark(prefix + key);
        return true;
    }

    bool string(const toml::table* tbl, const std::string& prefix, const char* key, std::string& out) {
        const toml::node* node = tbl ? tbl->get(key) : nullptr;
        if (!node) return false;
        if (!node->is_string()) throw ConfigError(prefix + key, "expected a string");
        out = *node->value<std::string>();
        mark(prefix + key);
        return true;
    }

    bool boolean(const toml::table* tbl, const std::string& prefix, const char* key, bool& out) {
        const toml::node* node = tbl ? tbl->get(key) : nullptr;
        if (!node) return false;
        if (!node->is_boolean()) throw ConfigError(prefix + key, "expected true or false");
        out = *node->value<bool>();
        mark(prefix + key);
        return true;
    }

    const std::vector<std::string>& explicit_fields() const { return explicit_; }

   private:
    void mark(std::string field) { explicit_.push_back(std::move(field)); }

    const toml::table& root_;
    std::vector<std::string> explicit_;
};

void validate_resolved(const ExperimentConfig& c) {
    auto wrap = [](const char* field, auto&& fn) {
        try {
            fn();
        } catch (const ConfigError&) {
            throw;
        } catch (const std::invalid_argument& e) {
            throw ConfigError(field, e.what());
        }
    };
    wrap("system", [&] { c.system.validate(); });
    wrap("pulse", [&] { c.pulse.validate(); });
    if (!(c.numerics.dt > 0.0)) throw ConfigError("numerics.dt", "must be positive");
    if (c.numerics.chi_max < 2) throw ConfigError("numerics.chi_max", "must be at least 2");
    if (!(c.numerics.svd_tol >= 0.0)) throw ConfigError("numerics.svd_tol", "must be non-negative");
    if (!(c.numerics.tail >= 0.0)) throw ConfigError("numerics.tail", "must be non-negative");
    if (!(c.numerics.truncation_budget >= 0.0)) throw ConfigError("numerics.truncation_budget", "must be non-negative");
    if (c.numerics.bin_cutoff != 0 && c.numerics.bin_cutoff < c.pulse.photon_number)
        throw ConfigError("numerics.bin_cutoff", "must be at least the photon number");
    if (c.observables.omega_points < 2) throw ConfigError("observables.omega_points", "need at least 2 points");
    if (!(c.observables.omega_max > c.observables.omega_min))
        throw ConfigError("observables.omega_max", "must exceed omega_min");
    if (c.observables.time_stride == 0) throw ConfigError("observables.time_stride", "must be positive");
}

}  // namespace

std::string to_string(Preset preset) {
    switch (preset) {
        case Preset::None: return "none";
        case Preset::Fig2a: return "fig2a";
        case Preset::Fig2b: return "fig2b";
        case Preset::Fig2c: return "fig2c";
        case Preset::Fig2d: return "fig2d";
        case Preset::Fig3: return "fig3";
        case Preset::Fig5: return "fig5";
    }
    return "none";
}

Preset preset_from_string(const std::string& name) {
    static const std::map<std::string, Preset> names = {
        {"none", Preset::None},   {"fig2a", Preset::Fig2a}, {"fig2b", Preset::Fig2b}, {"fig2c", Preset::Fig2c},
        {"fig2d", Preset::Fig2d}, {"fig3", Preset::Fig3},   {"fig5", Preset::Fig5}};
    const auto it = names.find(name);
    if (it == names.end()) throw ConfigError("preset", "unknown preset '" + name + "'");
    return it->second;
}

std::vector<ExperimentCase> expand_cases(const ExperimentConfig& config) {
    if (config.preset == Preset::None) {
        std::ostringstream label;
        label << to_string(config.pulse.shape) << "_n" << config.pulse.photon_number << "_tp"
              << config.pulse.duration;
        return {{label.str(), config.pulse}};
    }
    const PresetPhysics physics = physics_of(config.preset);
    std::vector<ExperimentCase> cases;
    for (int n : physics.photons) {
        for (double tp : physics.durations) {
            ExperimentCase c;
            c.pulse = config.pulse;
            c.pulse.shape = PulseShape::Rectangular;
            c.pulse.carrier_detuning = 0.0;
            c.pulse.photon_number = n;
            c.pulse.duration = tp;
            std::ostringstream label;
            label << to_string(config.preset);
            if (physics.photons.size() > 1) label << "_n" << n;
            if (physics.durations.size() > 1) label << "_tp" << tp;
            c.label = label.str();
            cases.push_back(std::move(c));
        }
    }
    return cases;
}

ExperimentConfig apply_preset(ExperimentConfig config, Preset preset, const std::vector<std::string>& explicit_fields) {
    config.preset = preset;
    if (preset == Preset::None) return config;
    const PresetPhysics physics = physics_of(preset);
    auto is_explicit = [&](const std::string& f) {
        return std::find(explicit_fields.begin(), explicit_fields.end(), f) != explicit_fields.end();
    };
    const std::string name = to_string(preset);
    if (is_explicit("system.gamma") && config.system.gamma != 1.0)
        throw ConfigError("system.gamma", "preset " + name + " works in units gamma = 1");
    if (is_explicit("system.delta") && config.system.delta != 0.0)
        throw ConfigError("system.delta", "preset " + name + " is resonant");
    if (is_explicit("pulse.shape") && config.pulse.shape != PulseShape::Rectangular)
        throw ConfigError("pulse.shape", "preset " + name + " uses a rectangular pulse");
    if (is_explicit("pulse.carrier_detuning") && config.pulse.carrier_detuning != 0.0)
        throw ConfigError("pulse.carrier_detuning", "preset " + name + " is resonant");
    if (is_explicit("pulse.photons") &&
        std::find(physics.photons.begin(), physics.photons.end(), config.pulse.photon_number) == physics.photons.end())
        throw ConfigError("pulse.photons", "contradicts preset " + name);
    if (is_explicit("pulse.duration") &&
        std::find(physics.durations.begin(), physics.durations.end(), config.pulse.duration) == physics.durations.end())
        throw ConfigError("pulse.duration", "contradicts preset " + name);

    config.system = SystemParams{};
    config.pulse.shape = PulseShape::Rectangular;
    config.pulse.carrier_detuning = 0.0;
    config.pulse.photon_number = physics.photons.front();
    config.pulse.duration = physics.durations.front();
    if (preset == Preset::Fig3) config.outputs.no_tls = true;
    return config;
}

ExperimentConfig parse_config(const std::string& toml_text, std::optional<Preset> preset_override) {
    toml::table root;
    try {
        root = toml::parse(toml_text);
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << e.description() << " at line " << e.source().begin.line << ", column " << e.source().begin.column;
        throw ConfigError("<toml>", os.str());
    }

    Reader r(root);
    for (const auto& [key, node] : root) {
        static const std::set<std::string> top = {"preset", "system", "pulse", "numerics", "observables", "output"};
        if (!top.count(std::string(key.str()))) throw ConfigError(std::string(key.str()), "unknown field");
        (void)node;
    }

    ExperimentConfig c;
    std::string preset_name = "none";
    if (const toml::node* node = root.get("preset")) {
        if (!node->is_string()) throw ConfigError("preset", "expected a string");
        preset_name = *node->value<std::string>();
    }
    Preset preset = preset_from_string(preset_name);
    if (preset_override) preset = *preset_override;

    const toml::table* sys = r.table("system");
    r.check_keys(sys, "system.", {"gamma", "delta"});
    r.number(sys, "system.", "gamma", c.system.gamma);
    r.number(sys, "system.", "delta", c.system.delta);

    const toml::table* pulse = r.table("pulse");
    r.check_keys(pulse, "pulse.", {"shape", "duration", "carrier_detuning", "photons"});
    std::string shape;
    if (r.string(pulse, "pulse.", "shape", shape)) {
        try {
            c.pulse.shape = pulse_shape_from_string(shape);
        } catch (const std::invalid_argument& e) {
            throw ConfigError("pulse.shape", e.what());
        }
    }
    r.number(pulse, "pulse.", "duration", c.pulse.duration);
    r.number(pulse, "pulse.", "carrier_detuning", c.pulse.carrier_detuning);
    r.integer(pulse, "pulse.", "photons", c.pulse.photon_number);

    const toml::table* num = r.table("numerics");
    r.check_keys(num, "numerics.", {"dt", "chi_max", "svd_tol", "bin_cutoff", "tail", "truncation_budget"});
    r.number(num, "numerics.", "dt", c.numerics.dt);
    r.integer(num, "numerics.", "chi_max", c.numerics.chi_max);
    r.number(num, "numerics.", "svd_tol", c.numerics.svd_tol);
    r.integer(num, "numerics.", "bin_cutoff", c.numerics.bin_cutoff);
    r.number(num, "numerics.", "tail", c.numerics.tail);
    r.number(num, "numerics.", "truncation_budget", c.numerics.truncation_budget);

    const toml::table* obs = r.table("observables");
    r.check_keys(obs, "observables.", {"omega_min", "omega_max", "omega_points", "time_stride"});
    r.number(obs, "observables.", "omega_min", c.observables.omega_min);
    r.number(obs, "observables.", "omega_max", c.observables.omega_max);
    r.integer(obs, "observables.", "omega_points", c.observables.omega_points);
    r.integer(obs, "observables.", "time_stride", c.observables.time_stride);

    const toml::table* out = r.table("output");
    r.check_keys(out, "output.",
                 {"directory", "population", "flux", "input_spectrum", "stationary_spectrum", "dynamical_spectrum",
                  "checkpoint", "no_tls"});
    std::string dir;
    if (r.string(out, "output.", "directory", dir)) c.outputs.directory = dir;
    r.boolean(out, "output.", "population", c.outputs.population);
    r.boolean(out, "output.", "flux", c.outputs.flux);
    r.boolean(out, "output.", "input_spectrum", c.outputs.input_spectrum);
    r.boolean(out, "output.", "stationary_spectrum", c.outputs.stationary_spectrum);
    r.boolean(out, "output.", "dynamical_spectrum", c.outputs.dynamical_spectrum);
    r.boolean(out, "output.", "checkpoint", c.outputs.checkpoint);
    r.boolean(out, "output.", "no_tls", c.outputs.no_tls);

    c = apply_preset(std::move(c), preset, r.explicit_fields());
    validate_resolved(c);
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, std::optional<Preset> preset_override) {
    std::ifstream is(path);
    if (!is) throw ConfigError("<file>", "cannot read " + path.string());
    std::ostringstream buffer;
    buffer << is.rdbuf();
    return parse_config(buffer.str(), preset_override);
}

std::string dump_config(const ExperimentConfig& c) {
    std::ostringstream os;
    auto b = [](bool v) { return v ? "true" : "false"; };
    os << "preset = \"" << to_string(c.preset) << "\"\n\n";
    os << "[system]\n";
    os << "gamma = " << format_number(c.system.gamma) << "\n";
    os << "delta = " << format_number(c.system.delta) << "\n\n";
    os << "[pulse]\n";
    os << "shape = \"" << to_string(c.pulse.shape) << "\"\n";
    os << "duration = " << format_number(c.pulse.duration) << "\n";
    os << "carrier_detuning = " << format_number(c.pulse.carrier_detuning) << "\n";
    os << "photons = " << c.pulse.photon_number << "\n\n";
    os << "[numerics]\n";
    os << "dt = " << format_number(c.numerics.dt) << "\n";
    os << "chi_max = " << c.numerics.chi_max << "\n";
    os << "svd_tol = " << format_number(c.numerics.svd_tol) << "\n";
    os << "bin_cutoff = " << c.numerics.bin_cutoff << "\n";
    os << "tail = " << format_number(c.numerics.tail) << "\n";
    os << "truncation_budget = " << format_number(c.numerics.truncation_budget) << "\n\n";
    os << "[observables]\n";
    os << "omega_min = " << format_number(c.observables.omega_min) << "\n";
    os << "omega_max = " << format_number(c.observables.omega_max) << "\n";
    os << "omega_points = " << c.observables.omega_points << "\n";
    os << "time_stride = " << c.observables.time_stride << "\n\n";
    os << "[output]\n";
    os << "directory = \"" << c.outputs.directory.generic_string() << "\"\n";
    os << "population = " << b(c.outputs.population) << "\n";
    os << "flux = " << b(c.outputs.flux) << "\n";
    os << "input_spectrum = " << b(c.outputs.input_spectrum) << "\n";
    os << "stationary_spectrum = " << b(c.outputs.stationary_spectrum) << "\n";
    os << "dynamical_spectrum = " << b(c.outputs.dynamical_spectrum) << "\n";
    os << "checkpoint = " << b(c.outputs.checkpoint) << "\n";
    os << "no_tls = " << b(c.outputs.no_tls) << "\n";
    return os.str();
}

}  // namespace fockscatter
