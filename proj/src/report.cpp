#include "fockscatter/report.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fockscatter {

namespace {

nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

Check& ValidationReport::add(Check check) {
    checks.push_back(std::move(check));
    return checks.back();
}

bool ValidationReport::passed() const {
    for (const auto& c : checks)
        if (!c.passed) return false;
    return true;
}

void ValidationReport::append(const ValidationReport& other, const std::string& prefix) {
    for (Check c : other.checks) {
        c.name = prefix + c.name;
        checks.push_back(std::move(c));
    }
    if (!other.metadata.empty()) metadata[prefix.empty() ? "nested" : prefix] = other.metadata;
}

nlohmann::json ValidationReport::to_json() const {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["status"] = passed() ? "pass" : "fail";
    j["checks"] = nlohmann::json::array();
    for (const auto& c : checks) {
        j["checks"].push_back({{"name", c.name},
                               {"oracle", number_or_null(c.oracle)},
                               {"simulated", number_or_null(c.simulated)},
                               {"tolerance", number_or_null(c.tolerance)},
                               {"passed", c.passed},
                               {"detail", c.detail}});
    }
    j["metadata"] = metadata;
    return j;
}

void ValidationReport::write(const std::filesystem::path& path) const {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << to_json().dump(2) << '\n';
}

std::string format_check(const Check& check) {
    std::ostringstream os;
    os.precision(6);
    os << (check.passed ? "PASS " : "FAIL ") << check.name << ": simulated=" << check.simulated
       << " oracle=" << check.oracle << " tol=" << check.tolerance;
    if (!check.detail.empty()) os << " (" << check.detail << ")";
    return os.str();
}

}  // namespace fockscatter
