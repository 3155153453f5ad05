#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace fockscatter {

struct Check {
    std::string name;
    double oracle = 0.0;
    double simulated = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    std::string detail;
};

// Named checks plus run metadata. Overall status is the conjunction of checks.
struct ValidationReport {
    static constexpr int kSchemaVersion = 1;

    std::vector<Check> checks;
    nlohmann::json metadata = nlohmann::json::object();

    Check& add(Check check);
    bool passed() const;
    void append(const ValidationReport& other, const std::string& prefix);
    nlohmann::json to_json() const;
    void write(const std::filesystem::path& path) const;
};

// One line per check: "PASS name: simulated=... oracle=... tol=... detail".
std::string format_check(const Check& check);

}  // namespace fockscatter
