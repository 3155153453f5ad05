#pragma once

#include <functional>

#include "fockscatter/report.hpp"

namespace fockscatter {

struct AcceptanceOptions {
    // Called as each criterion finishes.
    std::function<void(const Check&)> on_check;
};

// Criteria A1..A10, one named check each, at the pinned tolerances.
ValidationReport run_acceptance_suite(const AcceptanceOptions& options = {});

}  // namespace fockscatter
