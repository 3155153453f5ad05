// Prints one PASS/FAIL line per acceptance criterion; exits non-zero if any fails.

#include <iostream>

#include "fockscatter/acceptance.hpp"

int main() {
    fockscatter::AcceptanceOptions options;
    options.on_check = [](const fockscatter::Check& c) {
        std::cout << fockscatter::format_check(c) << std::endl;
    };
    const auto report = fockscatter::run_acceptance_suite(options);
    return report.passed() ? 0 : 1;
}
