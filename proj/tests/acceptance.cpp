// Acceptance run: the full validation level, one line per numbered criterion.
#include <chrono>
#include <cstdio>
#include <string>

#include "indefspec/validation.hpp"

using namespace indefspec;

int main() {
    const auto start = std::chrono::steady_clock::now();
    const auto results = run_validation(ValidationLevel::Full);
    const double total =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    int failures = 0;
    for (const auto& r : results) {
        if (r.id.rfind("AC", 0) != 0) {
            continue;
        }
        const bool in_budget = r.seconds < r.budget_seconds;
        const bool ok = r.passed && in_budget;
        failures += ok ? 0 : 1;
        std::printf("[%s] criterion %2d  %-62s measured=%-12.4g threshold=%-9.3g time=%.3fs/%gs%s\n",
                    ok ? "PASS" : "FAIL", std::stoi(r.id.substr(2)), r.name.c_str(), r.measured,
                    r.threshold, r.seconds, r.budget_seconds, in_budget ? "" : " OVER BUDGET");
        if (!r.passed) {
            std::printf("       detail: %s\n", r.detail.c_str());
        }
    }
    int invariant_failures = 0;
    for (const auto& r : results) {
        if (r.id.rfind("AC", 0) != 0 && !r.passed) {
            ++invariant_failures;
            std::printf("[FAIL] invariant %s %s: %s\n", r.id.c_str(), r.name.c_str(),
                        r.detail.c_str());
        }
    }
    const bool fast = total < 180.0;
    std::printf("[%s] full validation: %zu checks, %d invariant failures, %.2fs (limit 180s)\n",
                fast && invariant_failures == 0 ? "PASS" : "FAIL", results.size(),
                invariant_failures, total);
    return failures == 0 && invariant_failures == 0 && fast ? 0 : 1;
}
