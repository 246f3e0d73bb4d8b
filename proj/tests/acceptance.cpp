// Acceptance battery: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Runs every criterion even when an earlier one fails.
#include <qeuclid/validation.hpp>

#include <iostream>

int main() {
    qeuclid::ValidationOptions opt;
    int failed = 0;
    for (const auto& c : qeuclid::validation_criteria()) {
        const auto r = qeuclid::run_criterion(c.id, opt);
        std::cout << qeuclid::format_result(r) << std::endl;
        failed += r.pass ? 0 : 1;
    }
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << "\n";
    return failed == 0 ? 0 : 1;
}
