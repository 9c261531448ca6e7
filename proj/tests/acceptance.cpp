// Gate suite: one pass/fail line per reproduction criterion.

#include <iostream>

#include "latinforge/reproduce.hpp"

int main() {
    std::vector<latinforge::CriterionResult> results =
        latinforge::run_reproduction(latinforge::ReproTier::Fast, std::cout);
    int failures = 0;
    for (const auto& r : results)
        if (!r.pass) ++failures;
    if (failures) std::cout << failures << " criteria FAILED\n";
    return failures ? 1 : 0;
}
