#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace latinforge {

enum class ReproTier { Fast, Full };

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

// Runs the reproduction checks for the chosen tier, printing one line per
// check to `out`. Returns the per-check results.
std::vector<CriterionResult> run_reproduction(ReproTier tier, std::ostream& out);

}  // namespace latinforge
