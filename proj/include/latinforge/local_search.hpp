#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "latinforge/cover.hpp"

namespace latinforge {

struct SolverParams {
    uint64_t seed = 1;
    double noise = 0.2;          // probability of a random walk move
    uint64_t max_flips = 1'000'000;
    int restarts = 16;
    std::optional<int> target;   // stop once the best objective reaches this

    void validate() const;
};

struct RestartRecord {
    int restart = 0;
    uint64_t seed = 0;
    int objective = 0;
    bool feasible = false;
    uint64_t flips = 0;
};

// WalkSAT-style iterative repair over the 0-1 cells. Infeasible phase:
// pick a violated constraint at random and flip its best variable (random
// variable with probability noise). Feasible phase: drop the 1-variable
// breaking the fewest constraints. Fully determined by the seed;
// per-restart streams are derived as seed + restart index. The parallel
// variant distributes restarts across threads and selects the best
// solution by (objective, restart index), so results match the serial
// reference.
CoverSolution local_search(const CoverInstance& inst, const SolverParams& params,
                           std::vector<RestartRecord>* records = nullptr);
CoverSolution local_search_serial(const CoverInstance& inst, const SolverParams& params,
                                  std::vector<RestartRecord>* records = nullptr);

}  // namespace latinforge
