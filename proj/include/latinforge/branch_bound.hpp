#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>

#include "latinforge/cover.hpp"

namespace latinforge {

struct BnbParams {
    uint64_t node_budget = 1'000'000'000;
    // wall-clock cutoff; checked coarsely, so overruns stay small
    std::optional<double> time_limit_seconds;
    // stop once the proved lower bound reaches this value
    std::optional<int> stop_at_bound;
    // known feasible assignment to start from (e.g. a local-search result)
    std::optional<std::vector<uint8_t>> warm_start;
    std::ostream* checkpoint_log = nullptr;
};

struct BnbResult {
    CoverSolution best;
    int proved_lower_bound = 0;
    bool optimal = false;
    uint64_t nodes_used = 0;
    bool budget_exhausted = false;
};

// Deterministic depth-first search with forced-variable propagation,
// a packing lower bound over variable-disjoint covering constraints and
// a per-family density bound. The proved bound is raised one unit at a
// time (each step a completed refutation), so interrupted runs still
// report a sound lower bound.
BnbResult branch_and_bound(const CoverInstance& inst, const BnbParams& params = {});

}  // namespace latinforge
