#include "latinforge/local_search.hpp"

#include <algorithm>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace latinforge {

namespace {

// SplitMix64: the documented deterministic generator behind every
// randomized decision. Per-restart streams are seeded with seed + index.
struct SplitMix64 {
    uint64_t state;

    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    size_t below(size_t bound) { return static_cast<size_t>(next() % bound); }
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

struct Walker {
    const CoverInstance& inst;
    int nv;
    // adjacency: constraints touching each variable
    std::vector<int> adj_start;
    std::vector<std::pair<int, int>> adj;  // (constraint, coeff)

    std::vector<uint8_t> value;
    std::vector<long long> lhs;
    std::vector<int> violated;   // indices of violated constraints
    std::vector<int> where;      // position in `violated`, -1 when satisfied
    int ones = 0;

    explicit Walker(const CoverInstance& inst_) : inst(inst_), nv(inst_.num_vars()) {
        adj_start.assign(nv + 1, 0);
        for (const LinearConstraint& c : inst.constraints)
            for (const auto& term : c.terms) ++adj_start[term.first + 1];
        for (int v = 0; v < nv; ++v) adj_start[v + 1] += adj_start[v];
        adj.resize(adj_start[nv]);
        std::vector<int> fill(adj_start.begin(), adj_start.end() - 1);
        for (size_t ci = 0; ci < inst.constraints.size(); ++ci)
            for (const auto& term : inst.constraints[ci].terms)
                adj[fill[term.first]++] = {static_cast<int>(ci), term.second};
    }

    static bool constraint_violated(const LinearConstraint& c, long long lhs_value) {
        switch (c.sense) {
            case Sense::Ge: return lhs_value < c.rhs;
            case Sense::Le: return lhs_value > c.rhs;
            case Sense::Eq: return lhs_value != c.rhs;
        }
        return false;
    }

    void reset_all_ones() {
        value.assign(nv, 1);
        ones = nv;
        lhs.assign(inst.constraints.size(), 0);
        violated.clear();
        where.assign(inst.constraints.size(), -1);
        for (size_t ci = 0; ci < inst.constraints.size(); ++ci) {
            for (const auto& term : inst.constraints[ci].terms) lhs[ci] += term.second;
            if (constraint_violated(inst.constraints[ci], lhs[ci])) {
                where[ci] = static_cast<int>(violated.size());
                violated.push_back(static_cast<int>(ci));
            }
        }
    }

    // change in the number of violated constraints if v were flipped
    int flip_delta(int v) const {
        int to = value[v] ? -1 : 1;
        int d = 0;
        for (int k = adj_start[v]; k < adj_start[v + 1]; ++k) {
            auto [ci, coeff] = adj[k];
            const LinearConstraint& c = inst.constraints[ci];
            bool was = where[ci] >= 0;
            bool now = constraint_violated(c, lhs[ci] + static_cast<long long>(coeff) * to);
            d += static_cast<int>(now) - static_cast<int>(was);
        }
        return d;
    }

    void flip(int v) {
        int to = value[v] ? -1 : 1;
        value[v] ^= 1;
        ones += to;
        for (int k = adj_start[v]; k < adj_start[v + 1]; ++k) {
            auto [ci, coeff] = adj[k];
            lhs[ci] += static_cast<long long>(coeff) * to;
            bool now = constraint_violated(inst.constraints[ci], lhs[ci]);
            bool was = where[ci] >= 0;
            if (now && !was) {
                where[ci] = static_cast<int>(violated.size());
                violated.push_back(ci);
            } else if (!now && was) {
                int pos = where[ci];
                int last = violated.back();
                violated[pos] = last;
                where[last] = pos;
                violated.pop_back();
                where[ci] = -1;
            }
        }
    }
};

struct RestartOutcome {
    bool feasible = false;
    int objective = 0;
    std::vector<uint8_t> best_value;
    size_t final_violations = 0;
    uint64_t flips = 0;
};

RestartOutcome run_restart(Walker& walker, const SolverParams& params, uint64_t stream_seed) {
    SplitMix64 rng{stream_seed};
    walker.reset_all_ones();
    RestartOutcome out;

    auto record_if_better = [&]() {
        if (!walker.violated.empty()) return;
        if (!out.feasible || walker.ones < out.objective) {
            out.feasible = true;
            out.objective = walker.ones;
            out.best_value = walker.value;
        }
    };
    record_if_better();

    std::vector<int> tied;
    for (uint64_t flip_no = 0; flip_no < params.max_flips; ++flip_no) {
        if (out.feasible && params.target && out.objective <= *params.target) break;
        int chosen = -1;
        if (!walker.violated.empty()) {
            int ci = walker.violated[rng.below(walker.violated.size())];
            const LinearConstraint& c = walker.inst.constraints[ci];
            if (rng.unit() < params.noise) {
                chosen = c.terms[rng.below(c.terms.size())].first;
            } else {
                int best_delta = walker.nv + 1;
                for (const auto& term : c.terms) {
                    int d = walker.flip_delta(term.first);
                    if (d < best_delta) {
                        best_delta = d;
                        chosen = term.first;
                    }
                }
            }
        } else {
            // feasible phase: drop the 1-variable breaking the fewest
            // constraints; with probability noise pick among ties at random
            int best_delta = walker.nv + 1;
            tied.clear();
            for (int v = 0; v < walker.nv; ++v) {
                if (!walker.value[v]) continue;
                int d = walker.flip_delta(v);
                if (d < best_delta) {
                    best_delta = d;
                    tied.clear();
                    tied.push_back(v);
                } else if (d == best_delta) {
                    tied.push_back(v);
                }
            }
            if (tied.empty()) break;  // nothing left to remove
            chosen = (tied.size() > 1 && rng.unit() < params.noise)
                         ? tied[rng.below(tied.size())]
                         : tied.front();
        }
        walker.flip(chosen);
        ++out.flips;
        record_if_better();
    }
    if (!out.feasible) {
        out.best_value = walker.value;
        out.objective = walker.ones;
        out.final_violations = walker.violated.size();
    }
    return out;
}

CoverSolution search_impl(const CoverInstance& inst, const SolverParams& params,
                          std::vector<RestartRecord>* records, bool parallel) {
    params.validate();
    std::vector<RestartOutcome> outcomes(params.restarts);
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int r = 0; r < params.restarts; ++r) {
        Walker walker(inst);
        outcomes[r] = run_restart(walker, params, params.seed + static_cast<uint64_t>(r));
    }

    // best by (objective, restart index); any feasible beats any infeasible
    int best = -1;
    for (int r = 0; r < params.restarts; ++r) {
        const RestartOutcome& o = outcomes[r];
        if (best < 0) {
            best = r;
            continue;
        }
        const RestartOutcome& b = outcomes[best];
        if (o.feasible != b.feasible) {
            if (o.feasible) best = r;
        } else if (o.feasible && o.objective < b.objective) {
            best = r;
        } else if (!o.feasible && o.final_violations < b.final_violations) {
            best = r;
        }
    }

    if (records) {
        records->clear();
        for (int r = 0; r < params.restarts; ++r)
            records->push_back({r, params.seed + static_cast<uint64_t>(r),
                                outcomes[r].objective, outcomes[r].feasible,
                                outcomes[r].flips});
    }

    CoverSolution sol = make_solution(inst, outcomes[best].best_value);
    for (const RestartOutcome& o : outcomes) sol.stats.flips += o.flips;
    sol.stats.restarts = params.restarts;
    return sol;
}

}  // namespace

void SolverParams::validate() const {
    if (noise < 0.0 || noise > 1.0)
        throw std::invalid_argument("noise must lie in [0,1]");
    if (restarts < 1) throw std::invalid_argument("at least one restart is required");
}

CoverSolution local_search(const CoverInstance& inst, const SolverParams& params,
                           std::vector<RestartRecord>* records) {
    return search_impl(inst, params, records, true);
}

CoverSolution local_search_serial(const CoverInstance& inst, const SolverParams& params,
                                  std::vector<RestartRecord>* records) {
    return search_impl(inst, params, records, false);
}

}  // namespace latinforge
