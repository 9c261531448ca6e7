#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "latinforge/core.hpp"
#include "latinforge/trades.hpp"

namespace latinforge {

inline constexpr uint64_t kDefaultNodeBudget = 100'000'000;

struct PropagationResult {
    PartialLatinSquare square;
    bool contradiction = false;
};

// Closure of P under two forcing rules applied to fixpoint: (a) a cell
// whose row and column exclude all but one symbol gains that symbol;
// (b) a (line, symbol) pair with exactly one admissible cell gains that
// cell. Monotone and idempotent; contradiction is signalled when a cell
// or placement runs out of candidates.
PropagationResult propagate(const PartialLatinSquare& P);

struct CountResult {
    long long count = 0;
    bool budget_exhausted = false;
    uint64_t nodes_used = 0;
};

// min(limit, number of Latin squares extending P), by backtracking with
// propagation at every node, branching on a minimum-candidate cell
// (lowest index tie-break), symbols ascending.
CountResult count_completions(const PartialLatinSquare& P, long long limit,
                              uint64_t node_budget = kDefaultNodeBudget);

struct EnumerateCompletionsResult {
    std::vector<LatinSquare> squares;  // in search order
    bool budget_exhausted = false;
    uint64_t nodes_used = 0;
};

EnumerateCompletionsResult enumerate_completions(const PartialLatinSquare& P, long long limit,
                                                 uint64_t node_budget = kDefaultNodeBudget);

enum class CertStatus {
    PropagationComplete,
    SearchProvenUnique,
    MultipleCompletions,
    Incompletable,
    BudgetExceeded,
};

const char* to_string(CertStatus s);

struct UniquenessCertificate {
    CertStatus status = CertStatus::BudgetExceeded;
    uint64_t nodes_used = 0;
    std::optional<LatinSquare> witness;  // a second completion, when one exists

    bool unique() const {
        return status == CertStatus::PropagationComplete ||
               status == CertStatus::SearchProvenUnique;
    }
};

// Requires P subset of L. PropagationComplete when propagation alone
// rebuilds L; otherwise settled by a two-completion search.
UniquenessCertificate is_uniquely_completable(const PartialLatinSquare& P, const LatinSquare& L,
                                              uint64_t node_budget = kDefaultNodeBudget);

enum class WitnessStatus { Found, Redundant, BudgetExceeded };

struct NecessityWitness {
    WitnessStatus status = WitnessStatus::BudgetExceeded;
    std::optional<Trade> trade;
};

// Precomputed trade pools shared across the per-entry necessity checks.
class WitnessFinder {
public:
    WitnessFinder(const LatinSquare& L, uint64_t node_budget = kDefaultNodeBudget);

    // A trade T of L with T intersect C = {e}. Escalates: intercalate pool,
    // bounded-trade pool (small orders), second-completion search.
    NecessityWitness find(const PartialLatinSquare& C, const Cell& e) const;

    const LatinSquare& square() const { return L_; }

private:
    const LatinSquare& L_;
    uint64_t node_budget_;
    std::vector<Trade> intercalates_;
    std::vector<Trade> bounded_trades_;  // only populated for small orders
};

NecessityWitness necessity_witness(const LatinSquare& L, const PartialLatinSquare& C,
                                   const Cell& e, uint64_t node_budget = kDefaultNodeBudget);

struct VerificationReport {
    UniquenessCertificate unique;
    std::vector<std::pair<Cell, NecessityWitness>> necessity;  // row-major entry order

    bool passed() const;
};

// Lemma-style critical set verification: unique completability plus one
// necessity witness per entry. The parallel variant distributes entries
// across threads; results are identical to the serial reference.
VerificationReport verify_critical_set(const LatinSquare& L, const PartialLatinSquare& C,
                                       uint64_t node_budget = kDefaultNodeBudget);
VerificationReport verify_critical_set_serial(const LatinSquare& L, const PartialLatinSquare& C,
                                              uint64_t node_budget = kDefaultNodeBudget);

// Human-readable summary followed by a machine block: one line per entry
// and its witness trade in the trade list format.
std::string write_verification_report(const VerificationReport& report);

enum class TrimTest { Propagation, Search };

// Repeated row-major scans over S, removing an entry whenever the
// remainder still certifies under the chosen test; stops when a full scan
// removes nothing. S must pass the test initially.
PartialLatinSquare greedy_trim(const LatinSquare& L, const PartialLatinSquare& S, TrimTest test,
                               uint64_t node_budget = kDefaultNodeBudget);

}  // namespace latinforge
