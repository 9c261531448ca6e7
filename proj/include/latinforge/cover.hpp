#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "latinforge/core.hpp"
#include "latinforge/trades.hpp"

namespace latinforge {

enum class Sense { Ge, Le, Eq };

struct LinearConstraint {
    std::vector<std::pair<int, int>> terms;  // (cell index, integer coefficient)
    Sense sense = Sense::Ge;
    int rhs = 0;
    std::string tag;  // I1/I2/I3/../trade/symmetry/cardinality

    bool operator==(const LinearConstraint&) const = default;
};

// 0-1 program over the n*n cells of a square: minimize the number of
// chosen cells subject to the constraint rows.
struct CoverInstance {
    int order = 0;
    std::vector<LinearConstraint> constraints;
    std::string name;                    // instance label for solver records
    std::optional<LatinSquare> source;   // square the cells refer to, when known

    int num_vars() const { return order * order; }

    bool operator==(const CoverInstance& o) const {
        return order == o.order && constraints == o.constraints;
    }
};

// One >=-constraint per subsquare of each level 1..max_level of L(2^n),
// with the scheme's right-hand sides. The default scheme is 5^(k-1).
CoverInstance build_hierarchical_cover(const GroupSpec& spec, int max_level,
                                       std::vector<int> rhs_scheme = {});

// One RHS-1 covering constraint per trade body.
CoverInstance build_trade_cover(const LatinSquare& L, std::span<const Trade> trades);

// Eight constraints requiring band (1,1) to hold at least as many chosen
// cells as every other band. Order 9 only.
CoverInstance add_rc_symmetry(CoverInstance inst, const BandPartition& bands);

enum class CardinalityMode { RowsCols78, SubsquaresExactly3 };

// RowsCols78 (order 16): every row, column and symbol line carries 7 or 8
// chosen cells. SubsquaresExactly3 (order 9): every order-3 subsquare
// carries exactly 3.
CoverInstance add_cardinality_constraints(CoverInstance inst, CardinalityMode mode);

// Canonical LP text: objective over x_r_c row-major, constraints c1..cK in
// instance order, Binaries section, End. Byte-stable for a fixed instance.
std::string export_lp(const CoverInstance& inst);

// Inverse of export_lp on its image.
CoverInstance import_lp(std::string_view text);

struct SolverStats {
    uint64_t flips = 0;
    uint64_t nodes = 0;
    int restarts = 0;
};

struct CoverSolution {
    PartialLatinSquare cells;           // chosen cells, symbols from the source square
    std::vector<uint8_t> assignment;    // raw 0/1 vector over the n*n cells
    int objective = 0;
    bool feasible = false;
    SolverStats stats;
};

// Independent feasibility check used to cross-validate solver output.
bool satisfies(const LinearConstraint& c, std::span<const uint8_t> assignment);
bool check_feasible(const CoverInstance& inst, std::span<const uint8_t> assignment);

// Sum of RHS over a greedily chosen set of pairwise variable-disjoint
// covering constraints (largest RHS first); a sound lower bound.
int lower_bound_packing(const CoverInstance& inst);

// Counts of constraints by (tag, achieved LHS under the solution).
std::map<std::pair<std::string, int>, int> report_slack_histogram(const CoverInstance& inst,
                                                                  const CoverSolution& sol);

// Builds the solution record for an assignment, filling symbols from the
// instance's source square (or the elementary abelian square of matching
// order when the instance has none).
CoverSolution make_solution(const CoverInstance& inst, std::span<const uint8_t> assignment);

// Square whose cells the instance variables refer to.
LatinSquare instance_square(const CoverInstance& inst);

// Canonical solution record: one header line plus the chosen cells as a
// PLS block. Byte-stable for a fixed solution.
std::string write_solution(const CoverSolution& sol, uint64_t seed);

}  // namespace latinforge
