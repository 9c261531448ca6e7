#pragma once

#include <string>
#include <vector>

#include "latinforge/core.hpp"
#include "latinforge/trades.hpp"

namespace latinforge {

struct ConstructionResult {
    PartialLatinSquare set;
    int predicted_size = 0;
    // necessity witnesses attached by the construction, each meeting the
    // set exactly in its cell
    std::vector<std::pair<Cell, Trade>> witnesses;
};

// Stinson-van Rees critical set of L(2^n): cells with (i AND j) != 0,
// symbol i XOR j; size 4^n - 3^n. Supported for 2 <= n <= 6.
ConstructionResult svr_set(int n);

// The modified set D: SvR plus three corner entries, minus the deep half
// of the last row and column and a quarter of the zero diagonal; size
// 4^n - 3^n + 4 - 2^n - 2^(n-2). Witness intercalates attached for the
// corner and diagonal entries.
ConstructionResult theorem1_set(int n);

// The add-back sequence that forces D to the full square: the removed
// diagonal cells, then the far corner, then the removed last-row/column
// cells in ascending order.
std::vector<Cell> theorem1_completion_order(int n);

// SvR set plus the back diagonal and the last row and column, the start
// set for greedy trimming.
PartialLatinSquare dfk_trim_start(int n);

// Applies a band-respecting autotopism of L(9) (row/column band
// permutations with the compensating symbol permutation) so that band
// (1,1) holds at least as many entries as every other band. Identity when
// the property already holds.
PartialLatinSquare theorem2_normalize(const PartialLatinSquare& C);

// Bundled example tables, loaded from the data directory and checksum
// verified.
PartialLatinSquare bundled_c121();
PartialLatinSquare bundled_c29();

// Data directory: LATINFORGE_DATA environment variable when set,
// otherwise the compiled-in default.
std::string data_dir();

}  // namespace latinforge
