#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace latinforge {

// Largest full-square order we support. Row/column/symbol sets of a square
// of this order fit in one 64-bit mask each.
inline constexpr int kMaxOrder = 64;

struct Cell {
    int row = 0;
    int col = 0;
    int symbol = 0;

    auto operator<=>(const Cell&) const = default;
};

// Parameters (m, n) of the elementary abelian group Z_m^n whose Cayley
// table we generate. Row/column index i encodes the group element whose
// base-m digits are the digits of i.
struct GroupSpec {
    int base = 2;
    int exponent = 1;

    // m^n; throws if the order exceeds kMaxOrder.
    int order() const;
};

class PartialLatinSquare;

// Complete Latin square, immutable after construction.
class LatinSquare {
public:
    static LatinSquare from_grid(const std::vector<std::vector<int>>& grid);
    static LatinSquare from_flat(int order, std::vector<int8_t> grid);

    int order() const { return order_; }
    int at(int r, int c) const { return grid_[static_cast<size_t>(r) * order_ + c]; }
    // Column holding symbol s in row r.
    int column_of(int r, int s) const { return col_of_[static_cast<size_t>(r) * order_ + s]; }
    // Row holding symbol s in column c.
    int row_of(int c, int s) const { return row_of_[static_cast<size_t>(c) * order_ + s]; }

    bool contains(const Cell& e) const {
        return e.row >= 0 && e.row < order_ && e.col >= 0 && e.col < order_ &&
               at(e.row, e.col) == e.symbol;
    }

    PartialLatinSquare as_partial() const;

    bool operator==(const LatinSquare& o) const {
        return order_ == o.order_ && grid_ == o.grid_;
    }

private:
    LatinSquare(int order, std::vector<int8_t> grid);

    int order_ = 0;
    std::vector<int8_t> grid_;    // row-major symbols
    std::vector<int8_t> col_of_;  // [r*n+s] -> column of s in row r
    std::vector<int8_t> row_of_;  // [c*n+s] -> row of s in column c
};

// Set of cell triples with no (row,col) duplicate and no row/column symbol
// repetition. Backed by per-row occupancy and symbol masks so conflict
// tests are single mask operations.
class PartialLatinSquare {
public:
    PartialLatinSquare() = default;
    explicit PartialLatinSquare(int order);
    static PartialLatinSquare from_cells(int order, std::span<const Cell> cells);

    int order() const { return order_; }
    int size() const { return size_; }
    bool empty() const { return size_ == 0; }

    bool filled(int r, int c) const { return (row_occ_[r] >> c) & 1u; }
    // Symbol at (r,c), or -1 when the cell is empty.
    int symbol_at(int r, int c) const { return grid_[static_cast<size_t>(r) * order_ + c]; }
    bool contains(const Cell& e) const {
        return filled(e.row, e.col) && symbol_at(e.row, e.col) == e.symbol;
    }

    bool can_place(int r, int c, int s) const {
        return !filled(r, c) && !((row_sym_[r] >> s) & 1u) && !((col_sym_[c] >> s) & 1u);
    }
    void place(const Cell& e);  // throws on conflict or out-of-range
    void erase(int r, int c);   // throws if the cell is empty

    // Occupied columns of row r, one bit per column.
    uint64_t row_occupancy(int r) const { return row_occ_[r]; }
    uint64_t col_occupancy(int c) const { return col_occ_[c]; }
    // Symbols present in row r / column c, one bit per symbol.
    uint64_t row_symbols(int r) const { return row_sym_[r]; }
    uint64_t col_symbols(int c) const { return col_sym_[c]; }
    // Rows / columns already holding symbol s, one bit per row/column.
    uint64_t rows_with(int s) const { return sym_rows_[s]; }
    uint64_t cols_with(int s) const { return sym_cols_[s]; }

    std::vector<Cell> cells() const;  // row-major order

    bool is_complete() const { return size_ == order_ * order_; }
    // Complete partial square as a LatinSquare (throws if incomplete).
    LatinSquare to_square() const;

    // True when every entry agrees with L.
    bool subset_of(const LatinSquare& L) const;
    bool subset_of(const PartialLatinSquare& P) const;

    bool operator==(const PartialLatinSquare& o) const {
        return order_ == o.order_ && grid_ == o.grid_;
    }

private:
    int order_ = 0;
    int size_ = 0;
    std::vector<int8_t> grid_;  // -1 empty
    std::vector<uint64_t> row_occ_, col_occ_, row_sym_, col_sym_, sym_rows_, sym_cols_;
};

// Cayley table of Z_m^n under the fixed digit encoding. For m = 2 the
// symbol at (i,j) is i XOR j.
LatinSquare elementary_abelian_square(const GroupSpec& spec);

// True iff the square array satisfies the Latin square invariants.
// Ragged input or out-of-range symbols are structural errors.
bool is_latin(const std::vector<std::vector<int>>& grid);

// True iff the induced |rows| x |cols| array is a Latin square on some
// symbol set. Requires |rows| == |cols|.
bool is_subsquare(const LatinSquare& L, std::span<const int> rows, std::span<const int> cols);

// Image of P under (i,j;k) -> (rowPerm[i], colPerm[j]; symPerm[k]).
PartialLatinSquare apply_isotopism(const PartialLatinSquare& P,
                                   std::span<const int> row_perm,
                                   std::span<const int> col_perm,
                                   std::span<const int> sym_perm);

// Band structure of an order-9 square: three row triples, three column
// triples, three symbol triples, each partitioning 0..8.
struct BandPartition {
    std::array<std::array<int, 3>, 3> row_bands;
    std::array<std::array<int, 3>, 3> col_bands;
    std::array<std::array<int, 3>, 3> symbol_bands;

    static BandPartition contiguous_order9();
    int row_band_of(int r) const;
    int col_band_of(int c) const;
};

// Entry (i,j) counts the cells of P in row band i and column band j.
std::array<std::array<int, 3>, 3> band_counts(const PartialLatinSquare& P,
                                              const BandPartition& bands);

// --- PLS text format -----------------------------------------------------
//
//   # comment
//   order N
//   <N rows of N tokens, symbol or '.' for empty, single spaces>

std::string write_pls(const PartialLatinSquare& P);
std::string write_pls(const LatinSquare& L);
PartialLatinSquare parse_pls(std::string_view text);

}  // namespace latinforge
