#include "latinforge/core.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <sstream>
#include <stdexcept>

namespace latinforge {

int GroupSpec::order() const {
    if (base < 2) throw std::invalid_argument("group base must be at least 2");
    if (exponent < 1) throw std::invalid_argument("group exponent must be at least 1");
    long long ord = 1;
    for (int i = 0; i < exponent; ++i) {
        ord *= base;
        if (ord > kMaxOrder)
            throw std::invalid_argument("order " + std::to_string(base) + "^" +
                                        std::to_string(exponent) + " exceeds supported maximum " +
                                        std::to_string(kMaxOrder));
    }
    return static_cast<int>(ord);
}

LatinSquare::LatinSquare(int order, std::vector<int8_t> grid)
    : order_(order), grid_(std::move(grid)) {
    col_of_.assign(static_cast<size_t>(order_) * order_, -1);
    row_of_.assign(static_cast<size_t>(order_) * order_, -1);
    for (int r = 0; r < order_; ++r)
        for (int c = 0; c < order_; ++c) {
            int s = at(r, c);
            col_of_[static_cast<size_t>(r) * order_ + s] = static_cast<int8_t>(c);
            row_of_[static_cast<size_t>(c) * order_ + s] = static_cast<int8_t>(r);
        }
}

LatinSquare LatinSquare::from_grid(const std::vector<std::vector<int>>& grid) {
    if (!is_latin(grid)) throw std::invalid_argument("grid is not a Latin square");
    int n = static_cast<int>(grid.size());
    std::vector<int8_t> flat(static_cast<size_t>(n) * n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) flat[static_cast<size_t>(r) * n + c] = static_cast<int8_t>(grid[r][c]);
    return LatinSquare(n, std::move(flat));
}

LatinSquare LatinSquare::from_flat(int order, std::vector<int8_t> grid) {
    if (order < 1 || order > kMaxOrder) throw std::invalid_argument("unsupported order");
    if (grid.size() != static_cast<size_t>(order) * order)
        throw std::invalid_argument("flat grid size does not match order");
    std::vector<std::vector<int>> rows(order, std::vector<int>(order));
    for (int r = 0; r < order; ++r)
        for (int c = 0; c < order; ++c) rows[r][c] = grid[static_cast<size_t>(r) * order + c];
    if (!is_latin(rows)) throw std::invalid_argument("grid is not a Latin square");
    return LatinSquare(order, std::move(grid));
}

PartialLatinSquare LatinSquare::as_partial() const {
    PartialLatinSquare P(order_);
    for (int r = 0; r < order_; ++r)
        for (int c = 0; c < order_; ++c) P.place({r, c, at(r, c)});
    return P;
}

PartialLatinSquare::PartialLatinSquare(int order) : order_(order) {
    if (order < 1 || order > kMaxOrder)
        throw std::invalid_argument("order must be between 1 and " + std::to_string(kMaxOrder));
    grid_.assign(static_cast<size_t>(order) * order, -1);
    row_occ_.assign(order, 0);
    col_occ_.assign(order, 0);
    row_sym_.assign(order, 0);
    col_sym_.assign(order, 0);
    sym_rows_.assign(order, 0);
    sym_cols_.assign(order, 0);
}

PartialLatinSquare PartialLatinSquare::from_cells(int order, std::span<const Cell> cells) {
    PartialLatinSquare P(order);
    for (const Cell& e : cells) P.place(e);
    return P;
}

void PartialLatinSquare::place(const Cell& e) {
    if (e.row < 0 || e.row >= order_ || e.col < 0 || e.col >= order_ || e.symbol < 0 ||
        e.symbol >= order_)
        throw std::invalid_argument("cell out of range for order " + std::to_string(order_));
    if (filled(e.row, e.col)) throw std::invalid_argument("cell already occupied");
    if ((row_sym_[e.row] >> e.symbol) & 1u)
        throw std::invalid_argument("symbol repeated in row");
    if ((col_sym_[e.col] >> e.symbol) & 1u)
        throw std::invalid_argument("symbol repeated in column");
    grid_[static_cast<size_t>(e.row) * order_ + e.col] = static_cast<int8_t>(e.symbol);
    row_occ_[e.row] |= 1ull << e.col;
    col_occ_[e.col] |= 1ull << e.row;
    row_sym_[e.row] |= 1ull << e.symbol;
    col_sym_[e.col] |= 1ull << e.symbol;
    sym_rows_[e.symbol] |= 1ull << e.row;
    sym_cols_[e.symbol] |= 1ull << e.col;
    ++size_;
}

void PartialLatinSquare::erase(int r, int c) {
    if (r < 0 || r >= order_ || c < 0 || c >= order_ || !filled(r, c))
        throw std::invalid_argument("no entry at the given cell");
    int s = symbol_at(r, c);
    grid_[static_cast<size_t>(r) * order_ + c] = -1;
    row_occ_[r] &= ~(1ull << c);
    col_occ_[c] &= ~(1ull << r);
    row_sym_[r] &= ~(1ull << s);
    col_sym_[c] &= ~(1ull << s);
    sym_rows_[s] &= ~(1ull << r);
    sym_cols_[s] &= ~(1ull << c);
    --size_;
}

std::vector<Cell> PartialLatinSquare::cells() const {
    std::vector<Cell> out;
    out.reserve(size_);
    for (int r = 0; r < order_; ++r)
        for (int c = 0; c < order_; ++c)
            if (filled(r, c)) out.push_back({r, c, symbol_at(r, c)});
    return out;
}

LatinSquare PartialLatinSquare::to_square() const {
    if (!is_complete()) throw std::invalid_argument("partial square is not complete");
    return LatinSquare::from_flat(order_, grid_);
}

bool PartialLatinSquare::subset_of(const LatinSquare& L) const {
    if (order_ != L.order()) return false;
    for (int r = 0; r < order_; ++r) {
        uint64_t occ = row_occ_[r];
        while (occ) {
            int c = std::countr_zero(occ);
            occ &= occ - 1;
            if (symbol_at(r, c) != L.at(r, c)) return false;
        }
    }
    return true;
}

bool PartialLatinSquare::subset_of(const PartialLatinSquare& P) const {
    if (order_ != P.order()) return false;
    for (int r = 0; r < order_; ++r) {
        if ((row_occ_[r] & P.row_occupancy(r)) != row_occ_[r]) return false;
        uint64_t occ = row_occ_[r];
        while (occ) {
            int c = std::countr_zero(occ);
            occ &= occ - 1;
            if (symbol_at(r, c) != P.symbol_at(r, c)) return false;
        }
    }
    return true;
}

LatinSquare elementary_abelian_square(const GroupSpec& spec) {
    int n = spec.order();
    std::vector<int8_t> grid(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            // digit-wise addition mod m of the base-m expansions
            int a = i, b = j, s = 0, pow = 1;
            for (int t = 0; t < spec.exponent; ++t) {
                s += ((a + b) % spec.base) * pow;
                a /= spec.base;
                b /= spec.base;
                pow *= spec.base;
            }
            grid[static_cast<size_t>(i) * n + j] = static_cast<int8_t>(s);
        }
    return LatinSquare::from_flat(n, std::move(grid));
}

bool is_latin(const std::vector<std::vector<int>>& grid) {
    size_t n = grid.size();
    if (n == 0 || n > kMaxOrder) throw std::invalid_argument("unsupported grid size");
    for (const auto& row : grid)
        if (row.size() != n) throw std::invalid_argument("ragged grid");
    std::vector<uint64_t> row_seen(n, 0), col_seen(n, 0);
    for (size_t r = 0; r < n; ++r)
        for (size_t c = 0; c < n; ++c) {
            int s = grid[r][c];
            if (s < 0 || static_cast<size_t>(s) >= n)
                throw std::invalid_argument("symbol out of range");
            uint64_t bit = 1ull << s;
            if (row_seen[r] & bit) return false;
            if (col_seen[c] & bit) return false;
            row_seen[r] |= bit;
            col_seen[c] |= bit;
        }
    return true;
}

bool is_subsquare(const LatinSquare& L, std::span<const int> rows, std::span<const int> cols) {
    if (rows.size() != cols.size())
        throw std::invalid_argument("row and column sets must have equal size");
    size_t m = rows.size();
    if (m == 0 || m > static_cast<size_t>(L.order()))
        throw std::invalid_argument("subsquare size out of range");
    uint64_t symbols = 0;
    for (int r : rows) {
        uint64_t row_syms = 0;
        for (int c : cols) {
            uint64_t bit = 1ull << L.at(r, c);
            if (row_syms & bit) return false;  // cannot happen in a Latin square row
            row_syms |= bit;
        }
        if (symbols == 0)
            symbols = row_syms;
        else if (symbols != row_syms)
            return false;
    }
    if (static_cast<size_t>(std::popcount(symbols)) != m) return false;
    for (int c : cols) {
        uint64_t col_syms = 0;
        for (int r : rows) col_syms |= 1ull << L.at(r, c);
        if (col_syms != symbols) return false;
    }
    return true;
}

namespace {

void check_permutation(std::span<const int> perm, int n, const char* what) {
    if (perm.size() != static_cast<size_t>(n))
        throw std::invalid_argument(std::string(what) + " permutation has wrong length");
    uint64_t seen = 0;
    for (int v : perm) {
        if (v < 0 || v >= n || ((seen >> v) & 1u))
            throw std::invalid_argument(std::string(what) + " map is not a bijection");
        seen |= 1ull << v;
    }
}

}  // namespace

PartialLatinSquare apply_isotopism(const PartialLatinSquare& P,
                                   std::span<const int> row_perm,
                                   std::span<const int> col_perm,
                                   std::span<const int> sym_perm) {
    int n = P.order();
    check_permutation(row_perm, n, "row");
    check_permutation(col_perm, n, "column");
    check_permutation(sym_perm, n, "symbol");
    PartialLatinSquare out(n);
    for (const Cell& e : P.cells())
        out.place({row_perm[e.row], col_perm[e.col], sym_perm[e.symbol]});
    return out;
}

BandPartition BandPartition::contiguous_order9() {
    BandPartition b;
    for (int i = 0; i < 3; ++i) {
        b.row_bands[i] = {3 * i, 3 * i + 1, 3 * i + 2};
        b.col_bands[i] = b.row_bands[i];
        b.symbol_bands[i] = b.row_bands[i];
    }
    return b;
}

namespace {

int band_of(const std::array<std::array<int, 3>, 3>& bands, int v) {
    for (int i = 0; i < 3; ++i)
        for (int x : bands[i])
            if (x == v) return i;
    throw std::invalid_argument("index not covered by band partition");
}

}  // namespace

int BandPartition::row_band_of(int r) const { return band_of(row_bands, r); }
int BandPartition::col_band_of(int c) const { return band_of(col_bands, c); }

std::array<std::array<int, 3>, 3> band_counts(const PartialLatinSquare& P,
                                              const BandPartition& bands) {
    if (P.order() != 9) throw std::invalid_argument("band counts are defined for order 9 only");
    std::array<std::array<int, 3>, 3> counts{};
    for (const Cell& e : P.cells())
        ++counts[bands.row_band_of(e.row)][bands.col_band_of(e.col)];
    return counts;
}

std::string write_pls(const PartialLatinSquare& P) {
    std::string out = "order " + std::to_string(P.order()) + "\n";
    for (int r = 0; r < P.order(); ++r) {
        for (int c = 0; c < P.order(); ++c) {
            if (c) out += ' ';
            int s = P.symbol_at(r, c);
            if (s < 0)
                out += '.';
            else
                out += std::to_string(s);
        }
        out += '\n';
    }
    return out;
}

std::string write_pls(const LatinSquare& L) { return write_pls(L.as_partial()); }

PartialLatinSquare parse_pls(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    int order = -1;
    int line_no = 0;
    std::vector<std::string> tokens;
    while (std::getline(in, line)) {
        ++line_no;
        size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;
        if (order < 0) {
            std::istringstream head(line);
            std::string kw;
            head >> kw >> order;
            if (kw != "order" || order < 1 || order > kMaxOrder)
                throw std::runtime_error("PLS parse error at line " + std::to_string(line_no) +
                                         ": expected 'order N'");
            continue;
        }
        std::istringstream row(line);
        std::string tok;
        while (row >> tok) tokens.push_back(tok);
    }
    if (order < 0) throw std::runtime_error("PLS parse error: missing 'order N' line");
    if (tokens.size() != static_cast<size_t>(order) * order)
        throw std::runtime_error("PLS parse error: expected " +
                                 std::to_string(static_cast<size_t>(order) * order) +
                                 " cell tokens, got " + std::to_string(tokens.size()));
    PartialLatinSquare P(order);
    for (int r = 0; r < order; ++r)
        for (int c = 0; c < order; ++c) {
            const std::string& tok = tokens[static_cast<size_t>(r) * order + c];
            if (tok == ".") continue;
            int value = 0;
            auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
            if (ec != std::errc() || ptr != tok.data() + tok.size() || value < 0 || value >= order)
                throw std::runtime_error("PLS parse error: bad token '" + tok + "'");
            P.place({r, c, value});
        }
    return P;
}

}  // namespace latinforge
