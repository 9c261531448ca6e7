#include "latinforge/trades.hpp"

#include <algorithm>
#include <bit>
#include <set>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace latinforge {

bool is_trade(const PartialLatinSquare& body, const PartialLatinSquare& mate) {
    if (body.order() != mate.order()) return false;
    if (body.size() == 0 || body.size() != mate.size()) return false;
    int n = body.order();
    for (int r = 0; r < n; ++r) {
        if (body.row_occupancy(r) != mate.row_occupancy(r)) return false;  // same shape
        if (body.row_symbols(r) != mate.row_symbols(r)) return false;      // row balance
    }
    for (int c = 0; c < n; ++c)
        if (body.col_symbols(c) != mate.col_symbols(c)) return false;      // column balance
    for (int r = 0; r < n; ++r) {
        uint64_t occ = body.row_occupancy(r);
        while (occ) {
            int c = std::countr_zero(occ);
            occ &= occ - 1;
            if (body.symbol_at(r, c) == mate.symbol_at(r, c)) return false;  // disjoint
        }
    }
    return true;
}

namespace {

Trade make_intercalate(const LatinSquare& L, int r1, int r2, int c1, int c2) {
    int a = L.at(r1, c1), b = L.at(r1, c2);
    PartialLatinSquare body(L.order()), mate(L.order());
    body.place({r1, c1, a});
    body.place({r1, c2, b});
    body.place({r2, c1, b});
    body.place({r2, c2, a});
    mate.place({r1, c1, b});
    mate.place({r1, c2, a});
    mate.place({r2, c1, a});
    mate.place({r2, c2, b});
    return {std::move(body), std::move(mate)};
}

// Intercalates through row pair (r1,r2), appended in (c1,c2) order.
void intercalates_for_row_pair(const LatinSquare& L, int r1, int r2, std::vector<Trade>& out) {
    int n = L.order();
    for (int c1 = 0; c1 < n; ++c1) {
        int a = L.at(r1, c1), b = L.at(r2, c1);
        if (a == b) continue;
        int c2 = L.column_of(r1, b);
        if (c2 <= c1) continue;
        if (L.at(r2, c2) != a) continue;
        out.push_back(make_intercalate(L, r1, r2, c1, c2));
    }
}

}  // namespace

std::vector<Trade> enumerate_intercalates_serial(const LatinSquare& L) {
    std::vector<Trade> out;
    int n = L.order();
    for (int r1 = 0; r1 < n; ++r1)
        for (int r2 = r1 + 1; r2 < n; ++r2) intercalates_for_row_pair(L, r1, r2, out);
    return out;
}

std::vector<Trade> enumerate_intercalates(const LatinSquare& L) {
    int n = L.order();
    std::vector<std::vector<Trade>> buckets(n);
#pragma omp parallel for schedule(dynamic)
    for (int r1 = 0; r1 < n; ++r1)
        for (int r2 = r1 + 1; r2 < n; ++r2) intercalates_for_row_pair(L, r1, r2, buckets[r1]);
    std::vector<Trade> out;
    for (auto& b : buckets)
        for (auto& t : b) out.push_back(std::move(t));
    return out;
}

namespace {

bool is_prime(int m) {
    if (m < 2) return false;
    for (int d = 2; d * d <= m; ++d)
        if (m % d == 0) return false;
    return true;
}

int add_mod(int a, int b, int m, int n_digits) {
    int s = 0, pow = 1;
    for (int t = 0; t < n_digits; ++t) {
        s += ((a % m + b % m) % m) * pow;
        a /= m;
        b /= m;
        pow *= m;
    }
    return s;
}

int scale_mod(int a, int factor, int m, int n_digits) {
    int s = 0, pow = 1;
    for (int t = 0; t < n_digits; ++t) {
        s += ((a % m) * factor % m) * pow;
        a /= m;
        pow *= m;
    }
    return s;
}

// All k-dimensional subspaces of F_m^n, each as its sorted element list.
// Enumerated via reduced row echelon bases: pivot coordinate sets in
// lexicographic order, then free entries in counting order.
std::vector<std::vector<int>> enumerate_subspaces(int m, int n, int k) {
    std::vector<std::vector<int>> subgroups;
    std::vector<int> pivots(k);
    for (int i = 0; i < k; ++i) pivots[i] = i;
    auto next_combination = [&]() {
        int i = k - 1;
        while (i >= 0 && pivots[i] == n - k + i) --i;
        if (i < 0) return false;
        ++pivots[i];
        for (int j = i + 1; j < k; ++j) pivots[j] = pivots[i] + j - i;
        return true;
    };
    do {
        // free positions: coordinates above each pivot that are not pivots
        std::vector<std::pair<int, int>> free_slots;  // (basis row, coordinate)
        for (int i = 0; i < k; ++i)
            for (int t = pivots[i] + 1; t < n; ++t)
                if (std::find(pivots.begin(), pivots.end(), t) == pivots.end())
                    free_slots.emplace_back(i, t);
        size_t combos = 1;
        for (size_t i = 0; i < free_slots.size(); ++i) combos *= static_cast<size_t>(m);
        std::vector<int> place(n, 1);
        for (int t = 1; t < n; ++t) place[t] = place[t - 1] * m;
        for (size_t code = 0; code < combos; ++code) {
            std::vector<int> basis(k, 0);
            for (int i = 0; i < k; ++i) basis[i] = place[pivots[i]];
            size_t rem = code;
            for (auto [row, coord] : free_slots) {
                int v = static_cast<int>(rem % m);
                rem /= m;
                basis[row] += v * place[coord];
            }
            // span the basis
            std::vector<int> elements{0};
            for (int i = 0; i < k; ++i) {
                std::vector<int> grown;
                grown.reserve(elements.size() * m);
                for (int f = 0; f < m; ++f) {
                    int mult = scale_mod(basis[i], f, m, n);
                    for (int e : elements) grown.push_back(add_mod(e, mult, m, n));
                }
                elements = std::move(grown);
            }
            std::sort(elements.begin(), elements.end());
            subgroups.push_back(std::move(elements));
        }
    } while (next_combination());
    std::sort(subgroups.begin(), subgroups.end());
    return subgroups;
}

}  // namespace

SubsquareFamily enumerate_group_subsquares(const GroupSpec& spec, int k) {
    int order = spec.order();
    if (!is_prime(spec.base))
        throw std::invalid_argument("subsquare families require a prime base");
    if (k < 1 || k >= spec.exponent)
        throw std::invalid_argument("subsquare level must satisfy 1 <= k < n");
    LatinSquare L = elementary_abelian_square(spec);

    SubsquareFamily family;
    family.level = k;
    for (const auto& H : enumerate_subspaces(spec.base, spec.exponent, k)) {
        // minimal representative of each coset, ascending
        std::vector<int> reps;
        std::vector<char> seen(order, 0);
        for (int a = 0; a < order; ++a) {
            if (seen[a]) continue;
            reps.push_back(a);
            for (int h : H) seen[add_mod(a, h, spec.base, spec.exponent)] = 1;
        }
        for (int a : reps)
            for (int b : reps) {
                SubsquareMember member;
                for (int h : H) member.rows.push_back(add_mod(a, h, spec.base, spec.exponent));
                for (int h : H) member.cols.push_back(add_mod(b, h, spec.base, spec.exponent));
                std::sort(member.rows.begin(), member.rows.end());
                std::sort(member.cols.begin(), member.cols.end());
                if (!is_subsquare(L, member.rows, member.cols))
                    throw std::logic_error("coset pair failed the subsquare check");
                family.members.push_back(std::move(member));
            }
    }
    return family;
}

namespace {

// Lexicographically least mate symbol assignment for a shape inside L,
// or empty when the shape has no disjoint mutually balanced mate.
// `cells` must be sorted row-major.
bool mate_for_shape(const LatinSquare& L, std::span<const Cell> cells,
                    std::vector<int>& symbols_out) {
    int n = L.order();
    std::vector<uint64_t> row_supply(n, 0), col_supply(n, 0);
    for (const Cell& e : cells) {
        row_supply[e.row] |= 1ull << e.symbol;
        col_supply[e.col] |= 1ull << e.symbol;
    }
    symbols_out.assign(cells.size(), -1);
    size_t i = 0;
    while (i < cells.size()) {
        const Cell& e = cells[i];
        uint64_t candidates = row_supply[e.row] & col_supply[e.col] & ~(1ull << e.symbol);
        // resume after the symbol tried last time we were at this cell
        int prev = symbols_out[i];
        if (prev >= 0)
            candidates &= (prev + 1 >= 64) ? 0ull : ~((1ull << (prev + 1)) - 1);
        if (candidates) {
            int s = std::countr_zero(candidates);
            symbols_out[i] = s;
            row_supply[e.row] &= ~(1ull << s);
            col_supply[e.col] &= ~(1ull << s);
            ++i;
        } else {
            symbols_out[i] = -1;
            if (i == 0) return false;
            --i;
            int s = symbols_out[i];
            row_supply[cells[i].row] |= 1ull << s;
            col_supply[cells[i].col] |= 1ull << s;
        }
    }
    return true;
}

}  // namespace

std::optional<PartialLatinSquare> find_mate(const PartialLatinSquare& body, const LatinSquare& L) {
    if (!body.subset_of(L)) throw std::invalid_argument("body is not contained in the square");
    std::vector<Cell> cells = body.cells();
    std::vector<int> symbols;
    if (!mate_for_shape(L, cells, symbols)) return std::nullopt;
    PartialLatinSquare mate(L.order());
    for (size_t i = 0; i < cells.size(); ++i)
        mate.place({cells[i].row, cells[i].col, symbols[i]});
    return mate;
}

namespace {

struct ShapeSearch {
    const LatinSquare& L;
    const TradeEnumLimits& limits;
    int n;
    int root_index;

    std::vector<Cell> shape;
    std::vector<int> row_count, col_count, sym_count;
    int rows_used = 0, cols_used = 0, syms_used = 0;

    uint64_t nodes = 0;
    bool budget_out = false;
    // bodies found for this root, keyed by sorted cell-index list
    std::set<std::vector<int>> found;

    ShapeSearch(const LatinSquare& L_, const TradeEnumLimits& lim, int root)
        : L(L_), limits(lim), n(L_.order()), root_index(root),
          row_count(n, 0), col_count(n, 0), sym_count(n, 0) {}

    bool try_add(int r, int c) {
        int s = L.at(r, c);
        if (row_count[r] == 0 && rows_used == limits.max_rows) return false;
        if (col_count[c] == 0 && cols_used == limits.max_cols) return false;
        if (sym_count[s] == 0 && syms_used == limits.max_symbols) return false;
        if (static_cast<int>(shape.size()) == limits.max_size) return false;
        if (row_count[r]++ == 0) ++rows_used;
        if (col_count[c]++ == 0) ++cols_used;
        if (sym_count[s]++ == 0) ++syms_used;
        shape.push_back({r, c, s});
        return true;
    }

    void undo_add() {
        Cell e = shape.back();
        shape.pop_back();
        if (--row_count[e.row] == 0) --rows_used;
        if (--col_count[e.col] == 0) --cols_used;
        if (--sym_count[e.symbol] == 0) --syms_used;
    }

    bool in_shape(int r, int c) const {
        for (const Cell& e : shape)
            if (e.row == r && e.col == c) return true;
        return false;
    }

    void dfs() {
        if (budget_out) return;
        if (++nodes > limits.node_budget) {
            budget_out = true;
            return;
        }
        int deficient_rows = 0, deficient_cols = 0;
        int first_def_row = -1, first_def_col = -1;
        for (int r = 0; r < n; ++r)
            if (row_count[r] == 1) {
                ++deficient_rows;
                if (first_def_row < 0) first_def_row = r;
            }
        for (int c = 0; c < n; ++c)
            if (col_count[c] == 1) {
                ++deficient_cols;
                if (first_def_col < 0) first_def_col = c;
            }
        int need = std::max(deficient_rows, deficient_cols);
        if (static_cast<int>(shape.size()) + need > limits.max_size) return;

        if (first_def_row < 0 && first_def_col < 0) {
            // closed shape: every used line holds at least two cells
            if (shape.size() >= 4) {
                std::vector<Cell> sorted = shape;
                std::sort(sorted.begin(), sorted.end());
                std::vector<int> mate_syms;
                if (mate_for_shape(L, sorted, mate_syms)) {
                    std::vector<int> key;
                    key.reserve(sorted.size());
                    for (const Cell& e : sorted) key.push_back(e.row * n + e.col);
                    found.insert(std::move(key));
                    return;  // supersets of a trade body are never minimal
                }
            }
            // extend with any later cell sharing a used line
            for (int r = 0; r < n; ++r) {
                if (row_count[r] == 0) continue;
                for (int c = 0; c < n; ++c) {
                    if (r * n + c <= root_index || in_shape(r, c)) continue;
                    if (try_add(r, c)) {
                        dfs();
                        undo_add();
                        if (budget_out) return;
                    }
                }
            }
            for (int c = 0; c < n; ++c) {
                if (col_count[c] == 0) continue;
                for (int r = 0; r < n; ++r) {
                    if (row_count[r] > 0) continue;  // already covered above
                    if (r * n + c <= root_index || in_shape(r, c)) continue;
                    if (try_add(r, c)) {
                        dfs();
                        undo_add();
                        if (budget_out) return;
                    }
                }
            }
            return;
        }

        // grow the first deficient line
        if (first_def_row >= 0) {
            int r = first_def_row;
            for (int c = 0; c < n; ++c) {
                if (r * n + c <= root_index || in_shape(r, c)) continue;
                if (try_add(r, c)) {
                    dfs();
                    undo_add();
                    if (budget_out) return;
                }
            }
        } else {
            int c = first_def_col;
            for (int r = 0; r < n; ++r) {
                if (r * n + c <= root_index || in_shape(r, c)) continue;
                if (try_add(r, c)) {
                    dfs();
                    undo_add();
                    if (budget_out) return;
                }
            }
        }
    }
};

TradeEnumResult enumerate_bounded_impl(const LatinSquare& L, const TradeEnumLimits& limits,
                                       bool parallel) {
    if (limits.max_size > 20)
        throw std::invalid_argument("bounded trade enumeration supports max_size <= 20");
    int n = L.order();
    int cells = n * n;
    std::vector<std::set<std::vector<int>>> per_root(cells);
    uint64_t nodes_total = 0;
    bool budget_out = false;

#pragma omp parallel for schedule(dynamic) if (parallel) reduction(|| : budget_out) \
    reduction(+ : nodes_total)
    for (int root = 0; root < cells; ++root) {
        ShapeSearch search(L, limits, root);
        if (search.try_add(root / n, root % n)) {
            search.dfs();
            per_root[root] = std::move(search.found);
        }
        nodes_total += search.nodes;
        budget_out = budget_out || search.budget_out;
    }

    // collect bodies in canonical order (roots ascending, bodies lexicographic)
    std::vector<std::vector<int>> bodies;
    for (auto& bucket : per_root)
        for (const auto& key : bucket) bodies.push_back(key);

    // minimality filter: drop bodies that strictly contain another found body
    std::vector<char> keep(bodies.size(), 1);
    for (size_t i = 0; i < bodies.size(); ++i)
        for (size_t j = 0; j < bodies.size(); ++j) {
            if (i == j || bodies[j].size() >= bodies[i].size()) continue;
            if (std::includes(bodies[i].begin(), bodies[i].end(), bodies[j].begin(),
                              bodies[j].end())) {
                keep[i] = 0;
                break;
            }
        }

    TradeEnumResult result;
    result.complete = !budget_out;
    result.nodes_used = nodes_total;
    for (size_t i = 0; i < bodies.size(); ++i) {
        if (!keep[i]) continue;
        std::vector<Cell> cells_sorted;
        cells_sorted.reserve(bodies[i].size());
        for (int idx : bodies[i]) cells_sorted.push_back({idx / n, idx % n, L.at(idx / n, idx % n)});
        std::vector<int> mate_syms;
        if (!mate_for_shape(L, cells_sorted, mate_syms))
            throw std::logic_error("recorded body lost its mate");
        PartialLatinSquare body(n), mate(n);
        for (size_t t = 0; t < cells_sorted.size(); ++t) {
            body.place(cells_sorted[t]);
            mate.place({cells_sorted[t].row, cells_sorted[t].col, mate_syms[t]});
        }
        result.trades.push_back({std::move(body), std::move(mate)});
    }
    return result;
}

}  // namespace

TradeEnumResult enumerate_trades_bounded(const LatinSquare& L, const TradeEnumLimits& limits) {
    return enumerate_bounded_impl(L, limits, true);
}

TradeEnumResult enumerate_trades_bounded_serial(const LatinSquare& L,
                                                const TradeEnumLimits& limits) {
    return enumerate_bounded_impl(L, limits, false);
}

std::string write_trade_list(std::span<const Trade> trades) {
    std::string out;
    for (const Trade& t : trades) {
        out += write_pls(t.body);
        out += "---\n";
        out += write_pls(t.mate);
        out += "===\n";
    }
    return out;
}

std::vector<Trade> parse_trade_list(std::string_view text) {
    std::vector<Trade> out;
    std::istringstream in{std::string(text)};
    std::string line, body_block, mate_block;
    bool in_mate = false;
    auto flush_record = [&]() {
        if (body_block.empty() && mate_block.empty()) return;
        Trade t{parse_pls(body_block), parse_pls(mate_block)};
        if (!is_trade(t.body, t.mate))
            throw std::runtime_error("trade list record is not a valid trade");
        out.push_back(std::move(t));
        body_block.clear();
        mate_block.clear();
        in_mate = false;
    };
    while (std::getline(in, line)) {
        if (line.rfind("===", 0) == 0) {
            flush_record();
        } else if (line.rfind("---", 0) == 0) {
            in_mate = true;
        } else {
            (in_mate ? mate_block : body_block) += line + "\n";
        }
    }
    flush_record();
    return out;
}

}  // namespace latinforge
