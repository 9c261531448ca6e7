#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "latinforge/core.hpp"

namespace latinforge {

// A Latin trade: the body (cells removed from the host square) together
// with a disjoint mutually balanced mate on the same shape.
struct Trade {
    PartialLatinSquare body;
    PartialLatinSquare mate;

    bool operator==(const Trade&) const = default;
};

// Shape equality, cell-wise symbol disjointness, and row/column multiset
// balance. Empty pairs are not trades.
bool is_trade(const PartialLatinSquare& body, const PartialLatinSquare& mate);

// One subsquare given by its row and column index sets.
struct SubsquareMember {
    std::vector<int> rows;
    std::vector<int> cols;

    bool operator==(const SubsquareMember&) const = default;
};

// All subsquares of L(m^n) aligned with one order-m^k subgroup level:
// row and column sets are cosets of a common subgroup.
struct SubsquareFamily {
    int level = 0;
    std::vector<SubsquareMember> members;
};

// The size-4 trades of L in lexicographic (r1,r2,c1,c2) order, each with
// its unique swapped mate.
std::vector<Trade> enumerate_intercalates(const LatinSquare& L);
std::vector<Trade> enumerate_intercalates_serial(const LatinSquare& L);

// All subsquares of L(m^k) level k: coset pairs a+H, b+H of each order-m^k
// subgroup H, deterministic order (subgroup basis lexicographic, then coset
// representatives ascending). Requires prime m and 1 <= k < n.
SubsquareFamily enumerate_group_subsquares(const GroupSpec& spec, int k);

struct TradeEnumLimits {
    int max_size = 20;
    int max_rows = kMaxOrder;
    int max_cols = kMaxOrder;
    int max_symbols = kMaxOrder;
    uint64_t node_budget = 200'000'000;
};

struct TradeEnumResult {
    std::vector<Trade> trades;
    bool complete = true;  // false when the node budget ran out
    uint64_t nodes_used = 0;
};

// All minimal trades of L within the limits (minimal: no proper subset of
// the body is itself a trade body), deduplicated by body cell set, in
// canonical order (body cell lists compared lexicographically).
TradeEnumResult enumerate_trades_bounded(const LatinSquare& L, const TradeEnumLimits& limits);
TradeEnumResult enumerate_trades_bounded_serial(const LatinSquare& L,
                                                const TradeEnumLimits& limits);

// Lexicographically least disjoint mutually balanced mate for a body
// contained in L, or nullopt when none exists.
std::optional<PartialLatinSquare> find_mate(const PartialLatinSquare& body, const LatinSquare& L);

// --- trade list text format ----------------------------------------------
//
// Each record is two PLS blocks (body, mate) separated by a '---' line;
// records are terminated by a '===' line.

std::string write_trade_list(std::span<const Trade> trades);
std::vector<Trade> parse_trade_list(std::string_view text);

}  // namespace latinforge
