#include <stdexcept>
#include <algorithm>
#include <set>

#include "doctest.h"
#include "latinforge/core.hpp"
#include "latinforge/trades.hpp"

using namespace latinforge;

namespace {

// independent brute-force intercalate count: all 2x2 row/column selections
int brute_force_intercalates(const LatinSquare& L) {
    int n = L.order(), count = 0;
    for (int r1 = 0; r1 < n; ++r1)
        for (int r2 = r1 + 1; r2 < n; ++r2)
            for (int c1 = 0; c1 < n; ++c1)
                for (int c2 = c1 + 1; c2 < n; ++c2)
                    if (L.at(r1, c1) == L.at(r2, c2) && L.at(r1, c2) == L.at(r2, c1) &&
                        L.at(r1, c1) != L.at(r1, c2))
                        ++count;
    return count;
}

}  // namespace

TEST_CASE("the introductory 3x6 trade pair is a trade") {
    PartialLatinSquare body(10), mate(10);
    int body_rows[3][6] = {{9, -1, -1, -1, -1, 3}, {3, 4, 5, 6, 7, 8}, {4, 5, 6, 7, 8, 9}};
    int mate_rows[3][6] = {{3, -1, -1, -1, -1, 9}, {4, 5, 6, 7, 8, 3}, {9, 4, 5, 6, 7, 8}};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 6; ++c) {
            if (body_rows[r][c] >= 0) body.place({r, c, body_rows[r][c]});
            if (mate_rows[r][c] >= 0) mate.place({r, c, mate_rows[r][c]});
        }
    CHECK(is_trade(body, mate));
    CHECK_FALSE(is_trade(body, body));  // not disjoint
}

TEST_CASE("intercalates and their swapped mates are trades") {
    LatinSquare l4 = elementary_abelian_square({2, 2});
    std::vector<Trade> trades = enumerate_intercalates(l4);
    CHECK(trades.size() == 12);
    for (const Trade& t : trades) {
        CHECK(t.body.size() == 4);
        CHECK(is_trade(t.body, t.mate));
    }
}

TEST_CASE("intercalate counts match brute force and the closed form") {
    for (int n = 2; n <= 4; ++n) {
        LatinSquare L = elementary_abelian_square({2, n});
        int closed_form = ((1 << n) - 1) * (1 << (n - 1)) * (1 << (n - 1));
        std::vector<Trade> trades = enumerate_intercalates(L);
        CHECK(static_cast<int>(trades.size()) == closed_form);
        CHECK(brute_force_intercalates(L) == closed_form);
        std::vector<Trade> serial = enumerate_intercalates_serial(L);
        REQUIRE(serial.size() == trades.size());
        for (size_t i = 0; i < trades.size(); ++i) CHECK(serial[i] == trades[i]);
    }
    LatinSquare l9 = elementary_abelian_square({3, 2});
    CHECK(enumerate_intercalates(l9).empty());
    CHECK(brute_force_intercalates(l9) == 0);
}

TEST_CASE("intercalates of L(2^n) live exactly on matching translate pairs") {
    for (int n = 2; n <= 4; ++n) {
        LatinSquare L = elementary_abelian_square({2, n});
        int order = L.order();
        std::set<std::array<int, 4>> found;
        for (const Trade& t : enumerate_intercalates(L)) {
            auto cells = t.body.cells();
            found.insert({cells[0].row, cells[2].row, cells[0].col, cells[1].col});
        }
        for (int r1 = 0; r1 < order; ++r1)
            for (int r2 = r1 + 1; r2 < order; ++r2)
                for (int c1 = 0; c1 < order; ++c1)
                    for (int c2 = c1 + 1; c2 < order; ++c2) {
                        bool expected = (r1 ^ r2) == (c1 ^ c2);
                        CHECK(found.count({r1, r2, c1, c2}) == (expected ? 1u : 0u));
                    }
    }
}

TEST_CASE("subsquare family sizes and membership") {
    SubsquareFamily l16_k3 = enumerate_group_subsquares({2, 4}, 3);
    CHECK(l16_k3.members.size() == 60);
    SubsquareFamily l16_k2 = enumerate_group_subsquares({2, 4}, 2);
    CHECK(l16_k2.members.size() == 560);
    SubsquareFamily l16_k1 = enumerate_group_subsquares({2, 4}, 1);
    CHECK(l16_k1.members.size() == 960);
    SubsquareFamily l8_k2 = enumerate_group_subsquares({2, 3}, 2);
    CHECK(l8_k2.members.size() == 28);
    SubsquareFamily l9_k1 = enumerate_group_subsquares({3, 2}, 1);
    CHECK(l9_k1.members.size() == 36);

    CHECK_THROWS_AS(enumerate_group_subsquares({2, 3}, 3), std::invalid_argument);
    CHECK_THROWS_AS(enumerate_group_subsquares({2, 3}, 0), std::invalid_argument);
    CHECK_THROWS_AS(enumerate_group_subsquares({4, 2}, 1), std::invalid_argument);
}

TEST_CASE("order-4 subsquares of L(8) found exhaustively equal the coset family") {
    LatinSquare L = elementary_abelian_square({2, 3});
    std::set<std::pair<std::vector<int>, std::vector<int>>> exhaustive;
    std::vector<int> idx{0, 1, 2, 3, 4, 5, 6, 7};
    std::vector<std::vector<int>> quads;
    for (int a = 0; a < 8; ++a)
        for (int b = a + 1; b < 8; ++b)
            for (int c = b + 1; c < 8; ++c)
                for (int d = c + 1; d < 8; ++d) quads.push_back({a, b, c, d});
    for (const auto& rows : quads)
        for (const auto& cols : quads)
            if (is_subsquare(L, rows, cols)) exhaustive.insert({rows, cols});
    SubsquareFamily family = enumerate_group_subsquares({2, 3}, 2);
    CHECK(exhaustive.size() == family.members.size());
    for (const SubsquareMember& m : family.members)
        CHECK(exhaustive.count({m.rows, m.cols}) == 1);
}

TEST_CASE("order-3 subsquares of L(9) found exhaustively number 36") {
    LatinSquare L = elementary_abelian_square({3, 2});
    int count = 0;
    std::vector<std::vector<int>> triples;
    for (int a = 0; a < 9; ++a)
        for (int b = a + 1; b < 9; ++b)
            for (int c = b + 1; c < 9; ++c) triples.push_back({a, b, c});
    for (const auto& rows : triples)
        for (const auto& cols : triples)
            if (is_subsquare(L, rows, cols)) ++count;
    CHECK(count == 36);
}

TEST_CASE("bounded trade enumeration") {
    LatinSquare l4 = elementary_abelian_square({2, 2});
    TradeEnumLimits tiny;
    tiny.max_size = 3;
    CHECK(enumerate_trades_bounded(l4, tiny).trades.empty());

    TradeEnumLimits four;
    four.max_size = 4;
    TradeEnumResult r4 = enumerate_trades_bounded(l4, four);
    CHECK(r4.complete);
    std::vector<Trade> intercalates = enumerate_intercalates(l4);
    REQUIRE(r4.trades.size() == intercalates.size());
    std::set<std::vector<Cell>> bodies;
    for (const Trade& t : intercalates) bodies.insert(t.body.cells());
    for (const Trade& t : r4.trades) CHECK(bodies.count(t.body.cells()) == 1);

    LatinSquare l9 = elementary_abelian_square({3, 2});
    TradeEnumLimits six;
    six.max_size = 6;
    six.max_rows = six.max_cols = six.max_symbols = 6;
    TradeEnumResult r9 = enumerate_trades_bounded(l9, six);
    CHECK(r9.complete);
    CHECK(r9.trades.size() == 324);
    for (const Trade& t : r9.trades) {
        CHECK(is_trade(t.body, t.mate));
        CHECK(t.body.size() == 6);
        CHECK(t.body.subset_of(l9));
    }

    TradeEnumResult serial = enumerate_trades_bounded_serial(l9, six);
    REQUIRE(serial.trades.size() == r9.trades.size());
    for (size_t i = 0; i < serial.trades.size(); ++i) CHECK(serial.trades[i] == r9.trades[i]);

    // node budget exhaustion reports a partial result
    TradeEnumLimits starved = six;
    starved.node_budget = 50;
    TradeEnumResult partial = enumerate_trades_bounded_serial(l9, starved);
    CHECK_FALSE(partial.complete);
    CHECK(partial.trades.size() < 324);
}

TEST_CASE("bounded trades are closed under translate autotopisms") {
    LatinSquare l9 = elementary_abelian_square({3, 2});
    TradeEnumLimits six;
    six.max_size = 6;
    six.max_rows = six.max_cols = six.max_symbols = 6;
    TradeEnumResult r9 = enumerate_trades_bounded(l9, six);
    std::set<std::vector<Cell>> bodies;
    for (const Trade& t : r9.trades) bodies.insert(t.body.cells());

    // translation by group element a on rows: (i,j;k) -> (a+i, j; a+k)
    auto add3 = [](int x, int y) { return 3 * ((x / 3 + y / 3) % 3) + (x % 3 + y % 3) % 3; };
    for (int a : {1, 3, 4, 7}) {
        std::vector<int> rp(9), cp(9), sp(9);
        for (int i = 0; i < 9; ++i) {
            rp[i] = add3(a, i);
            cp[i] = i;
            sp[i] = add3(a, i);
        }
        for (const Trade& t : r9.trades) {
            PartialLatinSquare image = apply_isotopism(t.body, rp, cp, sp);
            CHECK(bodies.count(image.cells()) == 1);
        }
    }
}

TEST_CASE("find_mate") {
    LatinSquare l4 = elementary_abelian_square({2, 2});
    PartialLatinSquare single(4);
    single.place({0, 0, 0});
    CHECK_FALSE(find_mate(single, l4).has_value());

    Trade intercalate = enumerate_intercalates(l4).front();
    auto mate = find_mate(intercalate.body, l4);
    REQUIRE(mate.has_value());
    CHECK(*mate == intercalate.mate);  // the 2x2 swap is the unique mate

    // size-6 row cycle in L(9): rows 0 and 3, columns {0,3,6}
    LatinSquare l9 = elementary_abelian_square({3, 2});
    PartialLatinSquare cycle(9);
    for (int c : {0, 3, 6}) {
        cycle.place({0, c, l9.at(0, c)});
        cycle.place({3, c, l9.at(3, c)});
    }
    auto cycle_mate = find_mate(cycle, l9);
    REQUIRE(cycle_mate.has_value());
    CHECK(is_trade(cycle, *cycle_mate));

    PartialLatinSquare outside(4);
    outside.place({0, 0, 1});
    CHECK_THROWS_AS(find_mate(outside, l4), std::invalid_argument);
}

TEST_CASE("trade list text round-trips") {
    LatinSquare l4 = elementary_abelian_square({2, 2});
    std::vector<Trade> trades = enumerate_intercalates(l4);
    std::string text = write_trade_list(trades);
    std::vector<Trade> parsed = parse_trade_list(text);
    REQUIRE(parsed.size() == trades.size());
    for (size_t i = 0; i < parsed.size(); ++i) CHECK(parsed[i] == trades[i]);
    CHECK(write_trade_list(parsed) == text);
}
