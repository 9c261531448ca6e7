#include <stdexcept>
#include <cstdlib>
#include <fstream>

#include "doctest.h"
#include "latinforge/completion.hpp"
#include "latinforge/constructions.hpp"
#include "latinforge/core.hpp"

using namespace latinforge;

TEST_CASE("construction sizes match their formulas") {
    int svr_sizes[] = {0, 0, 7, 37, 175, 781, 3367};
    int t1_sizes[] = {0, 0, 6, 31, 159, 745, 3291};
    for (int n = 2; n <= 6; ++n) {
        ConstructionResult svr = svr_set(n);
        CHECK(svr.set.size() == svr_sizes[n]);
        CHECK(svr.predicted_size == svr_sizes[n]);
        ConstructionResult t1 = theorem1_set(n);
        CHECK(t1.set.size() == t1_sizes[n]);
        CHECK(t1.predicted_size == t1_sizes[n]);
        LatinSquare L = elementary_abelian_square({2, n});
        CHECK(svr.set.subset_of(L));
        CHECK(t1.set.subset_of(L));
    }
    CHECK_THROWS_AS(svr_set(1), std::invalid_argument);
    CHECK_THROWS_AS(theorem1_set(7), std::invalid_argument);
}

TEST_CASE("small construction sets verify as critical sets") {
    LatinSquare l4 = elementary_abelian_square({2, 2});
    CHECK(verify_critical_set(l4, theorem1_set(2).set).passed());

    LatinSquare l8 = elementary_abelian_square({2, 3});
    CHECK(verify_critical_set(l8, svr_set(3).set).passed());
    CHECK(verify_critical_set(l8, theorem1_set(3).set).passed());
}

TEST_CASE("theorem 1 witnesses meet the set exactly in their cells") {
    for (int n = 2; n <= 4; ++n) {
        ConstructionResult t1 = theorem1_set(n);
        CHECK(t1.witnesses.size() == static_cast<size_t>((1 << (n - 2)) + 2));
        for (const auto& [cell, trade] : t1.witnesses) {
            CHECK(t1.set.contains(cell));
            CHECK(is_trade(trade.body, trade.mate));
            CHECK(trade.body.size() == 4);
            int hits = 0;
            for (const Cell& e : trade.body.cells())
                if (t1.set.contains(e)) ++hits;
            CHECK(hits == 1);
        }
    }
}

TEST_CASE("the completion order replays through propagation") {
    for (int n = 2; n <= 5; ++n) {
        LatinSquare L = elementary_abelian_square({2, n});
        ConstructionResult t1 = theorem1_set(n);
        std::vector<Cell> seq = theorem1_completion_order(n);
        // the listed cells are exactly the removals: absent from D, in L
        CHECK(seq.size() == static_cast<size_t>((1 << (n - 2)) + (1 << n) - 1));
        PartialLatinSquare current = t1.set;
        for (const Cell& e : seq) {
            CHECK_FALSE(current.filled(e.row, e.col));
            CHECK(L.contains(e));
            PropagationResult forced = propagate(current);
            REQUIRE_FALSE(forced.contradiction);
            CHECK(forced.square.contains(e));
            current.place(e);
        }
        PropagationResult done = propagate(current);
        CHECK(done.square == L.as_partial());
    }
}

TEST_CASE("the trimming start set") {
    PartialLatinSquare start2 = dfk_trim_start(2);
    CHECK(start2.size() == 11);  // 7 SvR cells + 4 new back-diagonal cells

    PartialLatinSquare start5 = dfk_trim_start(5);
    CHECK(svr_set(5).set.subset_of(start5));
    LatinSquare l32 = elementary_abelian_square({2, 5});
    CHECK(start5.subset_of(l32));
    PropagationResult res = propagate(start5);
    CHECK_FALSE(res.contradiction);
    CHECK(res.square == l32.as_partial());
}

TEST_CASE("theorem 2 normalization") {
    PartialLatinSquare c29 = bundled_c29();
    PartialLatinSquare normalized = theorem2_normalize(c29);
    BandPartition bands = BandPartition::contiguous_order9();
    auto counts = band_counts(normalized, bands);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(counts[0][0] >= counts[i][j]);
    CHECK(counts[0][0] == 4);  // the maximal band count of the bundled table
    CHECK(normalized.size() == 29);
    LatinSquare l9 = elementary_abelian_square({3, 2});
    CHECK(normalized.subset_of(l9));
    // normalization preserves uniqueness of completion
    CHECK(is_uniquely_completable(normalized, l9).unique());

    // an already normalized set is returned unchanged
    CHECK(theorem2_normalize(normalized) == normalized);

    // the band autotopisms map the cell set of L(9) onto itself
    PartialLatinSquare full = l9.as_partial();
    CHECK(theorem2_normalize(full) == full);
}

TEST_CASE("bundled data files load and validate") {
    PartialLatinSquare c121 = bundled_c121();
    CHECK(c121.size() == 121);
    CHECK(c121.symbol_at(0, 0) == 0);
    CHECK(c121.symbol_at(0, 15) == 15);
    CHECK(c121.subset_of(elementary_abelian_square({2, 4})));

    PartialLatinSquare c29 = bundled_c29();
    CHECK(c29.size() == 29);
    CHECK(c29.symbol_at(0, 8) == 8);
    CHECK(c29.subset_of(elementary_abelian_square({3, 2})));
}

TEST_CASE("corrupted bundled data fails its checksum") {
    // copy the data file, flip one byte, point the env override at the copy
    std::string dir = data_dir();
    std::ifstream in(dir + "/c29_l9.pls", std::ios::binary);
    REQUIRE(in.good());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    bytes[bytes.size() / 2] ^= 1;
    std::string tmpdir = "/tmp/latinforge_corrupt";
    REQUIRE(std::system(("mkdir -p " + tmpdir).c_str()) == 0);
    std::ofstream out(tmpdir + "/c29_l9.pls", std::ios::binary);
    out << bytes;
    out.close();
    setenv("LATINFORGE_DATA", tmpdir.c_str(), 1);
    CHECK_THROWS_AS(bundled_c29(), std::runtime_error);
    unsetenv("LATINFORGE_DATA");
    CHECK(bundled_c29().size() == 29);
}
