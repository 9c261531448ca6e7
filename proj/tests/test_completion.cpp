#include <stdexcept>
#include <random>

#include "doctest.h"
#include "latinforge/completion.hpp"
#include "latinforge/constructions.hpp"
#include "latinforge/core.hpp"

using namespace latinforge;

namespace {

// Test-only oracle: counts completions by plain row-major backtracking,
// no propagation, no heuristics.
long long naive_count(const PartialLatinSquare& P) {
    int n = P.order();
    std::vector<int> grid(n * n, -1);
    for (const Cell& e : P.cells()) grid[e.row * n + e.col] = e.symbol;
    std::vector<uint64_t> row_used(n, 0), col_used(n, 0);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            if (grid[r * n + c] >= 0) {
                row_used[r] |= 1ull << grid[r * n + c];
                col_used[c] |= 1ull << grid[r * n + c];
            }
    long long count = 0;
    auto rec = [&](auto&& self, int pos) -> void {
        while (pos < n * n && grid[pos] >= 0) ++pos;
        if (pos == n * n) {
            ++count;
            return;
        }
        int r = pos / n, c = pos % n;
        for (int s = 0; s < n; ++s) {
            uint64_t bit = 1ull << s;
            if ((row_used[r] & bit) || (col_used[c] & bit)) continue;
            row_used[r] |= bit;
            col_used[c] |= bit;
            self(self, pos + 1);
            row_used[r] &= ~bit;
            col_used[c] &= ~bit;
        }
    };
    rec(rec, 0);
    return count;
}

PartialLatinSquare random_subset(const LatinSquare& L, int keep, std::mt19937& rng) {
    std::vector<Cell> cells = L.as_partial().cells();
    std::shuffle(cells.begin(), cells.end(), rng);
    cells.resize(keep);
    return PartialLatinSquare::from_cells(L.order(), cells);
}

}  // namespace

TEST_CASE("propagation closes forced squares") {
    LatinSquare l4 = elementary_abelian_square({2, 2});
    PartialLatinSquare full = l4.as_partial();
    PropagationResult same = propagate(full);
    CHECK_FALSE(same.contradiction);
    CHECK(same.square == full);

    PartialLatinSquare missing_one = full;
    missing_one.erase(2, 3);
    PropagationResult closed = propagate(missing_one);
    CHECK_FALSE(closed.contradiction);
    CHECK(closed.square == full);

    // the theorem 1 set for n=3 completes by propagation alone
    LatinSquare l8 = elementary_abelian_square({2, 3});
    PropagationResult t1 = propagate(theorem1_set(3).set);
    CHECK_FALSE(t1.contradiction);
    CHECK(t1.square == l8.as_partial());
}

TEST_CASE("propagation signals contradictions") {
    // row 0 needs symbol 2 at (0,2), but column 2 already holds 2
    PartialLatinSquare bad(3);
    bad.place({0, 0, 0});
    bad.place({0, 1, 1});
    bad.place({1, 2, 2});
    PropagationResult res = propagate(bad);
    CHECK(res.contradiction);
}

TEST_CASE("propagation is monotone, idempotent and sound") {
    LatinSquare l8 = elementary_abelian_square({2, 3});
    std::mt19937 rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        PartialLatinSquare P = random_subset(l8, 20 + trial % 30, rng);
        PropagationResult res = propagate(P);
        REQUIRE_FALSE(res.contradiction);
        // monotone: output contains input
        CHECK(P.subset_of(res.square));
        // sound: output is contained in the known completion
        CHECK(res.square.subset_of(l8));
        // idempotent
        PropagationResult again = propagate(res.square);
        CHECK(again.square == res.square);
    }
}

TEST_CASE("completion counts match the naive oracle on small orders") {
    // all Latin squares of orders 2..4
    CHECK(count_completions(PartialLatinSquare(2), 1000).count == 2);
    CHECK(count_completions(PartialLatinSquare(3), 1000).count == 12);
    CountResult order4 = count_completions(PartialLatinSquare(4), 1000);
    CHECK(order4.count == 576);
    CHECK(naive_count(PartialLatinSquare(4)) == 576);

    std::mt19937 rng(3);
    LatinSquare l4 = elementary_abelian_square({2, 2});
    LatinSquare l5 = elementary_abelian_square({5, 1});
    for (int keep = 2; keep <= 10; ++keep) {
        PartialLatinSquare p4 = random_subset(l4, std::min(keep, 16), rng);
        CHECK(count_completions(p4, 1'000'000).count == naive_count(p4));
        PartialLatinSquare p5 = random_subset(l5, std::min(keep, 25), rng);
        CHECK(count_completions(p5, 1'000'000).count == naive_count(p5));
    }
}

TEST_CASE("completion counting on known critical sets") {
    LatinSquare l9 = elementary_abelian_square({3, 2});
    PartialLatinSquare c29 = bundled_c29();
    CHECK(count_completions(c29, 2).count == 1);
    CHECK(count_completions(l9.as_partial(), 2).count == 1);

    CountResult starved = count_completions(PartialLatinSquare(5), 1'000'000'000, 10);
    CHECK(starved.budget_exhausted);
}

TEST_CASE("uniqueness certificates") {
    LatinSquare l16 = elementary_abelian_square({2, 4});
    UniquenessCertificate c121 = is_uniquely_completable(bundled_c121(), l16);
    CHECK(c121.unique());

    LatinSquare l4 = elementary_abelian_square({2, 2});
    PartialLatinSquare svr2 = svr_set(2).set;
    for (const Cell& e : svr2.cells()) {
        PartialLatinSquare reduced = svr2;
        reduced.erase(e.row, e.col);
        UniquenessCertificate cert = is_uniquely_completable(reduced, l4);
        CHECK(cert.status == CertStatus::MultipleCompletions);
        REQUIRE(cert.witness.has_value());
        // the witness differs from L exactly on a trade body
        PartialLatinSquare body(4), mate(4);
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c)
                if (cert.witness->at(r, c) != l4.at(r, c)) {
                    body.place({r, c, l4.at(r, c)});
                    mate.place({r, c, cert.witness->at(r, c)});
                }
        CHECK(body.size() >= 4);
        CHECK(is_trade(body, mate));
    }

    UniquenessCertificate empty = is_uniquely_completable(PartialLatinSquare(2),
                                                          elementary_abelian_square({2, 1}));
    CHECK(empty.status == CertStatus::MultipleCompletions);
}

TEST_CASE("necessity witnesses follow the construction's intercalate formulas") {
    // entries of the theorem 1 set for n=4
    LatinSquare l16 = elementary_abelian_square({2, 4});
    PartialLatinSquare d = theorem1_set(4).set;
    WitnessFinder finder(l16);

    NecessityWitness corner = finder.find(d, {0, 15, 15});
    REQUIRE(corner.status == WitnessStatus::Found);
    const Trade& t = *corner.trade;
    CHECK(t.body.contains({0, 15, 15}));
    CHECK(t.body.contains({0, 7, 7}));
    CHECK(t.body.contains({8, 15, 7}));
    CHECK(t.body.contains({8, 7, 15}));

    for (int x = 0; x < 4; ++x) {
        NecessityWitness diag = finder.find(d, {x, x, 0});
        REQUIRE(diag.status == WitnessStatus::Found);
        CHECK(diag.trade->body.contains({4, 4, 0}));
        CHECK(diag.trade->body.contains({x, x, 0}));
    }

    // every entry of a full square is redundant
    LatinSquare l4 = elementary_abelian_square({2, 2});
    NecessityWitness red = necessity_witness(l4, l4.as_partial(), {0, 0, 0});
    CHECK(red.status == WitnessStatus::Redundant);
}

TEST_CASE("critical set verification") {
    LatinSquare l9 = elementary_abelian_square({3, 2});
    PartialLatinSquare c29 = bundled_c29();
    VerificationReport report = verify_critical_set(l9, c29);
    CHECK(report.passed());
    CHECK(report.necessity.size() == 29);
    for (const auto& [cell, w] : report.necessity) {
        REQUIRE(w.status == WitnessStatus::Found);
        CHECK(is_trade(w.trade->body, w.trade->mate));
        CHECK(w.trade->body.contains(cell));
        int hits = 0;
        for (const Cell& e : w.trade->body.cells())
            if (c29.contains(e)) ++hits;
        CHECK(hits == 1);
    }

    VerificationReport serial = verify_critical_set_serial(l9, c29);
    CHECK(serial.passed());
    REQUIRE(serial.necessity.size() == report.necessity.size());
    for (size_t i = 0; i < serial.necessity.size(); ++i) {
        CHECK(serial.necessity[i].first == report.necessity[i].first);
        CHECK(serial.necessity[i].second.status == report.necessity[i].second.status);
    }

    // a full square is uniquely completable but nothing in it is necessary
    LatinSquare l4 = elementary_abelian_square({2, 2});
    VerificationReport full = verify_critical_set(l4, l4.as_partial());
    CHECK(full.unique.unique());
    CHECK_FALSE(full.passed());

    // dropping an entry from a critical set breaks verification
    PartialLatinSquare reduced = c29;
    Cell first = c29.cells().front();
    reduced.erase(first.row, first.col);
    CHECK_FALSE(verify_critical_set(l9, reduced).passed());

    std::string text = write_verification_report(report);
    CHECK(text.find("PASS") != std::string::npos);
    CHECK(text.find("witnessed 29") != std::string::npos);
}

TEST_CASE("verification implies the two-count cross-check") {
    LatinSquare l4 = elementary_abelian_square({2, 2});
    PartialLatinSquare d2 = theorem1_set(2).set;
    REQUIRE(verify_critical_set(l4, d2).passed());
    CHECK(count_completions(d2, 2).count == 1);
    for (const Cell& e : d2.cells()) {
        PartialLatinSquare reduced = d2;
        reduced.erase(e.row, e.col);
        CHECK(count_completions(reduced, 2).count == 2);
    }

    PartialLatinSquare c29 = bundled_c29();
    CHECK(count_completions(c29, 2).count == 1);
    for (const Cell& e : c29.cells()) {
        PartialLatinSquare reduced = c29;
        reduced.erase(e.row, e.col);
        CHECK(count_completions(reduced, 2).count == 2);
    }
}

TEST_CASE("greedy trim") {
    LatinSquare l4 = elementary_abelian_square({2, 2});

    // an already minimal set is a fixpoint
    PartialLatinSquare d2 = theorem1_set(2).set;
    CHECK(greedy_trim(l4, d2, TrimTest::Search) == d2);

    // trimming the full square yields a verified critical set of size <= 7
    PartialLatinSquare trimmed = greedy_trim(l4, l4.as_partial(), TrimTest::Search);
    CHECK(trimmed.size() <= 7);
    CHECK(verify_critical_set(l4, trimmed).passed());

    // propagation trim of the order-4 start set is propagation minimal
    PartialLatinSquare start = dfk_trim_start(2);
    PartialLatinSquare prop_trimmed = greedy_trim(l4, start, TrimTest::Propagation);
    PropagationResult res = propagate(prop_trimmed);
    CHECK(res.square == l4.as_partial());
    for (const Cell& e : prop_trimmed.cells()) {
        PartialLatinSquare reduced = prop_trimmed;
        reduced.erase(e.row, e.col);
        PropagationResult r = propagate(reduced);
        bool still_complete = !r.contradiction && r.square.is_complete();
        CHECK_FALSE(still_complete);
    }

    // a start set that fails the test is rejected
    PartialLatinSquare weak(4);
    weak.place({0, 0, 0});
    CHECK_THROWS_AS(greedy_trim(l4, weak, TrimTest::Propagation), std::invalid_argument);
}
