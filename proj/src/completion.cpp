#include "latinforge/completion.hpp"

#include <algorithm>
#include <bit>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace latinforge {

namespace {

uint64_t full_mask(int n) { return (n >= 64) ? ~0ull : ((1ull << n) - 1); }

// One propagation pass; returns true when something was placed.
// Sets *contradiction when a cell or a (line,symbol) placement has no
// candidate left.
bool propagate_pass(PartialLatinSquare& P, bool* contradiction) {
    int n = P.order();
    uint64_t all = full_mask(n);
    bool changed = false;
    // naked singles
    for (int r = 0; r < n; ++r) {
        uint64_t empty_cols = ~P.row_occupancy(r) & all;
        while (empty_cols) {
            int c = std::countr_zero(empty_cols);
            empty_cols &= empty_cols - 1;
            uint64_t cand = ~(P.row_symbols(r) | P.col_symbols(c)) & all;
            if (!cand) {
                *contradiction = true;
                return changed;
            }
            if ((cand & (cand - 1)) == 0) {
                P.place({r, c, std::countr_zero(cand)});
                changed = true;
            }
        }
    }
    // hidden singles: rows, then columns
    for (int r = 0; r < n; ++r) {
        uint64_t missing = ~P.row_symbols(r) & all;
        while (missing) {
            int s = std::countr_zero(missing);
            missing &= missing - 1;
            uint64_t spots = ~P.row_occupancy(r) & ~P.cols_with(s) & all;
            if (!spots) {
                *contradiction = true;
                return changed;
            }
            if ((spots & (spots - 1)) == 0) {
                P.place({r, std::countr_zero(spots), s});
                changed = true;
            }
        }
    }
    for (int c = 0; c < n; ++c) {
        uint64_t missing = ~P.col_symbols(c) & all;
        while (missing) {
            int s = std::countr_zero(missing);
            missing &= missing - 1;
            uint64_t spots = ~P.col_occupancy(c) & ~P.rows_with(s) & all;
            if (!spots) {
                *contradiction = true;
                return changed;
            }
            if ((spots & (spots - 1)) == 0) {
                P.place({std::countr_zero(spots), c, s});
                changed = true;
            }
        }
    }
    return changed;
}

}  // namespace

PropagationResult propagate(const PartialLatinSquare& P) {
    PropagationResult res{P, false};
    while (!res.contradiction && propagate_pass(res.square, &res.contradiction)) {
    }
    return res;
}

namespace {

// Backtracking completion search. Calls `emit` for each completion found;
// stops when `emit` returns false or the node budget runs out.
struct CompletionSearch {
    uint64_t node_budget;
    uint64_t nodes = 0;
    bool budget_out = false;

    template <typename Emit>
    bool run(const PartialLatinSquare& P, Emit&& emit) {
        PropagationResult prop = propagate(P);
        if (prop.contradiction) return true;
        if (prop.square.is_complete()) return emit(prop.square);
        return branch(prop.square, emit);
    }

  private:
    template <typename Emit>
    bool branch(const PartialLatinSquare& P, Emit&& emit) {
        if (++nodes > node_budget) {
            budget_out = true;
            return false;
        }
        int n = P.order();
        uint64_t all = full_mask(n);
        // minimum-remaining-candidates cell, lowest index tie-break
        int best_r = -1, best_c = -1, best_count = n + 1;
        for (int r = 0; r < n && best_count > 2; ++r) {
            uint64_t empty_cols = ~P.row_occupancy(r) & all;
            while (empty_cols) {
                int c = std::countr_zero(empty_cols);
                empty_cols &= empty_cols - 1;
                int count = std::popcount(~(P.row_symbols(r) | P.col_symbols(c)) & all);
                if (count < best_count) {
                    best_count = count;
                    best_r = r;
                    best_c = c;
                    if (count <= 2) break;
                }
            }
        }
        uint64_t cand = ~(P.row_symbols(best_r) | P.col_symbols(best_c)) & all;
        while (cand) {
            int s = std::countr_zero(cand);
            cand &= cand - 1;
            PartialLatinSquare child = P;
            child.place({best_r, best_c, s});
            PropagationResult prop = propagate(child);
            if (prop.contradiction) continue;
            if (prop.square.is_complete()) {
                if (!emit(prop.square)) return false;
                continue;
            }
            if (!branch(prop.square, emit)) return false;
        }
        return true;
    }
};

}  // namespace

CountResult count_completions(const PartialLatinSquare& P, long long limit, uint64_t node_budget) {
    if (limit < 1) throw std::invalid_argument("completion count limit must be at least 1");
    CompletionSearch search{node_budget};
    CountResult res;
    search.run(P, [&](const PartialLatinSquare&) {
        ++res.count;
        return res.count < limit;
    });
    res.budget_exhausted = search.budget_out;
    res.nodes_used = search.nodes;
    return res;
}

EnumerateCompletionsResult enumerate_completions(const PartialLatinSquare& P, long long limit,
                                                 uint64_t node_budget) {
    if (limit < 1) throw std::invalid_argument("completion limit must be at least 1");
    CompletionSearch search{node_budget};
    EnumerateCompletionsResult res;
    search.run(P, [&](const PartialLatinSquare& full) {
        res.squares.push_back(full.to_square());
        return static_cast<long long>(res.squares.size()) < limit;
    });
    res.budget_exhausted = search.budget_out;
    res.nodes_used = search.nodes;
    return res;
}

const char* to_string(CertStatus s) {
    switch (s) {
        case CertStatus::PropagationComplete: return "propagation-complete";
        case CertStatus::SearchProvenUnique: return "search-proven-unique";
        case CertStatus::MultipleCompletions: return "multiple-completions";
        case CertStatus::Incompletable: return "incompletable";
        case CertStatus::BudgetExceeded: return "budget-exceeded";
    }
    return "?";
}

UniquenessCertificate is_uniquely_completable(const PartialLatinSquare& P, const LatinSquare& L,
                                              uint64_t node_budget) {
    if (!P.subset_of(L)) throw std::invalid_argument("partial square is not contained in L");
    UniquenessCertificate cert;
    PropagationResult prop = propagate(P);
    if (prop.contradiction) {
        cert.status = CertStatus::Incompletable;  // cannot happen for subsets of L
        return cert;
    }
    if (prop.square.is_complete() && prop.square == L.as_partial()) {
        cert.status = CertStatus::PropagationComplete;
        return cert;
    }
    EnumerateCompletionsResult found = enumerate_completions(P, 2, node_budget);
    cert.nodes_used = found.nodes_used;
    if (found.budget_exhausted && found.squares.size() < 2) {
        cert.status = CertStatus::BudgetExceeded;
        return cert;
    }
    if (found.squares.size() >= 2) {
        cert.status = CertStatus::MultipleCompletions;
        for (const LatinSquare& sq : found.squares)
            if (!(sq == L)) {
                cert.witness = sq;
                break;
            }
        return cert;
    }
    cert.status = CertStatus::SearchProvenUnique;
    return cert;
}

WitnessFinder::WitnessFinder(const LatinSquare& L, uint64_t node_budget)
    : L_(L), node_budget_(node_budget) {
    intercalates_ = enumerate_intercalates_serial(L);
    if (L.order() <= 9 && intercalates_.empty()) {
        // orders with no intercalates (e.g. 9) fall back to small trades
        TradeEnumLimits limits;
        limits.max_size = 6;
        limits.max_rows = limits.max_cols = limits.max_symbols = 6;
        limits.node_budget = node_budget;
        TradeEnumResult r = enumerate_trades_bounded_serial(L, limits);
        if (r.complete) bounded_trades_ = std::move(r.trades);
    }
}

namespace {

// true when T's body meets C exactly in {e}
bool witnesses_entry(const Trade& T, const PartialLatinSquare& C, const Cell& e) {
    if (!T.body.contains(e)) return false;
    for (const Cell& x : T.body.cells())
        if (!(x == e) && C.contains(x)) return false;
    return true;
}

}  // namespace

NecessityWitness WitnessFinder::find(const PartialLatinSquare& C, const Cell& e) const {
    NecessityWitness out;
    for (const Trade& T : intercalates_)
        if (witnesses_entry(T, C, e)) {
            out.status = WitnessStatus::Found;
            out.trade = T;
            return out;
        }
    for (const Trade& T : bounded_trades_)
        if (witnesses_entry(T, C, e)) {
            out.status = WitnessStatus::Found;
            out.trade = T;
            return out;
        }
    // A witness exists exactly when some completion of C minus the entry
    // places a different symbol in the entry's cell; the difference with L
    // is then a trade meeting C only there.
    PartialLatinSquare reduced = C;
    reduced.erase(e.row, e.col);
    int n = L_.order();
    bool starved = false;
    for (int s = 0; s < n; ++s) {
        if (s == e.symbol || !reduced.can_place(e.row, e.col, s)) continue;
        PartialLatinSquare alt = reduced;
        alt.place({e.row, e.col, s});
        EnumerateCompletionsResult found = enumerate_completions(alt, 1, node_budget_);
        if (found.squares.empty()) {
            starved = starved || found.budget_exhausted;
            continue;
        }
        const LatinSquare& other = found.squares.front();
        PartialLatinSquare body(n), mate(n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
                if (L_.at(r, c) != other.at(r, c)) {
                    body.place({r, c, L_.at(r, c)});
                    mate.place({r, c, other.at(r, c)});
                }
        Trade T{std::move(body), std::move(mate)};
        if (!is_trade(T.body, T.mate) || !witnesses_entry(T, C, e))
            throw std::logic_error("completion difference is not a witness trade");
        out.status = WitnessStatus::Found;
        out.trade = std::move(T);
        return out;
    }
    out.status = starved ? WitnessStatus::BudgetExceeded : WitnessStatus::Redundant;
    return out;
}

NecessityWitness necessity_witness(const LatinSquare& L, const PartialLatinSquare& C,
                                   const Cell& e, uint64_t node_budget) {
    if (!C.contains(e)) throw std::invalid_argument("entry is not part of the candidate set");
    if (!C.subset_of(L)) throw std::invalid_argument("candidate set is not contained in L");
    return WitnessFinder(L, node_budget).find(C, e);
}

bool VerificationReport::passed() const {
    if (!unique.unique()) return false;
    for (const auto& [cell, witness] : necessity)
        if (witness.status != WitnessStatus::Found) return false;
    return true;
}

namespace {

VerificationReport verify_impl(const LatinSquare& L, const PartialLatinSquare& C,
                               uint64_t node_budget, bool parallel) {
    if (!C.subset_of(L)) throw std::invalid_argument("candidate set is not contained in L");
    VerificationReport report;
    report.unique = is_uniquely_completable(C, L, node_budget);
    WitnessFinder finder(L, node_budget);
    std::vector<Cell> entries = C.cells();
    report.necessity.resize(entries.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (size_t i = 0; i < entries.size(); ++i)
        report.necessity[i] = {entries[i], finder.find(C, entries[i])};
    return report;
}

}  // namespace

VerificationReport verify_critical_set(const LatinSquare& L, const PartialLatinSquare& C,
                                       uint64_t node_budget) {
    return verify_impl(L, C, node_budget, true);
}

VerificationReport verify_critical_set_serial(const LatinSquare& L, const PartialLatinSquare& C,
                                              uint64_t node_budget) {
    return verify_impl(L, C, node_budget, false);
}

std::string write_verification_report(const VerificationReport& report) {
    std::ostringstream out;
    out << "verification " << (report.passed() ? "PASS" : "FAIL") << "\n";
    out << "uniqueness " << to_string(report.unique.status) << " nodes "
        << report.unique.nodes_used << "\n";
    out << "entries " << report.necessity.size() << "\n";
    size_t witnessed = 0;
    for (const auto& [cell, w] : report.necessity)
        if (w.status == WitnessStatus::Found) ++witnessed;
    out << "witnessed " << witnessed << "\n";
    for (const auto& [cell, w] : report.necessity) {
        out << "entry " << cell.row << " " << cell.col << " " << cell.symbol << " ";
        switch (w.status) {
            case WitnessStatus::Found: out << "witnessed\n"; break;
            case WitnessStatus::Redundant: out << "REDUNDANT\n"; break;
            case WitnessStatus::BudgetExceeded: out << "BUDGET-EXCEEDED\n"; break;
        }
        if (w.trade) out << write_trade_list(std::span<const Trade>(&*w.trade, 1));
    }
    return out.str();
}

PartialLatinSquare greedy_trim(const LatinSquare& L, const PartialLatinSquare& S, TrimTest test,
                               uint64_t node_budget) {
    auto passes = [&](const PartialLatinSquare& P) {
        if (test == TrimTest::Propagation) {
            PropagationResult prop = propagate(P);
            return !prop.contradiction && prop.square.is_complete() &&
                   prop.square == L.as_partial();
        }
        CountResult res = count_completions(P, 2, node_budget);
        // a budget blow-up counts as failure: the entry is kept
        return !res.budget_exhausted && res.count == 1;
    };
    if (!S.subset_of(L)) throw std::invalid_argument("start set is not contained in L");
    if (!passes(S)) throw std::invalid_argument("start set fails the chosen completability test");
    PartialLatinSquare current = S;
    bool removed_any = true;
    while (removed_any) {
        removed_any = false;
        for (const Cell& e : current.cells()) {  // row-major scan
            current.erase(e.row, e.col);
            if (passes(current)) {
                removed_any = true;
            } else {
                current.place(e);
            }
        }
    }
    return current;
}

}  // namespace latinforge
