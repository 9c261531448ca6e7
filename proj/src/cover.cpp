#include "latinforge/cover.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace latinforge {

namespace {

bool is_covering_tag(const std::string& tag) {
    return tag != "symmetry" && tag != "cardinality";
}

std::string var_name(int order, int index) {
    return "x_" + std::to_string(index / order) + "_" + std::to_string(index % order);
}

}  // namespace

CoverInstance build_hierarchical_cover(const GroupSpec& spec, int max_level,
                                       std::vector<int> rhs_scheme) {
    if (spec.base != 2)
        throw std::invalid_argument("hierarchical cover instances are defined for base 2");
    int n_exp = spec.exponent;
    if (max_level < 1 || max_level >= n_exp)
        throw std::invalid_argument("level range must satisfy 1 <= max_level < n");
    if (rhs_scheme.empty()) {
        rhs_scheme.resize(max_level);
        int v = 1;
        for (int k = 0; k < max_level; ++k, v *= 5) rhs_scheme[k] = v;
    }
    if (rhs_scheme.size() != static_cast<size_t>(max_level))
        throw std::invalid_argument("rhs scheme length must equal max_level");

    int order = spec.order();
    CoverInstance inst;
    inst.order = order;
    inst.name = "hier-l" + std::to_string(order) + "-k" + std::to_string(max_level);
    inst.source = elementary_abelian_square(spec);
    for (int k = 1; k <= max_level; ++k) {
        SubsquareFamily family = enumerate_group_subsquares(spec, k);
        for (const SubsquareMember& member : family.members) {
            LinearConstraint c;
            c.sense = Sense::Ge;
            c.rhs = rhs_scheme[k - 1];
            c.tag = "I" + std::to_string(k);
            for (int r : member.rows)
                for (int col : member.cols) c.terms.emplace_back(r * order + col, 1);
            std::sort(c.terms.begin(), c.terms.end());
            inst.constraints.push_back(std::move(c));
        }
    }
    return inst;
}

CoverInstance build_trade_cover(const LatinSquare& L, std::span<const Trade> trades) {
    if (trades.empty()) throw std::invalid_argument("trade list is empty");
    CoverInstance inst;
    inst.order = L.order();
    inst.name = "trades-l" + std::to_string(L.order());
    inst.source = L;
    for (const Trade& t : trades) {
        if (!t.body.subset_of(L))
            throw std::invalid_argument("trade body is not contained in the square");
        LinearConstraint c;
        c.sense = Sense::Ge;
        c.rhs = 1;
        c.tag = "trade";
        for (const Cell& e : t.body.cells()) c.terms.emplace_back(e.row * L.order() + e.col, 1);
        inst.constraints.push_back(std::move(c));
    }
    return inst;
}

CoverInstance add_rc_symmetry(CoverInstance inst, const BandPartition& bands) {
    if (inst.order != 9) throw std::invalid_argument("RC symmetry requires order 9");
    for (int bi = 0; bi < 3; ++bi)
        for (int bj = 0; bj < 3; ++bj) {
            if (bi == 0 && bj == 0) continue;
            LinearConstraint c;
            c.sense = Sense::Ge;
            c.rhs = 0;
            c.tag = "symmetry";
            for (int r : bands.row_bands[0])
                for (int col : bands.col_bands[0]) c.terms.emplace_back(r * 9 + col, 1);
            for (int r : bands.row_bands[bi])
                for (int col : bands.col_bands[bj]) c.terms.emplace_back(r * 9 + col, -1);
            inst.constraints.push_back(std::move(c));
        }
    return inst;
}

CoverInstance add_cardinality_constraints(CoverInstance inst, CardinalityMode mode) {
    if (mode == CardinalityMode::RowsCols78) {
        if (inst.order != 16)
            throw std::invalid_argument("rows-cols-7-8 cardinality requires order 16");
        LatinSquare L = instance_square(inst);
        auto push_line = [&](const std::vector<int>& cells) {
            for (int bound = 0; bound < 2; ++bound) {
                LinearConstraint c;
                c.sense = bound == 0 ? Sense::Ge : Sense::Le;
                c.rhs = bound == 0 ? 7 : 8;
                c.tag = "cardinality";
                for (int idx : cells) c.terms.emplace_back(idx, 1);
                inst.constraints.push_back(std::move(c));
            }
        };
        for (int r = 0; r < 16; ++r) {
            std::vector<int> cells;
            for (int col = 0; col < 16; ++col) cells.push_back(r * 16 + col);
            push_line(cells);
        }
        for (int col = 0; col < 16; ++col) {
            std::vector<int> cells;
            for (int r = 0; r < 16; ++r) cells.push_back(r * 16 + col);
            push_line(cells);
        }
        for (int s = 0; s < 16; ++s) {
            std::vector<int> cells;
            for (int r = 0; r < 16; ++r) cells.push_back(r * 16 + L.column_of(r, s));
            push_line(cells);
        }
        return inst;
    }
    if (inst.order != 9)
        throw std::invalid_argument("subsquares-exactly-3 cardinality requires order 9");
    SubsquareFamily family = enumerate_group_subsquares({3, 2}, 1);
    for (const SubsquareMember& member : family.members) {
        LinearConstraint c;
        c.sense = Sense::Eq;
        c.rhs = 3;
        c.tag = "cardinality";
        for (int r : member.rows)
            for (int col : member.cols) c.terms.emplace_back(r * 9 + col, 1);
        std::sort(c.terms.begin(), c.terms.end());
        inst.constraints.push_back(std::move(c));
    }
    return inst;
}

namespace {

void append_terms(std::string& out, const std::vector<std::pair<int, int>>& terms, int order,
                  const std::string& head, const std::string& cont_indent) {
    out += head;
    int on_line = 0;
    for (size_t i = 0; i < terms.size(); ++i) {
        auto [idx, coeff] = terms[i];
        std::string piece;
        if (i == 0) {
            if (coeff < 0) piece += "- ";
            if (std::abs(coeff) != 1) piece += std::to_string(std::abs(coeff)) + " ";
            piece += var_name(order, idx);
        } else {
            piece += coeff < 0 ? "- " : "+ ";
            if (std::abs(coeff) != 1) piece += std::to_string(std::abs(coeff)) + " ";
            piece += var_name(order, idx);
        }
        if (on_line == 8) {
            out += "\n" + cont_indent;
            on_line = 0;
        } else if (i > 0) {
            out += " ";
        }
        out += piece;
        ++on_line;
    }
}

const char* sense_text(Sense s) {
    switch (s) {
        case Sense::Ge: return ">=";
        case Sense::Le: return "<=";
        case Sense::Eq: return "=";
    }
    return "?";
}

}  // namespace

std::string export_lp(const CoverInstance& inst) {
    std::string out = "Minimize\n";
    std::vector<std::pair<int, int>> objective;
    for (int i = 0; i < inst.num_vars(); ++i) objective.emplace_back(i, 1);
    append_terms(out, objective, inst.order, " obj: ", "      ");
    out += "\nSubject To\n";
    for (size_t k = 0; k < inst.constraints.size(); ++k) {
        const LinearConstraint& c = inst.constraints[k];
        if (!c.tag.empty()) out += "\\ tag: " + c.tag + "\n";
        std::string head = " c" + std::to_string(k + 1) + ": ";
        append_terms(out, c.terms, inst.order, head, "      ");
        out += std::string(" ") + sense_text(c.sense) + " " + std::to_string(c.rhs) + "\n";
    }
    out += "Binaries\n";
    for (int i = 0; i < inst.num_vars(); ++i) {
        if (i % 10 == 0)
            out += (i ? "\n " : " ");
        else
            out += " ";
        out += var_name(inst.order, i);
    }
    out += "\nEnd\n";
    return out;
}

namespace {

struct LpParser {
    std::istringstream in;
    std::string line;
    int line_no = 0;

    explicit LpParser(std::string_view text) : in(std::string(text)) {}

    [[noreturn]] void fail(const std::string& msg) const {
        throw std::runtime_error("LP parse error at line " + std::to_string(line_no) + ": " + msg);
    }

    bool next_line() {
        if (!std::getline(in, line)) return false;
        ++line_no;
        return true;
    }
};

int parse_var(const std::string& tok, LpParser& p) {
    if (tok.rfind("x_", 0) != 0) p.fail("unknown variable name '" + tok + "'");
    size_t second = tok.find('_', 2);
    if (second == std::string::npos) p.fail("unknown variable name '" + tok + "'");
    int r = 0, c = 0;
    auto [p1, e1] = std::from_chars(tok.data() + 2, tok.data() + second, r);
    auto [p2, e2] =
        std::from_chars(tok.data() + second + 1, tok.data() + tok.size(), c);
    if (e1 != std::errc() || e2 != std::errc() || p1 != tok.data() + second ||
        p2 != tok.data() + tok.size() || r < 0 || c < 0)
        p.fail("unknown variable name '" + tok + "'");
    return r * 1000 + c;  // packed; rescaled once the order is known
}

}  // namespace

CoverInstance import_lp(std::string_view text) {
    LpParser p(text);
    CoverInstance inst;
    enum class Section { None, Objective, Constraints, Binaries, Done };
    Section section = Section::None;

    struct RawConstraint {
        std::vector<std::pair<int, int>> packed_terms;  // (r*1000+c, coeff)
        Sense sense = Sense::Ge;
        int rhs = 0;
        std::string tag;
    };
    std::vector<RawConstraint> raws;
    std::vector<std::pair<int, int>> objective_packed;
    std::vector<int> binaries_packed;
    std::string pending_tag;
    RawConstraint* current = nullptr;
    bool current_closed = true;

    auto parse_terms_into = [&](std::vector<std::pair<int, int>>& terms,
                                std::istringstream& words, RawConstraint* rc) {
        int sign = 1;
        int coeff = 1;
        std::string tok;
        while (words >> tok) {
            if (tok == "+") {
                sign = 1;
            } else if (tok == "-") {
                sign = -1;
            } else if (tok == ">=" || tok == "<=" || tok == "=") {
                if (!rc) p.fail("relational operator outside a constraint");
                rc->sense = tok == ">=" ? Sense::Ge : (tok == "<=" ? Sense::Le : Sense::Eq);
                int rhs = 0;
                if (!(words >> rhs)) p.fail("missing right-hand side");
                rc->rhs = rhs;
                current_closed = true;
            } else if (!tok.empty() && (std::isdigit(static_cast<unsigned char>(tok[0])))) {
                int v = 0;
                auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
                if (ec != std::errc() || ptr != tok.data() + tok.size())
                    p.fail("bad token '" + tok + "'");
                coeff = v;
            } else {
                int packed = parse_var(tok, p);
                terms.emplace_back(packed, sign * coeff);
                sign = 1;
                coeff = 1;
            }
        }
    };

    while (p.next_line()) {
        std::string trimmed = p.line;
        while (!trimmed.empty() && (trimmed.back() == '\r' || trimmed.back() == ' '))
            trimmed.pop_back();
        size_t start = trimmed.find_first_not_of(' ');
        if (start == std::string::npos) continue;
        if (trimmed[start] == '\\') {
            size_t tag_pos = trimmed.find("tag:");
            if (tag_pos != std::string::npos) {
                pending_tag = trimmed.substr(tag_pos + 4);
                size_t s = pending_tag.find_first_not_of(' ');
                pending_tag = s == std::string::npos ? "" : pending_tag.substr(s);
            }
            continue;
        }
        std::string body = trimmed.substr(start);
        if (body == "Minimize") {
            section = Section::Objective;
            continue;
        }
        if (body == "Subject To") {
            section = Section::Constraints;
            continue;
        }
        if (body == "Binaries") {
            section = Section::Binaries;
            continue;
        }
        if (body == "End") {
            section = Section::Done;
            continue;
        }
        switch (section) {
            case Section::Objective: {
                std::string rest = body;
                size_t colon = rest.find(':');
                if (colon != std::string::npos) rest = rest.substr(colon + 1);
                std::istringstream words(rest);
                parse_terms_into(objective_packed, words, nullptr);
                break;
            }
            case Section::Constraints: {
                std::string rest = body;
                size_t colon = rest.find(':');
                if (colon != std::string::npos && rest.compare(0, 1, "c") == 0) {
                    raws.emplace_back();
                    current = &raws.back();
                    current->tag = pending_tag;
                    pending_tag.clear();
                    current_closed = false;
                    rest = rest.substr(colon + 1);
                } else if (!current || current_closed) {
                    p.fail("constraint body without a name");
                }
                std::istringstream words(rest);
                parse_terms_into(current->packed_terms, words, current);
                break;
            }
            case Section::Binaries: {
                std::istringstream words(body);
                std::string tok;
                while (words >> tok) binaries_packed.push_back(parse_var(tok, p));
                break;
            }
            case Section::None:
            case Section::Done:
                p.fail("unexpected content '" + body + "'");
        }
    }

    // the Binaries section is the canonical full variable list
    size_t nv = binaries_packed.size();
    int order = static_cast<int>(std::llround(std::sqrt(static_cast<double>(nv))));
    if (nv == 0 || static_cast<size_t>(order) * order != nv)
        throw std::runtime_error("LP parse error: Binaries section does not cover a square grid");
    inst.order = order;
    auto unpack = [&](int packed) {
        int r = packed / 1000, c = packed % 1000;
        if (r >= order || c >= order)
            throw std::runtime_error("LP parse error: variable outside the " +
                                     std::to_string(order) + "x" + std::to_string(order) +
                                     " grid");
        return r * order + c;
    };
    for (const RawConstraint& rc : raws) {
        LinearConstraint c;
        c.sense = rc.sense;
        c.rhs = rc.rhs;
        c.tag = rc.tag;
        for (auto [packed, coeff] : rc.packed_terms) c.terms.emplace_back(unpack(packed), coeff);
        inst.constraints.push_back(std::move(c));
    }
    inst.name = "imported";
    return inst;
}

bool satisfies(const LinearConstraint& c, std::span<const uint8_t> assignment) {
    long long lhs = 0;
    for (auto [idx, coeff] : c.terms) lhs += static_cast<long long>(coeff) * assignment[idx];
    switch (c.sense) {
        case Sense::Ge: return lhs >= c.rhs;
        case Sense::Le: return lhs <= c.rhs;
        case Sense::Eq: return lhs == c.rhs;
    }
    return false;
}

bool check_feasible(const CoverInstance& inst, std::span<const uint8_t> assignment) {
    if (assignment.size() != static_cast<size_t>(inst.num_vars())) return false;
    for (const LinearConstraint& c : inst.constraints)
        if (!satisfies(c, assignment)) return false;
    return true;
}

int lower_bound_packing(const CoverInstance& inst) {
    std::vector<size_t> idx;
    for (size_t i = 0; i < inst.constraints.size(); ++i) {
        const LinearConstraint& c = inst.constraints[i];
        if (c.sense != Sense::Ge || !is_covering_tag(c.tag)) continue;
        for (auto [v, coeff] : c.terms) {
            (void)v;
            if (coeff <= 0)
                throw std::invalid_argument("packing bound needs positive coefficients");
        }
        idx.push_back(i);
    }
    std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
        const auto& ca = inst.constraints[a];
        const auto& cb = inst.constraints[b];
        if (ca.rhs != cb.rhs) return ca.rhs > cb.rhs;
        return ca.terms.size() < cb.terms.size();
    });
    std::vector<char> used(inst.num_vars(), 0);
    int bound = 0;
    for (size_t i : idx) {
        const LinearConstraint& c = inst.constraints[i];
        bool disjoint = true;
        for (const auto& term : c.terms)
            if (used[term.first]) {
                disjoint = false;
                break;
            }
        if (!disjoint) continue;
        for (const auto& term : c.terms) used[term.first] = 1;
        bound += c.rhs;
    }
    return bound;
}

std::map<std::pair<std::string, int>, int> report_slack_histogram(const CoverInstance& inst,
                                                                  const CoverSolution& sol) {
    std::map<std::pair<std::string, int>, int> hist;
    for (const LinearConstraint& c : inst.constraints) {
        long long lhs = 0;
        for (auto [idx, coeff] : c.terms)
            lhs += static_cast<long long>(coeff) * sol.assignment[idx];
        ++hist[{c.tag, static_cast<int>(lhs)}];
    }
    return hist;
}

LatinSquare instance_square(const CoverInstance& inst) {
    if (inst.source) return *inst.source;
    for (int m = 2; m <= inst.order; ++m) {
        bool prime = m >= 2;
        for (int d = 2; d * d <= m; ++d)
            if (m % d == 0) prime = false;
        if (!prime) continue;
        int power = m, exp = 1;
        while (power < inst.order) {
            power *= m;
            ++exp;
        }
        if (power == inst.order) return elementary_abelian_square({m, exp});
    }
    throw std::invalid_argument("no elementary abelian square of order " +
                                std::to_string(inst.order));
}

std::string write_solution(const CoverSolution& sol, uint64_t seed) {
    std::string out = "best objective " + std::to_string(sol.objective) + " feasible " +
                      (sol.feasible ? "1" : "0") + " seed " + std::to_string(seed) + " flips " +
                      std::to_string(sol.stats.flips) + "\n";
    out += write_pls(sol.cells);
    return out;
}

CoverSolution make_solution(const CoverInstance& inst, std::span<const uint8_t> assignment) {
    if (assignment.size() != static_cast<size_t>(inst.num_vars()))
        throw std::invalid_argument("assignment size does not match the instance");
    LatinSquare L = instance_square(inst);
    CoverSolution sol;
    sol.assignment.assign(assignment.begin(), assignment.end());
    sol.cells = PartialLatinSquare(inst.order);
    for (int i = 0; i < inst.num_vars(); ++i)
        if (assignment[i]) sol.cells.place({i / inst.order, i % inst.order,
                                            L.at(i / inst.order, i % inst.order)});
    sol.objective = sol.cells.size();
    sol.feasible = check_feasible(inst, assignment);
    return sol;
}

}  // namespace latinforge
