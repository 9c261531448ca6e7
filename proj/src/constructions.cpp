#include "latinforge/constructions.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace latinforge {

namespace {

void check_range(int n) {
    if (n < 2 || n > 6)
        throw std::invalid_argument("construction supports 2 <= n <= 6");
}

Trade intercalate_from_cells(const LatinSquare& L, int r1, int r2, int c1, int c2) {
    PartialLatinSquare body(L.order()), mate(L.order());
    body.place({r1, c1, L.at(r1, c1)});
    body.place({r1, c2, L.at(r1, c2)});
    body.place({r2, c1, L.at(r2, c1)});
    body.place({r2, c2, L.at(r2, c2)});
    mate.place({r1, c1, L.at(r1, c2)});
    mate.place({r1, c2, L.at(r1, c1)});
    mate.place({r2, c1, L.at(r2, c2)});
    mate.place({r2, c2, L.at(r2, c1)});
    if (!is_trade(body, mate)) throw std::logic_error("cells do not form an intercalate");
    return {std::move(body), std::move(mate)};
}

}  // namespace

ConstructionResult svr_set(int n) {
    check_range(n);
    int order = 1 << n;
    ConstructionResult res;
    res.set = PartialLatinSquare(order);
    for (int i = 0; i < order; ++i)
        for (int j = 0; j < order; ++j)
            if ((i & j) != 0) res.set.place({i, j, i ^ j});
    int pow4 = 1, pow3 = 1;
    for (int t = 0; t < n; ++t) {
        pow4 *= 4;
        pow3 *= 3;
    }
    res.predicted_size = pow4 - pow3;
    if (res.set.size() != res.predicted_size)
        throw std::logic_error("SvR set size does not match the formula");
    return res;
}

ConstructionResult theorem1_set(int n) {
    check_range(n);
    int order = 1 << n;
    int half = order / 2;     // 2^(n-1)
    int quarter = order / 4;  // 2^(n-2)
    ConstructionResult res;
    ConstructionResult svr = svr_set(n);
    res.set = svr.set;
    res.set.place({0, 0, 0});
    res.set.place({0, order - 1, order - 1});
    res.set.place({order - 1, 0, order - 1});
    for (int x = half; x <= order - 1; ++x) {
        if (res.set.filled(order - 1, x)) res.set.erase(order - 1, x);
        if (res.set.filled(x, order - 1)) res.set.erase(x, order - 1);
    }
    for (int x = quarter; x <= half - 1; ++x)
        if (res.set.filled(x, x)) res.set.erase(x, x);
    res.predicted_size = svr.predicted_size + 4 - order - quarter;
    if (res.set.size() != res.predicted_size)
        throw std::logic_error("theorem 1 set size does not match the formula");

    // witness intercalates for the two added corner entries and the
    // surviving zero-diagonal entries
    LatinSquare L = elementary_abelian_square({2, n});
    res.witnesses.emplace_back(Cell{0, order - 1, order - 1},
                               intercalate_from_cells(L, 0, half, order - 1, half - 1));
    res.witnesses.emplace_back(Cell{order - 1, 0, order - 1},
                               intercalate_from_cells(L, order - 1, half - 1, 0, half));
    for (int x = 0; x <= quarter - 1; ++x)
        res.witnesses.emplace_back(Cell{x, x, 0}, intercalate_from_cells(L, x, quarter, x, quarter));
    for (const auto& [cell, trade] : res.witnesses) {
        if (!trade.body.contains(cell)) throw std::logic_error("witness misses its cell");
        for (const Cell& e : trade.body.cells())
            if (!(e == cell) && res.set.contains(e))
                throw std::logic_error("witness trade meets the set outside its cell");
    }
    return res;
}

std::vector<Cell> theorem1_completion_order(int n) {
    check_range(n);
    int order = 1 << n;
    int half = order / 2;
    int quarter = order / 4;
    std::vector<Cell> seq;
    for (int x = quarter; x <= half - 1; ++x) seq.push_back({x, x, 0});
    seq.push_back({order - 1, order - 1, 0});
    for (int x = half; x < order - 1; ++x) {
        seq.push_back({order - 1, x, order - 1 - x});
        seq.push_back({x, order - 1, order - 1 - x});
    }
    return seq;
}

PartialLatinSquare dfk_trim_start(int n) {
    check_range(n);
    int order = 1 << n;
    PartialLatinSquare set = svr_set(n).set;
    auto add = [&](int r, int c) {
        if (!set.filled(r, c)) set.place({r, c, r ^ c});
    };
    for (int i = 0; i < order; ++i) add(i, order - 1 - i);  // back diagonal
    for (int j = 0; j < order; ++j) add(order - 1, j);      // last row
    for (int i = 0; i < order; ++i) add(i, order - 1);      // last column
    return set;
}

PartialLatinSquare theorem2_normalize(const PartialLatinSquare& C) {
    if (C.order() != 9) throw std::invalid_argument("normalization is defined for order 9");
    BandPartition bands = BandPartition::contiguous_order9();
    // band-respecting autotopisms of the Z_3^2 table: the high digit of
    // rows maps through a -> alpha*a + cr, columns through a -> alpha*a + cc
    // (equal slopes), symbols through a -> alpha*a + cr + cc
    for (int alpha = 1; alpha <= 2; ++alpha)
        for (int cr = 0; cr < 3; ++cr)
            for (int cc = 0; cc < 3; ++cc) {
                std::vector<int> row_perm(9), col_perm(9), sym_perm(9);
                for (int v = 0; v < 9; ++v) {
                    int hi = v / 3, lo = v % 3;
                    row_perm[v] = 3 * ((alpha * hi + cr) % 3) + lo;
                    col_perm[v] = 3 * ((alpha * hi + cc) % 3) + lo;
                    sym_perm[v] = 3 * ((alpha * hi + cr + cc) % 3) + lo;
                }
                PartialLatinSquare image = apply_isotopism(C, row_perm, col_perm, sym_perm);
                auto counts = band_counts(image, bands);
                bool rc = true;
                for (int i = 0; i < 3 && rc; ++i)
                    for (int j = 0; j < 3 && rc; ++j)
                        if (counts[i][j] > counts[0][0]) rc = false;
                if (rc) return image;
            }
    throw std::logic_error("no band autotopism yields the RC property");
}

namespace {

uint64_t fnv1a(const std::string& bytes) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ull;
    }
    return h;
}

PartialLatinSquare load_bundled(const std::string& filename, uint64_t expected_checksum,
                                int expected_order, int expected_size) {
    std::string path = data_dir() + "/" + filename;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open bundled data file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string bytes = buf.str();
    if (fnv1a(bytes) != expected_checksum)
        throw std::runtime_error("checksum failure for bundled data file " + path);
    PartialLatinSquare P = parse_pls(bytes);
    if (P.order() != expected_order || P.size() != expected_size)
        throw std::runtime_error("bundled data file " + path + " has unexpected shape");
    return P;
}

}  // namespace

std::string data_dir() {
    if (const char* env = std::getenv("LATINFORGE_DATA"); env && *env) return env;
#ifdef LATINFORGE_DATA_DIR
    return LATINFORGE_DATA_DIR;
#else
    return "data";
#endif
}

PartialLatinSquare bundled_c121() {
    return load_bundled("c121_l16.pls", 0x32cb571f7259245aull, 16, 121);
}

PartialLatinSquare bundled_c29() {
    return load_bundled("c29_l9.pls", 0x0942af10df93e6bdull, 9, 29);
}

}  // namespace latinforge
