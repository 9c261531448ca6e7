// Timing comparison of the OpenMP kernels against their serial reference
// implementations. The outputs must agree; the table reports speedups.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "latinforge/completion.hpp"
#include "latinforge/constructions.hpp"
#include "latinforge/core.hpp"
#include "latinforge/cover.hpp"
#include "latinforge/local_search.hpp"
#include "latinforge/trades.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace latinforge;

namespace {

double time_run(const std::function<void()>& fn) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(const char* name, double serial, double parallel, bool equal) {
    std::printf("%-34s serial %8.3fs  parallel %8.3fs  speedup %5.2fx  %s\n", name, serial,
                parallel, parallel > 0 ? serial / parallel : 0.0,
                equal ? "results equal" : "RESULTS DIFFER");
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP not enabled; both columns run the serial path\n");
#endif

    {
        LatinSquare l64 = elementary_abelian_square({2, 6});
        std::vector<Trade> serial_out, parallel_out;
        double ts = time_run([&] { serial_out = enumerate_intercalates_serial(l64); });
        double tp = time_run([&] { parallel_out = enumerate_intercalates(l64); });
        report("intercalates L(64)", ts, tp, serial_out == parallel_out);
    }

    {
        LatinSquare l9 = elementary_abelian_square({3, 2});
        TradeEnumLimits six;
        six.max_size = 6;
        six.max_rows = six.max_cols = six.max_symbols = 6;
        TradeEnumResult serial_out, parallel_out;
        double ts = time_run([&] { serial_out = enumerate_trades_bounded_serial(l9, six); });
        double tp = time_run([&] { parallel_out = enumerate_trades_bounded(l9, six); });
        report("size-6 trades L(9)", ts, tp, serial_out.trades == parallel_out.trades);
    }

    {
        LatinSquare l16 = elementary_abelian_square({2, 4});
        PartialLatinSquare c121 = bundled_c121();
        VerificationReport serial_out, parallel_out;
        double ts = time_run([&] { serial_out = verify_critical_set_serial(l16, c121); });
        double tp = time_run([&] { parallel_out = verify_critical_set(l16, c121); });
        bool equal = serial_out.passed() == parallel_out.passed() &&
                     serial_out.necessity.size() == parallel_out.necessity.size();
        report("verify c121 in L(16)", ts, tp, equal);
    }

    {
        CoverInstance inst = build_hierarchical_cover({2, 4}, 3);
        SolverParams params;
        params.seed = 1;
        params.max_flips = 200'000;
        params.restarts = 8;
        CoverSolution serial_out, parallel_out;
        double ts = time_run([&] { serial_out = local_search_serial(inst, params); });
        double tp = time_run([&] { parallel_out = local_search(inst, params); });
        report("local search L(16), 8 restarts", ts, tp,
               serial_out.assignment == parallel_out.assignment);
    }

    return 0;
}
