// Command-line workbench: group square generation, trade enumeration,
// critical set verification, covering IP construction and solving, and
// reproduction runs for the published desk-scale results.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "latinforge/branch_bound.hpp"
#include "latinforge/completion.hpp"
#include "latinforge/constructions.hpp"
#include "latinforge/core.hpp"
#include "latinforge/cover.hpp"
#include "latinforge/local_search.hpp"
#include "latinforge/reproduce.hpp"
#include "latinforge/trades.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace latinforge;

namespace {

std::string read_input(const std::string& path) {
    if (path.empty() || path == "-") {
        std::ostringstream buf;
        buf << std::cin.rdbuf();
        return buf.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << content;
}

void set_jobs(int jobs) {
#ifdef _OPENMP
    if (jobs > 0) omp_set_num_threads(jobs);
#else
    (void)jobs;
#endif
}

LatinSquare square_from_file(const std::string& path) {
    return parse_pls(read_input(path)).to_square();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"critical set workbench for elementary abelian group squares"};
    app.require_subcommand(1);

    // --- gen ---------------------------------------------------------------
    auto* gen = app.add_subcommand("gen", "write the Cayley table of Z_m^n as PLS");
    int gen_m = 2, gen_n = 1;
    std::string gen_out;
    gen->add_option("-m,--base", gen_m, "group base")->required();
    gen->add_option("-n,--exponent", gen_n, "group exponent")->required();
    gen->add_option("-o,--out", gen_out, "output file (default stdout)");

    // --- trades ------------------------------------------------------------
    auto* trades = app.add_subcommand("trades", "enumerate bounded minimal trades");
    std::string trades_square, trades_out;
    TradeEnumLimits limits;
    int trades_max_size = 6, trades_rows = 6, trades_cols = 6, trades_syms = 6;
    uint64_t trades_budget = limits.node_budget;
    trades->add_option("--square", trades_square, "PLS file with the full square")->required();
    trades->add_option("--max-size", trades_max_size, "maximum trade size");
    trades->add_option("--max-rows", trades_rows, "maximum rows used");
    trades->add_option("--max-cols", trades_cols, "maximum columns used");
    trades->add_option("--max-symbols", trades_syms, "maximum symbols used");
    trades->add_option("--budget", trades_budget, "search node budget");
    trades->add_option("-o,--out", trades_out, "output file (default stdout)");

    // --- verify ------------------------------------------------------------
    auto* verify = app.add_subcommand("verify", "verify a critical set");
    std::string verify_square, verify_set, verify_out;
    uint64_t verify_budget = kDefaultNodeBudget;
    int verify_jobs = 0;
    verify->add_option("--square", verify_square, "PLS file with the full square")->required();
    verify->add_option("--set", verify_set, "PLS file with the candidate set")->required();
    verify->add_option("--budget", verify_budget, "search node budget");
    verify->add_option("--jobs", verify_jobs, "worker threads");
    verify->add_option("-o,--out", verify_out, "report file (default stdout)");

    // --- ip ----------------------------------------------------------------
    auto* ip = app.add_subcommand("ip", "covering integer programs");
    ip->require_subcommand(1);

    auto* build = ip->add_subcommand("build", "construct an instance and emit LP text");
    bool build_hier = false, build_l9 = false, build_rc = false, build_card = false;
    int build_n = 3, build_levels = 0;
    std::vector<int> build_rhs;
    std::string build_trades_file, build_square_file, build_out;
    build->add_flag("--hier", build_hier, "hierarchical subsquare program for L(2^n)");
    build->add_flag("--l9", build_l9, "size-6 trade program for L(9)");
    build->add_flag("--rc", build_rc, "add the 8 RC symmetry rows (with --l9)");
    build->add_flag("--card", build_card, "add cardinality rows (96 for order 16, 36 for L(9))");
    build->add_option("-n,--exponent", build_n, "exponent for --hier");
    build->add_option("--levels", build_levels, "subsquare levels (default n-1)");
    build->add_option("--rhs", build_rhs, "right-hand sides per level")->delimiter(',');
    build->add_option("--trades", build_trades_file, "trade list file for a trade cover");
    build->add_option("--square", build_square_file, "square for --trades");
    build->add_option("-o,--out", build_out, "output file (default stdout)");

    auto* lp_export = ip->add_subcommand("export", "re-emit an LP file canonically");
    std::string export_in, export_out;
    lp_export->add_option("-i,--in", export_in, "input LP (default stdin)");
    lp_export->add_option("-o,--out", export_out, "output file (default stdout)");

    auto* solve_ls = ip->add_subcommand("solve-ls", "WalkSAT-style local search");
    std::string ls_in, ls_out;
    uint64_t ls_seed = 0;
    double ls_noise = 0.2;
    uint64_t ls_flips = 1'000'000;
    int ls_restarts = 16, ls_jobs = 0;
    std::optional<int> ls_target;
    int ls_target_raw = -1;
    bool ls_histogram = false;
    solve_ls->add_option("-i,--in", ls_in, "input LP (default stdin)");
    solve_ls->add_flag("--histogram", ls_histogram,
                       "print the per-tag achieved-LHS histogram to stderr");
    solve_ls->add_option("--seed", ls_seed, "random seed")->required();
    solve_ls->add_option("--noise", ls_noise, "walk probability");
    solve_ls->add_option("--flips", ls_flips, "flips per restart");
    solve_ls->add_option("--restarts", ls_restarts, "restart count");
    solve_ls->add_option("--target", ls_target_raw, "stop once this objective is reached");
    solve_ls->add_option("--jobs", ls_jobs, "worker threads");
    solve_ls->add_option("-o,--out", ls_out, "solution file (default stdout)");

    auto* solve_bb = ip->add_subcommand("solve-bb", "exact branch and bound");
    std::string bb_in, bb_out;
    uint64_t bb_budget = 1'000'000'000;
    int bb_stop_bound = -1;
    solve_bb->add_option("-i,--in", bb_in, "input LP (default stdin)");
    solve_bb->add_option("--budget", bb_budget, "node budget");
    solve_bb->add_option("--stop-bound", bb_stop_bound,
                         "stop once this lower bound is proved");
    solve_bb->add_option("-o,--out", bb_out, "solution file (default stdout)");

    // --- construct -----------------------------------------------------------
    auto* construct = app.add_subcommand("construct", "named constructions");
    std::string construct_kind, construct_out, construct_test = "propagation";
    int construct_n = 3;
    construct->add_option("kind", construct_kind, "svr | t1 | dfk-start | trim")->required();
    construct->add_option("-n,--exponent", construct_n, "exponent of 2^n")->required();
    construct->add_option("--test", construct_test, "trim test: propagation | search");
    construct->add_option("-o,--out", construct_out, "output file (default stdout)");

    // --- reproduce -----------------------------------------------------------
    auto* reproduce = app.add_subcommand("reproduce", "run the reproduction checks");
    std::string repro_tier = "fast";
    int repro_jobs = 0;
    reproduce->add_option("--tier", repro_tier, "fast | full");
    reproduce->add_option("--jobs", repro_jobs, "worker threads");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            LatinSquare L = elementary_abelian_square({gen_m, gen_n});
            write_output(gen_out, write_pls(L));
            return 0;
        }

        if (*trades) {
            LatinSquare L = square_from_file(trades_square);
            limits.max_size = trades_max_size;
            limits.max_rows = trades_rows;
            limits.max_cols = trades_cols;
            limits.max_symbols = trades_syms;
            limits.node_budget = trades_budget;
            TradeEnumResult result = enumerate_trades_bounded(L, limits);
            write_output(trades_out, write_trade_list(result.trades));
            std::cerr << "trades " << result.trades.size() << " nodes " << result.nodes_used
                      << (result.complete ? "" : " (budget exhausted, partial)") << "\n";
            return result.complete ? 0 : 2;
        }

        if (*verify) {
            set_jobs(verify_jobs);
            LatinSquare L = square_from_file(verify_square);
            PartialLatinSquare C = parse_pls(read_input(verify_set));
            VerificationReport report = verify_critical_set(L, C, verify_budget);
            write_output(verify_out, write_verification_report(report));
            if (report.passed()) return 0;
            bool budget = report.unique.status == CertStatus::BudgetExceeded;
            for (const auto& [cell, w] : report.necessity)
                if (w.status == WitnessStatus::BudgetExceeded) budget = true;
            return budget ? 2 : 1;
        }

        if (*build) {
            CoverInstance inst;
            if (build_hier) {
                int levels = build_levels > 0 ? build_levels : build_n - 1;
                inst = build_hierarchical_cover({2, build_n}, levels, build_rhs);
            } else if (build_l9) {
                LatinSquare l9 = elementary_abelian_square({3, 2});
                TradeEnumLimits six;
                six.max_size = 6;
                six.max_rows = six.max_cols = six.max_symbols = 6;
                inst = build_trade_cover(l9, enumerate_trades_bounded(l9, six).trades);
                if (build_rc) inst = add_rc_symmetry(inst, BandPartition::contiguous_order9());
                if (build_card)
                    inst = add_cardinality_constraints(inst, CardinalityMode::SubsquaresExactly3);
            } else if (!build_trades_file.empty()) {
                if (build_square_file.empty())
                    throw std::runtime_error("--trades needs --square");
                LatinSquare L = square_from_file(build_square_file);
                std::vector<Trade> list = parse_trade_list(read_input(build_trades_file));
                inst = build_trade_cover(L, list);
            } else {
                throw std::runtime_error("choose --hier, --l9 or --trades");
            }
            if (build_card && build_hier) {
                if (inst.order != 16)
                    throw std::runtime_error("--card with --hier requires order 16");
                inst = add_cardinality_constraints(inst, CardinalityMode::RowsCols78);
            }
            write_output(build_out, export_lp(inst));
            return 0;
        }

        if (*lp_export) {
            CoverInstance inst = import_lp(read_input(export_in));
            write_output(export_out, export_lp(inst));
            return 0;
        }

        if (*solve_ls) {
            set_jobs(ls_jobs);
            CoverInstance inst = import_lp(read_input(ls_in));
            SolverParams params;
            params.seed = ls_seed;
            params.noise = ls_noise;
            params.max_flips = ls_flips;
            params.restarts = ls_restarts;
            if (ls_target_raw >= 0) ls_target = ls_target_raw;
            params.target = ls_target;
            std::vector<RestartRecord> records;
            CoverSolution sol = local_search(inst, params, &records);
            for (const RestartRecord& r : records)
                std::cout << inst.name << " " << r.objective << " " << (r.feasible ? 1 : 0)
                          << " " << r.seed << " " << r.flips << "\n";
            if (ls_histogram)
                for (const auto& [key, count] : report_slack_histogram(inst, sol))
                    std::cerr << "lhs " << key.first << " " << key.second << " x" << count
                              << "\n";
            write_output(ls_out, write_solution(sol, params.seed));
            return sol.feasible ? 0 : 1;
        }

        if (*solve_bb) {
            CoverInstance inst = import_lp(read_input(bb_in));
            BnbParams params;
            params.node_budget = bb_budget;
            if (bb_stop_bound >= 0) params.stop_at_bound = bb_stop_bound;
            params.checkpoint_log = &std::cerr;
            BnbResult res = branch_and_bound(inst, params);
            std::ostringstream out;
            out << "bound " << res.proved_lower_bound << " best " << res.best.objective
                << " optimal " << (res.optimal ? 1 : 0) << " nodes " << res.nodes_used << "\n";
            out << write_pls(res.best.cells);
            write_output(bb_out, out.str());
            return res.budget_exhausted ? 2 : 0;
        }

        if (*construct) {
            PartialLatinSquare result(1);
            if (construct_kind == "svr") {
                result = svr_set(construct_n).set;
            } else if (construct_kind == "t1") {
                result = theorem1_set(construct_n).set;
            } else if (construct_kind == "dfk-start") {
                result = dfk_trim_start(construct_n);
            } else if (construct_kind == "trim") {
                LatinSquare L = elementary_abelian_square({2, construct_n});
                TrimTest test = construct_test == "search" ? TrimTest::Search
                                                           : TrimTest::Propagation;
                result = greedy_trim(L, dfk_trim_start(construct_n), test);
                std::cerr << "trimmed to " << result.size() << " entries\n";
            } else {
                throw std::runtime_error("unknown construction '" + construct_kind + "'");
            }
            write_output(construct_out, write_pls(result));
            return 0;
        }

        if (*reproduce) {
            set_jobs(repro_jobs);
            ReproTier tier = repro_tier == "full" ? ReproTier::Full : ReproTier::Fast;
            std::vector<CriterionResult> results = run_reproduction(tier, std::cout);
            for (const CriterionResult& r : results)
                if (!r.pass) return 1;
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
