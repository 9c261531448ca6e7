#include "latinforge/branch_bound.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <ostream>
#include <stdexcept>

namespace latinforge {

namespace {

constexpr int kFree = 2;

struct BnbSolver {
    const CoverInstance& inst;
    int nv;

    // Covering constraints (unit positive coefficients, >=, covering tag)
    // are stored as a flat CSR over variable indices; everything else
    // (symmetry, cardinality) takes a generic path.
    std::vector<int> cover_ids, general_ids;
    std::vector<int> is_cover;  // constraint id -> covering slot or -1

    std::vector<int> cov_start, cov_vars, cov_rhs;
    std::vector<int> family_of;  // covering slot -> family id
    int n_families = 0;

    // Disjointness classes: rows of one class are pairwise variable
    // disjoint, so the sum of their residuals is a lower bound. Built once
    // by greedy coloring of the row conflict graph.
    std::vector<int> class_of;
    int n_classes = 0;
    std::vector<int> class_start, class_slots;  // CSR: class -> member slots

    std::vector<int> adj_start;
    std::vector<std::pair<int, int>> adj;  // (constraint id, coeff)

    // per covering slot: fixed ones, free variable count, clamped residual
    std::vector<int> cnt1, nfree, res_pos;
    // incremental structures fed by residual flips
    std::vector<long long> class_sum;
    std::vector<int> score;  // per var: unsatisfied covering rows containing it
    int n_unsat_cover = 0;

    // per general slot: contribution of fixed vars, free +/- sums
    std::vector<long long> gen_fixed, gen_pos, gen_neg;
    std::vector<int> gen_slot;  // constraint id -> general slot or -1

    std::vector<int8_t> state;  // 0 / 1 / kFree
    std::vector<int> trail;
    int ones = 0;

    uint64_t nodes = 0;
    uint64_t node_budget;
    std::chrono::steady_clock::time_point deadline{};
    bool has_deadline = false;
    bool aborted = false;

    std::vector<uint8_t> best_assignment;
    bool found = false;

    // scratch
    std::vector<int> unsat_buf, bucket_heads, bucket_next, outside_buf;
    std::vector<long long> fam_sum_buf;
    std::vector<int> fam_max_buf, fam_score_buf, fam_stamp;
    std::vector<int> stamp;
    int stamp_mark = 0;
    std::vector<int> worklist;
    std::vector<char> in_worklist;

    explicit BnbSolver(const CoverInstance& inst_, uint64_t budget)
        : inst(inst_), nv(inst_.num_vars()), node_budget(budget) {
        int nc = static_cast<int>(inst.constraints.size());
        is_cover.assign(nc, -1);
        gen_slot.assign(nc, -1);
        std::map<std::string, int> family_ids;
        cov_start.push_back(0);
        for (int ci = 0; ci < nc; ++ci) {
            const LinearConstraint& c = inst.constraints[ci];
            bool covering = c.sense == Sense::Ge && c.tag != "symmetry" && c.tag != "cardinality";
            for (const auto& term : c.terms)
                if (term.second != 1) covering = false;
            if (covering) {
                is_cover[ci] = static_cast<int>(cover_ids.size());
                cover_ids.push_back(ci);
                cov_rhs.push_back(c.rhs);
                for (const auto& term : c.terms) cov_vars.push_back(term.first);
                cov_start.push_back(static_cast<int>(cov_vars.size()));
                auto [it, inserted] = family_ids.try_emplace(c.tag, n_families);
                if (inserted) ++n_families;
                family_of.push_back(it->second);
            } else {
                gen_slot[ci] = static_cast<int>(general_ids.size());
                general_ids.push_back(ci);
            }
        }
        int n_slots = static_cast<int>(cover_ids.size());

        adj_start.assign(nv + 1, 0);
        for (const LinearConstraint& c : inst.constraints)
            for (const auto& term : c.terms) ++adj_start[term.first + 1];
        for (int v = 0; v < nv; ++v) adj_start[v + 1] += adj_start[v];
        adj.resize(adj_start[nv]);
        {
            std::vector<int> fill(adj_start.begin(), adj_start.end() - 1);
            for (int ci = 0; ci < nc; ++ci)
                for (const auto& term : inst.constraints[ci].terms)
                    adj[fill[term.first]++] = {ci, term.second};
        }

        cnt1.assign(n_slots, 0);
        nfree.assign(n_slots, 0);
        res_pos.assign(n_slots, 0);
        for (int s = 0; s < n_slots; ++s) {
            nfree[s] = cov_start[s + 1] - cov_start[s];
            res_pos[s] = cov_rhs[s];
        }
        n_unsat_cover = 0;
        for (int s = 0; s < n_slots; ++s)
            if (res_pos[s] > 0) ++n_unsat_cover;

        // greedy coloring, slot order, smallest color not used by any
        // conflicting earlier row
        class_of.assign(n_slots, -1);
        {
            std::vector<std::vector<int>> var_rows(nv);
            for (int s = 0; s < n_slots; ++s)
                for (int k = cov_start[s]; k < cov_start[s + 1]; ++k)
                    var_rows[cov_vars[k]].push_back(s);
            std::vector<char> used;
            for (int s = 0; s < n_slots; ++s) {
                used.assign(n_classes + 1, 0);
                for (int k = cov_start[s]; k < cov_start[s + 1]; ++k)
                    for (int other : var_rows[cov_vars[k]])
                        if (other < s && class_of[other] >= 0) used[class_of[other]] = 1;
                int color = 0;
                while (used[color]) ++color;
                class_of[s] = color;
                n_classes = std::max(n_classes, color + 1);
            }
        }
        class_sum.assign(n_classes, 0);
        for (int s = 0; s < n_slots; ++s) class_sum[class_of[s]] += res_pos[s];
        {
            class_start.assign(n_classes + 1, 0);
            for (int s = 0; s < n_slots; ++s) ++class_start[class_of[s] + 1];
            for (int cl = 0; cl < n_classes; ++cl) class_start[cl + 1] += class_start[cl];
            class_slots.resize(n_slots);
            std::vector<int> fill(class_start.begin(), class_start.end() - 1);
            for (int s = 0; s < n_slots; ++s) class_slots[fill[class_of[s]]++] = s;
        }

        score.assign(nv, 0);
        for (int s = 0; s < n_slots; ++s)
            if (res_pos[s] > 0)
                for (int k = cov_start[s]; k < cov_start[s + 1]; ++k) ++score[cov_vars[k]];

        gen_fixed.assign(general_ids.size(), 0);
        gen_pos.assign(general_ids.size(), 0);
        gen_neg.assign(general_ids.size(), 0);
        for (size_t g = 0; g < general_ids.size(); ++g)
            for (const auto& term : inst.constraints[general_ids[g]].terms) {
                if (term.second > 0)
                    gen_pos[g] += term.second;
                else
                    gen_neg[g] += term.second;
            }

        state.assign(nv, kFree);
        stamp.assign(nv, 0);
        in_worklist.assign(nc, 0);
        fam_sum_buf.assign(n_families, 0);
        fam_max_buf.assign(n_families, 0);
        fam_score_buf.assign(static_cast<size_t>(n_families) * nv, 0);
        fam_stamp.assign(static_cast<size_t>(n_families) * nv, 0);
    }

    // --- incremental residual bookkeeping ------------------------------------

    void bump_cnt1(int s, int delta) {
        cnt1[s] += delta;
        int old_res = res_pos[s];
        int new_res = std::max(0, cov_rhs[s] - cnt1[s]);
        if (new_res == old_res) return;
        res_pos[s] = new_res;
        class_sum[class_of[s]] += new_res - old_res;
        if ((old_res > 0) != (new_res > 0)) {
            int d = new_res > 0 ? 1 : -1;
            n_unsat_cover += d;
            for (int k = cov_start[s]; k < cov_start[s + 1]; ++k) score[cov_vars[k]] += d;
        }
    }

    // --- fixing and propagation ------------------------------------------------

    void apply_fix(int v, int val) {
        state[v] = static_cast<int8_t>(val);
        trail.push_back(v);
        if (val == 1) ++ones;
        for (int k = adj_start[v]; k < adj_start[v + 1]; ++k) {
            auto [ci, coeff] = adj[k];
            int s = is_cover[ci];
            if (s >= 0) {
                --nfree[s];
                if (val == 1) bump_cnt1(s, 1);
            } else {
                int g = gen_slot[ci];
                if (coeff > 0)
                    gen_pos[g] -= coeff;
                else
                    gen_neg[g] -= coeff;
                if (val == 1) gen_fixed[g] += coeff;
            }
            if (!in_worklist[ci]) {
                in_worklist[ci] = 1;
                worklist.push_back(ci);
            }
        }
    }

    void undo_fix(int v) {
        int val = state[v];
        if (val == 1) --ones;
        for (int k = adj_start[v]; k < adj_start[v + 1]; ++k) {
            auto [ci, coeff] = adj[k];
            int s = is_cover[ci];
            if (s >= 0) {
                ++nfree[s];
                if (val == 1) bump_cnt1(s, -1);
            } else {
                int g = gen_slot[ci];
                if (coeff > 0)
                    gen_pos[g] += coeff;
                else
                    gen_neg[g] += coeff;
                if (val == 1) gen_fixed[g] -= coeff;
            }
        }
        state[v] = kFree;
    }

    void undo_to(size_t mark) {
        while (trail.size() > mark) {
            undo_fix(trail.back());
            trail.pop_back();
        }
    }

    void clear_worklist() {
        for (int ci : worklist) in_worklist[ci] = 0;
        worklist.clear();
    }

    // Returns false on conflict. Leaves newly implied fixes on the trail.
    bool propagate_worklist() {
        for (size_t head = 0; head < worklist.size(); ++head) {
            int ci = worklist[head];
            int s = is_cover[ci];
            if (s >= 0) {
                if (res_pos[s] == 0) continue;  // satisfied
                int max_more = nfree[s];
                if (max_more < res_pos[s]) {
                    clear_worklist();
                    return false;
                }
                if (max_more == res_pos[s]) {
                    for (int k = cov_start[s]; k < cov_start[s + 1]; ++k)
                        if (state[cov_vars[k]] == kFree) apply_fix(cov_vars[k], 1);
                }
                continue;
            }
            const LinearConstraint& c = inst.constraints[ci];
            int g = gen_slot[ci];
            long long max_lhs = gen_fixed[g] + gen_pos[g];
            long long min_lhs = gen_fixed[g] + gen_neg[g];
            if (c.sense == Sense::Ge || c.sense == Sense::Eq) {
                if (max_lhs < c.rhs) {
                    clear_worklist();
                    return false;
                }
                if (max_lhs == c.rhs && min_lhs < c.rhs) {
                    for (const auto& term : c.terms)
                        if (state[term.first] == kFree)
                            apply_fix(term.first, term.second > 0 ? 1 : 0);
                }
            }
            if (c.sense == Sense::Le || c.sense == Sense::Eq) {
                if (min_lhs > c.rhs) {
                    clear_worklist();
                    return false;
                }
                if (min_lhs == c.rhs && max_lhs > c.rhs) {
                    for (const auto& term : c.terms)
                        if (state[term.first] == kFree)
                            apply_fix(term.first, term.second > 0 ? 0 : 1);
                }
            }
        }
        clear_worklist();
        return true;
    }

    bool fix_and_propagate(int v, int val) {
        apply_fix(v, val);
        return propagate_worklist();
    }

    bool propagate_root() {
        for (size_t ci = 0; ci < inst.constraints.size(); ++ci) {
            in_worklist[ci] = 1;
            worklist.push_back(static_cast<int>(ci));
        }
        return propagate_worklist();
    }

    // --- bounding ------------------------------------------------------------

    // Largest class residual sum; maintained incrementally, O(classes).
    int class_bound(int* best_class) const {
        long long best = 0;
        int which = -1;
        for (int cl = 0; cl < n_classes; ++cl)
            if (class_sum[cl] > best) {
                best = class_sum[cl];
                which = cl;
            }
        if (best_class) *best_class = which;
        return static_cast<int>(best);
    }

    // Fills unsat_buf and the per-family residual sums and dynamic degrees.
    // Each new chosen cell lowers a family's residual sum by at most the
    // largest number of that family's unsatisfied rows any free variable
    // sits in.
    int density_bound() {
        unsat_buf.clear();
        for (int f = 0; f < n_families; ++f) {
            fam_sum_buf[f] = 0;
            fam_max_buf[f] = 0;
        }
        int n_slots = static_cast<int>(cover_ids.size());
        for (int s = 0; s < n_slots; ++s)
            if (res_pos[s] > 0) {
                unsat_buf.push_back(s);
                fam_sum_buf[family_of[s]] += res_pos[s];
            }
        ++stamp_mark;
        for (int s : unsat_buf) {
            int f = family_of[s];
            const size_t f_base = static_cast<size_t>(f) * nv;
            for (int k = cov_start[s]; k < cov_start[s + 1]; ++k) {
                int v = cov_vars[k];
                if (state[v] != kFree) continue;
                size_t fv = f_base + v;
                if (fam_stamp[fv] != stamp_mark) {
                    fam_stamp[fv] = stamp_mark;
                    fam_score_buf[fv] = 0;
                }
                if (++fam_score_buf[fv] > fam_max_buf[f]) fam_max_buf[f] = fam_score_buf[fv];
            }
        }
        int density = 0;
        for (int f = 0; f < n_families; ++f) {
            if (fam_sum_buf[f] == 0) continue;
            if (fam_max_buf[f] == 0) return nv + 1;  // residual demand, no free support
            long long b = (fam_sum_buf[f] + fam_max_buf[f] - 1) / fam_max_buf[f];
            density = std::max(density, static_cast<int>(b));
        }
        return density;
    }

    // Greedy packing over unsat_buf, residual descending, index tie-break.
    // On return, `stamp` marks the free variables of the packed rows.
    int packing_bound() {
        int max_res = 0;
        for (int s : unsat_buf) max_res = std::max(max_res, res_pos[s]);
        if (max_res == 0) return 0;
        bucket_heads.assign(max_res + 1, -1);
        bucket_next.assign(unsat_buf.size(), -1);
        for (size_t i = unsat_buf.size(); i-- > 0;) {
            bucket_next[i] = bucket_heads[res_pos[unsat_buf[i]]];
            bucket_heads[res_pos[unsat_buf[i]]] = static_cast<int>(i);
        }
        ++stamp_mark;
        int packing = 0;
        for (int res = max_res; res >= 1; --res) {
            for (int i = bucket_heads[res]; i >= 0; i = bucket_next[i]) {
                int s = unsat_buf[i];
                bool disjoint = true;
                for (int k = cov_start[s]; k < cov_start[s + 1]; ++k) {
                    int v = cov_vars[k];
                    if (state[v] == kFree && stamp[v] == stamp_mark) {
                        disjoint = false;
                        break;
                    }
                }
                if (!disjoint) continue;
                for (int k = cov_start[s]; k < cov_start[s + 1]; ++k)
                    if (state[cov_vars[k]] == kFree) stamp[cov_vars[k]] = stamp_mark;
                packing += res;
            }
        }
        return packing;
    }

    bool all_general_resolved() const {
        for (size_t g = 0; g < general_ids.size(); ++g) {
            const LinearConstraint& c = inst.constraints[general_ids[g]];
            long long max_lhs = gen_fixed[g] + gen_pos[g];
            long long min_lhs = gen_fixed[g] + gen_neg[g];
            switch (c.sense) {
                case Sense::Ge:
                    if (min_lhs < c.rhs) return false;
                    break;
                case Sense::Le:
                    if (max_lhs > c.rhs) return false;
                    break;
                case Sense::Eq:
                    if (min_lhs != c.rhs || max_lhs != c.rhs) return false;
                    break;
            }
        }
        return true;
    }

    // --- search ----------------------------------------------------------------

    // true iff a feasible solution with at most `target` ones exists in the
    // current subtree; `aborted` is set when a budget runs out.
    bool decide(int target) {
        if (aborted) return false;
        if (++nodes > node_budget) {
            aborted = true;
            return false;
        }
        if (has_deadline && (nodes & 0xffff) == 0 &&
            std::chrono::steady_clock::now() > deadline) {
            aborted = true;
            return false;
        }

        while (true) {
            int best_class = -1;
            int cbound = class_bound(&best_class);
            if (ones + cbound > target) return false;
            if (n_unsat_cover == 0) break;

            int density = density_bound();
            if (ones + density > target) return false;
            int packing = packing_bound();
            if (ones + packing > target) return false;

            // When a disjoint bound exactly consumes the remaining budget,
            // every chosen cell of a solution at this target lies in the
            // bounding rows: free variables outside them are forced to 0.
            int tight = std::max(packing, cbound);
            if (ones + tight < target) break;
            if (cbound > packing) {
                ++stamp_mark;
                for (int k = class_start[best_class]; k < class_start[best_class + 1]; ++k) {
                    int s = class_slots[k];
                    if (res_pos[s] == 0) continue;
                    for (int t = cov_start[s]; t < cov_start[s + 1]; ++t)
                        if (state[cov_vars[t]] == kFree) stamp[cov_vars[t]] = stamp_mark;
                }
            }  // else: packing_bound already stamped its rows' free vars
            outside_buf.clear();
            for (int v = 0; v < nv; ++v)
                if (state[v] == kFree && stamp[v] != stamp_mark) outside_buf.push_back(v);
            if (outside_buf.empty()) break;
            for (int v : outside_buf)
                if (state[v] == kFree) apply_fix(v, 0);
            if (!propagate_worklist()) return false;
        }

        if (n_unsat_cover == 0) {
            if (all_general_resolved()) {
                best_assignment.assign(nv, 0);
                for (int v = 0; v < nv; ++v)
                    if (state[v] == 1) best_assignment[v] = 1;
                found = true;
                return true;
            }
            // only general rows are open: branch on their first free var
            int general_var = -1;
            for (size_t g = 0; g < general_ids.size() && general_var < 0; ++g) {
                const LinearConstraint& c = inst.constraints[general_ids[g]];
                long long max_lhs = gen_fixed[g] + gen_pos[g];
                long long min_lhs = gen_fixed[g] + gen_neg[g];
                bool resolved = true;
                switch (c.sense) {
                    case Sense::Ge: resolved = min_lhs >= c.rhs; break;
                    case Sense::Le: resolved = max_lhs <= c.rhs; break;
                    case Sense::Eq: resolved = min_lhs == c.rhs && max_lhs == c.rhs; break;
                }
                if (resolved) continue;
                for (const auto& term : c.terms)
                    if (state[term.first] == kFree) {
                        general_var = term.first;
                        break;
                    }
            }
            if (general_var < 0) return false;  // open rows without free vars: dead end
            return branch_on(general_var, target);
        }

        // branch on the variable in the most unsatisfied rows, lowest index
        int branch_var = -1, best_score = 0;
        for (int v = 0; v < nv; ++v)
            if (state[v] == kFree && score[v] > best_score) {
                best_score = score[v];
                branch_var = v;
            }
        if (branch_var < 0) return false;  // unsatisfied rows without free support
        return branch_on(branch_var, target);
    }

    bool branch_on(int v, int target) {
        size_t mark = trail.size();
        if (fix_and_propagate(v, 1)) {
            if (decide(target)) return true;
        }
        undo_to(mark);
        if (aborted) return false;
        if (fix_and_propagate(v, 0)) {
            if (decide(target)) return true;
        }
        undo_to(mark);
        return false;
    }

    int root_bound() {
        int cbound = class_bound(nullptr);
        if (n_unsat_cover == 0) return cbound;
        int density = density_bound();
        return std::max({cbound, density, packing_bound()});
    }
};

// Deterministic minimal cover: start from all ones and drop variables in
// index order while feasibility survives. Used as the fallback incumbent.
std::vector<uint8_t> greedy_incumbent(const CoverInstance& inst) {
    std::vector<uint8_t> assign(inst.num_vars(), 1);
    bool changed = true;
    while (changed) {
        changed = false;
        for (int v = 0; v < inst.num_vars(); ++v) {
            if (!assign[v]) continue;
            assign[v] = 0;
            if (check_feasible(inst, assign))
                changed = true;
            else
                assign[v] = 1;
        }
    }
    return assign;
}

}  // namespace

BnbResult branch_and_bound(const CoverInstance& inst, const BnbParams& params) {
    auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&]() {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    BnbResult result;
    std::vector<uint8_t> incumbent = greedy_incumbent(inst);
    int upper = 0;
    for (uint8_t v : incumbent) upper += v;
    if (!check_feasible(inst, incumbent)) upper = inst.num_vars() + 1;
    if (params.warm_start && check_feasible(inst, *params.warm_start)) {
        int warm_obj = 0;
        for (uint8_t v : *params.warm_start) warm_obj += v;
        if (warm_obj < upper) {
            upper = warm_obj;
            incumbent = *params.warm_start;
        }
    }

    BnbSolver solver(inst, params.node_budget);
    if (params.time_limit_seconds) {
        solver.has_deadline = true;
        solver.deadline = t0 + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                   std::chrono::duration<double>(*params.time_limit_seconds));
    }
    if (!solver.propagate_root()) {
        // no feasible completion of the root propagation: vacuous instance
        result.best = make_solution(inst, incumbent);
        result.proved_lower_bound = inst.num_vars() + 1;
        result.optimal = false;
        return result;
    }
    size_t root_mark = solver.trail.size();
    int proved = solver.ones + solver.root_bound();
    if (params.checkpoint_log)
        *params.checkpoint_log << "checkpoint bound " << proved << " nodes " << solver.nodes
                               << " time " << elapsed() << "\n";

    while (true) {
        if (proved >= upper) {
            result.optimal = true;
            break;
        }
        if (params.stop_at_bound && proved >= *params.stop_at_bound) break;
        int target = proved;
        bool found = solver.decide(target);
        solver.undo_to(root_mark);
        if (solver.aborted) {
            result.budget_exhausted = true;
            break;
        }
        if (found) {
            incumbent = solver.best_assignment;
            upper = target;
            result.optimal = true;
            break;
        }
        ++proved;
        if (params.checkpoint_log)
            *params.checkpoint_log << "checkpoint bound " << proved << " nodes " << solver.nodes
                                   << " time " << elapsed() << "\n";
    }

    result.best = make_solution(inst, incumbent);
    result.proved_lower_bound = proved;
    result.nodes_used = solver.nodes;
    if (params.checkpoint_log)
        *params.checkpoint_log << "done bound " << result.proved_lower_bound << " best "
                               << result.best.objective << (result.optimal ? " optimal" : "")
                               << " nodes " << result.nodes_used << " time " << elapsed() << "\n";
    return result;
}

}  // namespace latinforge
