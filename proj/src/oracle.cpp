#include "vecsched/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "vecsched/lp.hpp"
#include "vecsched/saround.hpp"
#include "vecsched/solve.hpp"

namespace vecsched {

namespace {

class ExactSearch {
public:
    ExactSearch(const InstancePool& pool, std::span<const double> weights,
                std::vector<std::vector<int>> candidates, const OracleBudget& budget)
        : pool_(pool), weights_(weights), cands_(std::move(candidates)), budget_(budget) {
        rb_left_ = pool.rsu_rbs;
        cu_left_ = pool.rsu_cus;

        // strongest tasks first, strongest instances first inside a task
        for (auto& list : cands_)
            std::stable_sort(list.begin(), list.end(), [&](int a, int b) {
                return weights_[static_cast<std::size_t>(a)] > weights_[static_cast<std::size_t>(b)];
            });
        std::stable_sort(cands_.begin(), cands_.end(), [&](const auto& a, const auto& b) {
            const double wa = a.empty() ? 0.0 : weights_[static_cast<std::size_t>(a.front())];
            const double wb = b.empty() ? 0.0 : weights_[static_cast<std::size_t>(b.front())];
            return wa > wb;
        });
        while (!cands_.empty() && cands_.back().empty()) cands_.pop_back();

        suffix_best_.assign(cands_.size() + 1, 0.0);
        for (std::size_t d = cands_.size(); d-- > 0;)
            suffix_best_[d] = suffix_best_[d + 1] +
                              weights_[static_cast<std::size_t>(cands_[d].front())];
    }

    OracleResult run() {
        start_ = std::chrono::steady_clock::now();
        root_ub_ = root_lp_bound();
        dfs(0, 0.0);
        OracleResult out;
        out.optimum = incumbent_;
        out.selected = best_;
        std::sort(out.selected.begin(), out.selected.end());
        out.nodes_explored = nodes_;
        out.exact = !exhausted_;
        return out;
    }

private:
    // LP relaxation over everything that is left; one solve at the root is
    // cheap and lets the search stop as soon as the incumbent matches it
    double root_lp_bound() const {
        LinearProgram lp;
        std::vector<int> vars;
        std::vector<int> task_row(cands_.size());
        for (std::size_t d = 0; d < cands_.size(); ++d) {
            task_row[d] = static_cast<int>(d);
            for (int id : cands_[d]) vars.push_back(id);
        }
        if (vars.empty()) return 0.0;
        const int num_rsus = static_cast<int>(pool_.rsu_rbs.size());
        lp.num_vars = static_cast<int>(vars.size());
        lp.rows.assign(static_cast<std::size_t>(2 * num_rsus) + cands_.size(),
                       {std::vector<double>(vars.size(), 0.0), 0.0});
        for (int r = 0; r < num_rsus; ++r) {
            lp.rows[static_cast<std::size_t>(2 * r)].rhs = pool_.rsu_rbs[static_cast<std::size_t>(r)];
            lp.rows[static_cast<std::size_t>(2 * r + 1)].rhs =
                pool_.rsu_cus[static_cast<std::size_t>(r)];
        }
        std::size_t v = 0;
        for (std::size_t d = 0; d < cands_.size(); ++d) {
            lp.rows[static_cast<std::size_t>(2 * num_rsus) + d].rhs = 1.0;
            for (int id : cands_[d]) {
                const ServiceInstance& inst = pool_[id];
                lp.objective.push_back(weights_[static_cast<std::size_t>(id)]);
                lp.rows[static_cast<std::size_t>(2 * inst.rsu)].coeffs[v] = inst.rbs;
                lp.rows[static_cast<std::size_t>(2 * inst.rsu + 1)].coeffs[v] = inst.cus;
                lp.rows[static_cast<std::size_t>(2 * num_rsus) + d].coeffs[v] = 1.0;
                ++v;
            }
        }
        return solve_lp(lp).objective_value;
    }

    bool out_of_budget() {
        if (nodes_ >= budget_.max_nodes) return true;
        if ((nodes_ & 0x1fff) == 0) {
            const auto elapsed = std::chrono::steady_clock::now() - start_;
            if (std::chrono::duration<double>(elapsed).count() > budget_.max_seconds) return true;
        }
        return false;
    }

    void dfs(std::size_t depth, double value) {
        if (done_ || exhausted_) return;
        ++nodes_;
        if (out_of_budget()) {
            exhausted_ = true;
            return;
        }
        if (value > incumbent_) {
            incumbent_ = value;
            best_ = chosen_;
            if (incumbent_ >= root_ub_ - 1e-9) done_ = true;  // matches the relaxation
        }
        if (depth == cands_.size()) return;
        if (value + suffix_best_[depth] <= incumbent_ + 1e-12) return;

        for (int id : cands_[depth]) {
            const ServiceInstance& inst = pool_[id];
            const std::size_t r = static_cast<std::size_t>(inst.rsu);
            if (rb_left_[r] < inst.rbs || cu_left_[r] < inst.cus) continue;
            rb_left_[r] -= inst.rbs;
            cu_left_[r] -= inst.cus;
            chosen_.push_back(id);
            dfs(depth + 1, value + weights_[static_cast<std::size_t>(id)]);
            chosen_.pop_back();
            rb_left_[r] += inst.rbs;
            cu_left_[r] += inst.cus;
            if (done_ || exhausted_) return;
        }
        dfs(depth + 1, value);  // skip this task
    }

    const InstancePool& pool_;
    std::span<const double> weights_;
    std::vector<std::vector<int>> cands_;
    std::vector<double> suffix_best_;
    std::vector<int> rb_left_, cu_left_;
    std::vector<int> chosen_, best_;
    double incumbent_ = 0.0;
    double root_ub_ = 0.0;
    long nodes_ = 0;
    OracleBudget budget_;
    std::chrono::steady_clock::time_point start_;
    bool done_ = false;
    bool exhausted_ = false;
};

std::vector<std::vector<int>> positive_candidates(const InstancePool& pool,
                                                  std::span<const double> weights,
                                                  int only_rsu) {
    std::vector<std::vector<int>> cands(pool.by_task.size());
    for (std::size_t t = 0; t < pool.by_task.size(); ++t)
        for (int id : pool.by_task[t]) {
            if (only_rsu >= 0 && pool[id].rsu != only_rsu) continue;
            if (weights[static_cast<std::size_t>(id)] > 0.0) cands[t].push_back(id);
        }
    return cands;
}

}  // namespace

OracleResult solve_exact(const InstancePool& pool, const ProblemInstance& instance,
                         const OracleBudget& budget) {
    (void)instance;
    std::vector<double> weights(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) weights[i] = pool.all[i].utility;
    return ExactSearch(pool, weights, positive_candidates(pool, weights, -1), budget).run();
}

OracleResult solve_exact_single_rsu(const InstancePool& pool, int rsu,
                                    std::span<const double> weights, const OracleBudget& budget) {
    return ExactSearch(pool, weights, positive_candidates(pool, weights, rsu), budget).run();
}

ProblemInstance random_small_instance(const InstanceFamily& family, Rng& rng) {
    const int num_rsus = static_cast<int>(rng.uniform_int(family.m_min, family.m_max));
    const int num_tasks = static_cast<int>(rng.uniform_int(family.n_min, family.n_max));
    const std::vector<std::string> hw_classes = {"hw_a", "hw_b"};
    const std::vector<std::string> services = {"svc_a", "svc_b", "svc_c"};
    const std::vector<double> periods = {0.05, 0.067, 0.1};

    char buf[16];
    std::vector<RsuSpec> rsus;
    int max_cus = 0;
    for (int k = 0; k < num_rsus; ++k) {
        RsuSpec rsu;
        std::snprintf(buf, sizeof buf, "r%02d", k);
        rsu.id = buf;
        rsu.total_rbs = static_cast<int>(rng.uniform_int(family.b_min, family.b_max));
        rsu.total_cus = static_cast<int>(rng.uniform_int(family.c_min, family.c_max));
        rsu.hardware_class = rng.pick(hw_classes);
        rsu.x_m = 100.0 * k;
        max_cus = std::max(max_cus, rsu.total_cus);
        rsus.push_back(rsu);
    }

    ExecutionProfile profiles;
    for (const auto& svc : services)
        for (const auto& hw : hw_classes) {
            const double work = rng.uniform(0.015, 0.12);  // seconds at one CU
            const double speed = hw == "hw_a" ? 1.0 : 1.6;
            for (int c = 1; c <= max_cus; ++c) profiles.set(svc, hw, c, work / (speed * c));
        }

    std::vector<TaskSpec> tasks;
    std::vector<LinkState> links;
    for (int i = 0; i < num_tasks; ++i) {
        TaskSpec task;
        std::snprintf(buf, sizeof buf, "t%02d", i);
        task.id = buf;
        task.period_s = rng.pick(periods);
        task.input_mb = rng.uniform(0.05, 0.3);
        task.local_exec_s = task.period_s * rng.uniform(0.4, 0.9);
        task.local_power_w = rng.uniform(3.0, 8.0);
        task.offload_power_w = rng.uniform(0.5, 2.5);
        task.service_type = rng.pick(services);
        std::snprintf(buf, sizeof buf, "v%02d", i);
        task.vehicle_id = buf;
        tasks.push_back(task);

        for (const auto& rsu : rsus) {
            LinkState link;
            link.vehicle_id = task.vehicle_id;
            link.rsu_id = rsu.id;
            link.accessible = rng.bernoulli(0.9);
            // aim the minimum RB demand at a random fraction of capacity so
            // contention shows up in both resources
            const double demand = rng.uniform(0.25, 1.6) * rsu.total_rbs;
            link.rate_mb_per_rb_s = task.input_mb / (0.5 * task.period_s * demand);
            links.push_back(link);
        }
    }
    return ProblemInstance::make(std::move(tasks), std::move(rsus), std::move(profiles),
                                 std::move(links));
}

std::optional<CertifyTarget> parse_certify_target(const std::string& name) {
    if (name == "saround") return CertifyTarget::SARound;
    if (name == "floor_rd") return CertifyTarget::FloorRd;
    if (name == "greedy") return CertifyTarget::Greedy;
    if (name == "iterative") return CertifyTarget::Iterative;
    if (name == "game") return CertifyTarget::Game;
    if (name == "idassign") return CertifyTarget::IdAssign;
    return std::nullopt;
}

std::string certify_target_name(CertifyTarget target) {
    switch (target) {
        case CertifyTarget::SARound: return "saround";
        case CertifyTarget::FloorRd: return "floor_rd";
        case CertifyTarget::Greedy: return "greedy";
        case CertifyTarget::Iterative: return "iterative";
        case CertifyTarget::Game: return "game";
        case CertifyTarget::IdAssign: return "idassign";
    }
    return "unknown";
}

namespace {

std::optional<std::string> check_lp_structure(const RsuLp& rlp, const BasicSolution& sol) {
    int positives = 0;
    int fractionals = 0;
    std::vector<int> frac_tasks;
    for (int v = 0; v < rlp.lp.num_vars; ++v) {
        const double value = sol.values[static_cast<std::size_t>(v)];
        if (value > kLpSnapTol) ++positives;
        if (lp_is_fractional(value)) {
            ++fractionals;
            frac_tasks.push_back(rlp.var_task[static_cast<std::size_t>(v)]);
        }
    }
    std::sort(frac_tasks.begin(), frac_tasks.end());
    frac_tasks.erase(std::unique(frac_tasks.begin(), frac_tasks.end()), frac_tasks.end());

    if (positives > rlp.num_tasks + 2)
        return std::to_string(positives) + " positive structural variables for " +
               std::to_string(rlp.num_tasks) + " tasks";
    if (fractionals > 4)
        return std::to_string(fractionals) + " fractional variables";
    if (frac_tasks.size() > 2)
        return std::to_string(frac_tasks.size()) + " tasks with fractional variables";

    std::vector<double> lhs(static_cast<std::size_t>(rlp.lp.num_rows), 0.0);
    std::vector<double> norm(static_cast<std::size_t>(rlp.lp.num_rows), 1.0);
    for (int v = 0; v < rlp.lp.num_vars; ++v)
        for (int e = rlp.lp.col_start[static_cast<std::size_t>(v)];
             e < rlp.lp.col_start[static_cast<std::size_t>(v) + 1]; ++e) {
            const std::size_t r = static_cast<std::size_t>(rlp.lp.entry_row[static_cast<std::size_t>(e)]);
            lhs[r] += rlp.lp.entry_value[static_cast<std::size_t>(e)] *
                      sol.values[static_cast<std::size_t>(v)];
            norm[r] = std::max(norm[r], std::abs(rlp.lp.entry_value[static_cast<std::size_t>(e)]));
        }
    for (int r = 0; r < rlp.lp.num_rows; ++r)
        if ((lhs[static_cast<std::size_t>(r)] - rlp.lp.rhs[static_cast<std::size_t>(r)]) /
                norm[static_cast<std::size_t>(r)] >
            1e-9)
            return "constraint violated by the LP solution";
    return std::nullopt;
}

}  // namespace

CertifyReport certify_ratio(CertifyTarget target, const InstanceFamily& family, int trials,
                            std::uint64_t seed) {
    CertifyReport report;
    report.target = target;
    report.trials = trials;
    if (target == CertifyTarget::SARound) report.bound = 0.25;
    if (target == CertifyTarget::FloorRd) report.bound = 1.0 / 3.0;
    if (trials <= 0) return report;

    InstanceFamily fam = family;
    if (target == CertifyTarget::FloorRd) fam.m_min = fam.m_max = 1;

    double ratio_sum = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
        Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(trial)));
        const ProblemInstance pi = random_small_instance(fam, rng);
        const InstancePool pool = enumerate_instances(pi, false);

        std::vector<double> weights(pool.size());
        for (std::size_t i = 0; i < pool.size(); ++i) weights[i] = pool.all[i].utility;

        for (int rsu = 0; rsu < static_cast<int>(pi.rsus().size()); ++rsu) {
            const RsuLp rlp = build_rsu_lp(pool, rsu, weights);
            if (rlp.lp.num_vars == 0) continue;
            const BasicSolution sol = solve_lp(rlp.lp);
            ++report.lps_checked;
            if (auto bad = check_lp_structure(rlp, sol)) {
                ++report.lp_violations;
                if (report.details.size() < 10)
                    report.details.push_back("trial " + std::to_string(trial) + " rsu " +
                                             std::to_string(rsu) + ": " + *bad);
            }
        }

        double value = 0.0;
        OracleResult opt;
        if (target == CertifyTarget::FloorRd) {
            const std::vector<int> sel = floor_rd(pool, 0, weights);
            for (int id : sel) value += weights[static_cast<std::size_t>(id)];
            opt = solve_exact_single_rsu(pool, 0, weights);
            const Assignment asg = make_assignment(pool, pi, sel);
            if (!validate(asg, pi).empty()) ++report.feasibility_violations;
        } else {
            Algorithm algo = Algorithm::SARound;
            switch (target) {
                case CertifyTarget::Greedy: algo = Algorithm::Greedy; break;
                case CertifyTarget::Iterative: algo = Algorithm::Iterative; break;
                case CertifyTarget::Game: algo = Algorithm::Game; break;
                case CertifyTarget::IdAssign: algo = Algorithm::IdAssign; break;
                default: break;
            }
            const Assignment asg = run_algorithm(algo, pool, pi);
            value = asg.total_utility;
            opt = solve_exact(pool, pi);
            if (!validate(asg, pi).empty()) ++report.feasibility_violations;
        }

        report.oracle_nodes += opt.nodes_explored;
        report.all_exact = report.all_exact && opt.exact;
        if (opt.optimum > 1e-12) {
            const double ratio = value / opt.optimum;
            ++report.ratio_samples;
            ratio_sum += ratio;
            report.min_ratio = std::min(report.min_ratio, ratio);
            if (report.bound && ratio < *report.bound - 1e-9) {
                ++report.bound_violations;
                if (report.details.size() < 10)
                    report.details.push_back("trial " + std::to_string(trial) + ": ratio " +
                                             std::to_string(ratio));
            }
        }
    }
    if (report.ratio_samples > 0) report.mean_ratio = ratio_sum / report.ratio_samples;
    return report;
}

}  // namespace vecsched
