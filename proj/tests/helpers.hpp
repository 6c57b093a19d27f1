// Shared fixtures for the unit tests: hand-built instance pools for the
// LP/rounding internals and small real problem instances with exact-ish
// target utilities for end-to-end solver checks.
#pragma once

#include <array>
#include <string>
#include <vector>

#include "vecsched/instances.hpp"
#include "vecsched/model.hpp"

namespace vecsched::testing {

struct HandInstance {
    int task;
    int rsu;
    int rbs;
    int cus;
    double utility;
};

// Instances must already be in (task, rsu, rbs, cus) order; ids follow it.
inline InstancePool hand_pool(int num_tasks, const std::vector<std::pair<int, int>>& rsu_caps,
                              const std::vector<HandInstance>& instances) {
    InstancePool pool;
    pool.by_task.resize(static_cast<std::size_t>(num_tasks));
    pool.by_rsu.resize(rsu_caps.size());
    for (const auto& [rbs, cus] : rsu_caps) {
        pool.rsu_rbs.push_back(rbs);
        pool.rsu_cus.push_back(cus);
    }
    int id = 0;
    for (const auto& h : instances) {
        pool.all.push_back({id, h.task, h.rsu, h.rbs, h.cus, h.utility});
        pool.by_task[static_cast<std::size_t>(h.task)].push_back(id);
        pool.by_rsu[static_cast<std::size_t>(h.rsu)].push_back(id);
        ++id;
    }
    return pool;
}

inline RsuSpec make_rsu(const std::string& id, int rbs, int cus,
                        const std::string& hw = "hw_a") {
    RsuSpec rsu;
    rsu.id = id;
    rsu.total_rbs = rbs;
    rsu.total_cus = cus;
    rsu.hardware_class = hw;
    return rsu;
}

inline TaskSpec make_task(const std::string& id, const std::string& vehicle,
                          const std::string& svc, double period = 0.1, double input = 0.05,
                          double local_exec = 0.08, double p_local = 6.0,
                          double p_offload = 1.0) {
    TaskSpec t;
    t.id = id;
    t.period_s = period;
    t.input_mb = input;
    t.local_exec_s = local_exec;
    t.local_power_w = p_local;
    t.offload_power_w = p_offload;
    t.service_type = svc;
    t.vehicle_id = vehicle;
    return t;
}

inline LinkState make_link(const std::string& vehicle, const std::string& rsu, double rate,
                           bool accessible = true) {
    return {vehicle, rsu, rate, accessible};
}

// One task whose only feasible instances sit at `cus` CUs with min RB count
// `min_b` (at unit link rate), and whose utility is u_target regardless of
// the allocated RBs (offload power is zero, so pruning keeps b = min_b).
struct FlatTask {
    std::string id;
    double utility;
    int min_b;
    int cus;
};

// A problem on one or more RSUs built from FlatTask descriptions: profile
// rows exist only at each task's chosen CU count (d_p = 0.05 s, period
// 0.1 s), every vehicle reaches every RSU at rate 1.
inline ProblemInstance flat_case(const std::vector<FlatTask>& specs,
                                 const std::vector<std::pair<int, int>>& rsu_caps) {
    std::vector<RsuSpec> rsus;
    for (std::size_t k = 0; k < rsu_caps.size(); ++k)
        rsus.push_back(make_rsu("r" + std::to_string(k), rsu_caps[k].first, rsu_caps[k].second));

    ExecutionProfile profiles;
    std::vector<TaskSpec> tasks;
    std::vector<LinkState> links;
    for (const auto& spec : specs) {
        const std::string svc = "svc_" + spec.id;
        // utility = p_l * d_l / period with p_offload = 0
        TaskSpec t = make_task(spec.id, "v_" + spec.id, svc, 0.1,
                               0.05 * spec.min_b - 0.01, 0.08,
                               spec.utility * 0.1 / 0.08, 0.0);
        tasks.push_back(t);
        for (const auto& rsu : rsus) {
            profiles.set(svc, rsu.hardware_class, spec.cus, 0.05);
            links.push_back(make_link(t.vehicle_id, rsu.id, 1.0));
        }
    }
    return ProblemInstance::make(std::move(tasks), std::move(rsus), std::move(profiles),
                                 std::move(links));
}

}  // namespace vecsched::testing
