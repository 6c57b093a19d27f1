//
// vecsched -- feasible service-instance enumeration.
//
// A service instance is a candidate tuple (task, RSU, RBs, CUs) that
// passes the access, capacity, and deadline checks and has positive
// utility. The pool is what every solver selects over.
//
#pragma once

#include <optional>
#include <vector>

#include "vecsched/model.hpp"

namespace vecsched {

struct ServiceInstance {
    int id = -1;    // dense index, assigned in sorted (task, rsu, rbs, cus) order
    int task = -1;  // index into ProblemInstance::tasks()
    int rsu = -1;   // index into ProblemInstance::rsus()
    int rbs = 0;
    int cus = 0;
    double utility = 0.0;  // base utility u(l), cached at enumeration time
};

struct InstancePool {
    std::vector<ServiceInstance> all;
    std::vector<std::vector<int>> by_task;  // task index -> instance ids
    std::vector<std::vector<int>> by_rsu;   // rsu index -> instance ids
    std::vector<int> rsu_rbs;               // capacity snapshot per rsu index
    std::vector<int> rsu_cus;

    bool empty() const { return all.empty(); }
    std::size_t size() const { return all.size(); }
    const ServiceInstance& operator[](int id) const {
        return all[static_cast<std::size_t>(id)];
    }
};

/// Enumerates every feasible positive-utility (task, rsu, b, c) tuple with
/// 1 <= b <= B_k and 1 <= c <= C_k. With prune=true, instances dominated by
/// another instance of the same (task, rsu) pair (b' <= b, c' <= c,
/// u' >= u, at least one strict) are dropped; pruning preserves the exact
/// optimum. Deterministic: ids follow sorted (task, rsu, b, c) order.
InstancePool enumerate_instances(const ProblemInstance& instance, bool prune,
                                 const UtilityFn& utility = energy_utility);

/// Smallest RB count making (task, rsu, cus) deadline-feasible, or nullopt.
std::optional<int> min_rbs(const TaskSpec& task, const RsuSpec& rsu, int cus,
                           const LinkState& link, const ExecutionProfile& profiles);

/// Assembles an Assignment (selections, per-RSU usage, total base utility)
/// from a set of instance ids, in ascending id order.
Assignment make_assignment(const InstancePool& pool, const ProblemInstance& instance,
                           std::span<const int> instance_ids);

}  // namespace vecsched
