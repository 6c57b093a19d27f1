#include "vecsched/saround.hpp"

#include <algorithm>

namespace vecsched {

std::vector<int> floor_rd(const InstancePool& pool, int rsu, std::span<const double> weights) {
    const RsuLp rlp = build_rsu_lp(pool, rsu, weights);
    if (rlp.lp.num_vars == 0) return {};  // no positive-weight instance here

    const auto crash = greedy_crash_vertex(pool, rlp);
    const BasicSolution sol = solve_lp(rlp.lp, crash);
    std::vector<int> floored;
    double floored_weight = 0.0;
    for (int v = 0; v < rlp.lp.num_vars; ++v) {
        if (lp_is_one(sol.values[static_cast<std::size_t>(v)])) {
            const int id = rlp.var_instance[static_cast<std::size_t>(v)];
            floored.push_back(id);
            floored_weight += weights[static_cast<std::size_t>(id)];
        }
    }

    // heaviest single instance; vars are in ascending instance-id order, so
    // the first maximum realizes the lowest-id tie break
    int heaviest = rlp.var_instance.front();
    double heaviest_weight = weights[static_cast<std::size_t>(heaviest)];
    for (int v = 1; v < rlp.lp.num_vars; ++v) {
        const int id = rlp.var_instance[static_cast<std::size_t>(v)];
        if (weights[static_cast<std::size_t>(id)] > heaviest_weight) {
            heaviest = id;
            heaviest_weight = weights[static_cast<std::size_t>(id)];
        }
    }

    if (floored_weight < heaviest_weight) return {heaviest};
    return floored;
}

std::pair<std::vector<double>, std::vector<double>> decompose_weights(
    std::span<const double> weights, const InstancePool& pool, int rsu,
    std::span<const int> selected) {
    std::vector<double> w1(weights.size(), 0.0);
    for (int id : pool.by_rsu[static_cast<std::size_t>(rsu)])
        w1[static_cast<std::size_t>(id)] = weights[static_cast<std::size_t>(id)];
    for (int sel : selected) {
        const double sel_weight = weights[static_cast<std::size_t>(sel)];
        for (int sibling : pool.by_task[static_cast<std::size_t>(pool[sel].task)])
            if (pool[sibling].rsu != rsu) w1[static_cast<std::size_t>(sibling)] = sel_weight;
    }
    // w2 as the exact remainder keeps w1 + w2 = w bit-for-bit
    std::vector<double> w2(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) w2[i] = weights[i] - w1[i];
    return {std::move(w1), std::move(w2)};
}

Assignment saround(const InstancePool& pool, const ProblemInstance& instance) {
    const int num_rsus = static_cast<int>(instance.rsus().size());

    std::vector<double> weights(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) weights[i] = pool.all[i].utility;

    // forward pass: one rounding layer per RSU, marginal weights flow down
    std::vector<std::vector<int>> layer_picks(static_cast<std::size_t>(num_rsus));
    for (int k = 0; k < num_rsus; ++k) {
        layer_picks[static_cast<std::size_t>(k)] = floor_rd(pool, k, weights);
        auto [w1, w2] =
            decompose_weights(weights, pool, k, layer_picks[static_cast<std::size_t>(k)]);
        weights = std::move(w2);
    }

    // unwind: a pick survives only if no deeper layer already serves its task
    std::vector<char> task_taken(instance.tasks().size(), 0);
    std::vector<int> merged;
    for (int k = num_rsus - 1; k >= 0; --k) {
        for (int id : layer_picks[static_cast<std::size_t>(k)]) {
            char& taken = task_taken[static_cast<std::size_t>(pool[id].task)];
            if (!taken) {
                taken = 1;
                merged.push_back(id);
            }
        }
    }
    return make_assignment(pool, instance, merged);
}

}  // namespace vecsched
