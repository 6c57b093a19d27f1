#include "vecsched/baselines.hpp"

#include <algorithm>
#include <queue>

namespace vecsched {

namespace {

// residual-capacity bookkeeping shared by all baselines
struct Usage {
    std::vector<int> rbs;
    std::vector<int> cus;

    explicit Usage(const InstancePool& pool)
        : rbs(pool.rsu_rbs.size(), 0), cus(pool.rsu_cus.size(), 0) {}

    bool fits(const InstancePool& pool, const ServiceInstance& inst, int extra_rbs = 0,
              int extra_cus = 0) const {
        const std::size_t r = static_cast<std::size_t>(inst.rsu);
        return rbs[r] + inst.rbs - extra_rbs <= pool.rsu_rbs[r] &&
               cus[r] + inst.cus - extra_cus <= pool.rsu_cus[r];
    }
    void add(const ServiceInstance& inst) {
        rbs[static_cast<std::size_t>(inst.rsu)] += inst.rbs;
        cus[static_cast<std::size_t>(inst.rsu)] += inst.cus;
    }
    void remove(const ServiceInstance& inst) {
        rbs[static_cast<std::size_t>(inst.rsu)] -= inst.rbs;
        cus[static_cast<std::size_t>(inst.rsu)] -= inst.cus;
    }
};

std::vector<int> selected_ids(const std::vector<int>& per_task_selection) {
    std::vector<int> ids;
    for (int id : per_task_selection)
        if (id >= 0) ids.push_back(id);
    return ids;
}

}  // namespace

EfficiencyScore efficiency_score(const InstancePool& pool, int instance_id) {
    const ServiceInstance& inst = pool[instance_id];
    const double rb_share = static_cast<double>(inst.rbs) /
                            static_cast<double>(pool.rsu_rbs[static_cast<std::size_t>(inst.rsu)]);
    const double cu_share = static_cast<double>(inst.cus) /
                            static_cast<double>(pool.rsu_cus[static_cast<std::size_t>(inst.rsu)]);
    return {instance_id, inst.utility / (rb_share * cu_share)};
}

Assignment solve_greedy(const InstancePool& pool, const ProblemInstance& instance) {
    std::vector<EfficiencyScore> order;
    order.reserve(pool.size());
    for (int id = 0; id < static_cast<int>(pool.size()); ++id)
        order.push_back(efficiency_score(pool, id));
    std::stable_sort(order.begin(), order.end(),
                     [](const EfficiencyScore& a, const EfficiencyScore& b) {
                         return a.psi > b.psi;  // stable keeps id order on ties
                     });

    Usage usage(pool);
    std::vector<char> task_done(instance.tasks().size(), 0);
    std::vector<int> picked;
    for (const auto& score : order) {
        const ServiceInstance& inst = pool[score.instance_id];
        if (task_done[static_cast<std::size_t>(inst.task)]) continue;
        if (!usage.fits(pool, inst)) continue;
        usage.add(inst);
        task_done[static_cast<std::size_t>(inst.task)] = 1;
        picked.push_back(inst.id);
    }
    return make_assignment(pool, instance, picked);
}

namespace {

// Iterative baseline helpers ------------------------------------------------

// tasks ordered by their best achievable utility, strongest first
std::vector<int> task_order_by_best(const InstancePool& pool, std::size_t num_tasks) {
    std::vector<double> best(num_tasks, 0.0);
    for (const auto& inst : pool.all)
        best[static_cast<std::size_t>(inst.task)] =
            std::max(best[static_cast<std::size_t>(inst.task)], inst.utility);
    std::vector<int> order(num_tasks);
    for (std::size_t i = 0; i < num_tasks; ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return best[static_cast<std::size_t>(a)] > best[static_cast<std::size_t>(b)];
    });
    return order;
}

double total_utility(const InstancePool& pool, const std::vector<int>& sel) {
    double sum = 0.0;
    for (int id : sel)
        if (id >= 0) sum += pool[id].utility;
    return sum;
}

}  // namespace

Assignment solve_iterative(const InstancePool& pool, const ProblemInstance& instance,
                           int max_rounds) {
    const std::size_t num_tasks = instance.tasks().size();
    std::vector<int> sel(num_tasks, -1);
    std::vector<int> best_sel = sel;
    double best_total = 0.0;
    const std::vector<int> order = task_order_by_best(pool, num_tasks);

    for (int round = 0; round < max_rounds; ++round) {
        // (a) offloading step: resource amounts fixed, re-pick the RSU
        std::vector<int> next(num_tasks, -1);
        Usage usage(pool);
        for (int t : order) {
            const int cur = sel[static_cast<std::size_t>(t)];
            int choice = -1;
            for (int id : pool.by_task[static_cast<std::size_t>(t)]) {
                const ServiceInstance& inst = pool[id];
                if (cur >= 0 && (inst.rbs != pool[cur].rbs || inst.cus != pool[cur].cus))
                    continue;  // amounts stay fixed while the task is placed
                if (!usage.fits(pool, inst)) continue;
                if (choice < 0 || inst.utility > pool[choice].utility) choice = id;
            }
            if (choice >= 0) {
                usage.add(pool[choice]);
                next[static_cast<std::size_t>(t)] = choice;
            }
        }

        // (b) allocation step: per RSU, rebuild from each task's cheapest
        // instance and upgrade by largest marginal gain
        std::vector<int> alloc(num_tasks, -1);
        Usage usage2(pool);
        for (int t : order) {
            const int cur = next[static_cast<std::size_t>(t)];
            if (cur < 0) continue;
            const int rsu = pool[cur].rsu;
            int cheapest = -1;
            for (int id : pool.by_task[static_cast<std::size_t>(t)]) {
                if (pool[id].rsu != rsu) continue;
                if (cheapest < 0 || pool[id].rbs < pool[cheapest].rbs ||
                    (pool[id].rbs == pool[cheapest].rbs && pool[id].cus < pool[cheapest].cus))
                    cheapest = id;
            }
            if (cheapest >= 0 && usage2.fits(pool, pool[cheapest])) {
                usage2.add(pool[cheapest]);
                alloc[static_cast<std::size_t>(t)] = cheapest;
            }
        }
        for (;;) {
            int best_task = -1, best_inst = -1;
            double best_gain = 1e-12;
            for (std::size_t t = 0; t < num_tasks; ++t) {
                const int cur = alloc[t];
                if (cur < 0) continue;
                for (int id : pool.by_task[t]) {
                    const ServiceInstance& inst = pool[id];
                    if (inst.rsu != pool[cur].rsu || id == cur) continue;
                    const double gain = inst.utility - pool[cur].utility;
                    if (gain <= best_gain) continue;
                    if (!usage2.fits(pool, inst, pool[cur].rbs, pool[cur].cus)) continue;
                    best_task = static_cast<int>(t);
                    best_inst = id;
                    best_gain = gain;
                }
            }
            if (best_task < 0) break;
            usage2.remove(pool[alloc[static_cast<std::size_t>(best_task)]]);
            usage2.add(pool[best_inst]);
            alloc[static_cast<std::size_t>(best_task)] = best_inst;
        }

        const double total = total_utility(pool, alloc);
        sel = alloc;
        if (total > best_total + 1e-12) {
            best_total = total;
            best_sel = alloc;
        } else {
            break;  // fixed point (or no improvement): keep the best round
        }
    }
    return make_assignment(pool, instance, selected_ids(best_sel));
}

Assignment solve_game(const InstancePool& pool, const ProblemInstance& instance, int max_iters) {
    const std::size_t num_tasks = instance.tasks().size();
    if (max_iters <= 0) max_iters = 10 * std::max<int>(1, static_cast<int>(num_tasks));

    std::vector<int> sel(num_tasks, -1);
    Usage usage(pool);
    for (int iter = 0; iter < max_iters; ++iter) {
        int best_task = -1, best_inst = -1;
        double best_gain = 1e-12;
        for (std::size_t t = 0; t < num_tasks; ++t) {
            const int cur = sel[t];
            const double cur_ut = cur >= 0 ? pool[cur].utility : 0.0;
            const int free_rbs = cur >= 0 ? pool[cur].rbs : 0;
            const int free_cus = cur >= 0 ? pool[cur].cus : 0;
            for (int id : pool.by_task[t]) {
                if (id == cur) continue;
                const ServiceInstance& inst = pool[id];
                const double gain = inst.utility - cur_ut;
                if (gain <= best_gain) continue;
                const bool same_rsu = cur >= 0 && inst.rsu == pool[cur].rsu;
                if (!usage.fits(pool, inst, same_rsu ? free_rbs : 0, same_rsu ? free_cus : 0))
                    continue;
                best_task = static_cast<int>(t);
                best_inst = id;
                best_gain = gain;
            }
        }
        if (best_task < 0) break;
        if (sel[static_cast<std::size_t>(best_task)] >= 0)
            usage.remove(pool[sel[static_cast<std::size_t>(best_task)]]);
        usage.add(pool[best_inst]);
        sel[static_cast<std::size_t>(best_task)] = best_inst;
    }
    return make_assignment(pool, instance, selected_ids(sel));
}

Assignment solve_id_assign(const InstancePool& pool, const ProblemInstance& instance) {
    auto is_heavy = [&](const ServiceInstance& inst) {
        return 2 * inst.rbs > pool.rsu_rbs[static_cast<std::size_t>(inst.rsu)] ||
               2 * inst.cus > pool.rsu_cus[static_cast<std::size_t>(inst.rsu)];
    };

    // local-ratio pass over the lights: repeatedly take the instance with
    // the largest residual weight and charge it against its task's siblings
    std::vector<double> weight(pool.size(), 0.0);
    std::vector<char> alive(pool.size(), 0);
    using Entry = std::pair<double, int>;  // (-weight, id) for the heap
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;
    for (int id = 0; id < static_cast<int>(pool.size()); ++id) {
        if (is_heavy(pool[id])) continue;
        weight[static_cast<std::size_t>(id)] = pool[id].utility;
        alive[static_cast<std::size_t>(id)] = 1;
        heap.push({-pool[id].utility, id});
    }
    std::vector<int> stack;
    while (!heap.empty()) {
        auto [neg_w, id] = heap.top();
        heap.pop();
        if (!alive[static_cast<std::size_t>(id)]) continue;
        if (-neg_w != weight[static_cast<std::size_t>(id)]) continue;  // stale entry
        if (weight[static_cast<std::size_t>(id)] <= 0.0) break;
        const double w = weight[static_cast<std::size_t>(id)];
        stack.push_back(id);
        alive[static_cast<std::size_t>(id)] = 0;
        for (int sib : pool.by_task[static_cast<std::size_t>(pool[id].task)]) {
            if (!alive[static_cast<std::size_t>(sib)]) continue;
            weight[static_cast<std::size_t>(sib)] -= w;
            if (weight[static_cast<std::size_t>(sib)] > 0.0)
                heap.push({-weight[static_cast<std::size_t>(sib)], sib});
        }
    }

    Usage usage(pool);
    std::vector<char> task_done(instance.tasks().size(), 0);
    std::vector<int> picked;
    for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
        const ServiceInstance& inst = pool[*it];
        if (task_done[static_cast<std::size_t>(inst.task)]) continue;
        if (!usage.fits(pool, inst)) continue;
        usage.add(inst);
        task_done[static_cast<std::size_t>(inst.task)] = 1;
        picked.push_back(*it);
    }

    // heavies on whatever is left, best first
    std::vector<int> heavies;
    for (int id = 0; id < static_cast<int>(pool.size()); ++id)
        if (is_heavy(pool[id])) heavies.push_back(id);
    std::stable_sort(heavies.begin(), heavies.end(),
                     [&](int a, int b) { return pool[a].utility > pool[b].utility; });
    for (int id : heavies) {
        const ServiceInstance& inst = pool[id];
        if (task_done[static_cast<std::size_t>(inst.task)]) continue;
        if (!usage.fits(pool, inst)) continue;
        usage.add(inst);
        task_done[static_cast<std::size_t>(inst.task)] = 1;
        picked.push_back(id);
    }
    return make_assignment(pool, instance, picked);
}

}  // namespace vecsched
