#include "vecsched/instances.hpp"

#include <algorithm>

namespace vecsched {

std::optional<int> min_rbs(const TaskSpec& task, const RsuSpec& rsu, int cus,
                           const LinkState& link, const ExecutionProfile& profiles) {
    if (!link.accessible) return std::nullopt;
    auto proc = profiles.proc_time(task.service_type, rsu.hardware_class, cus);
    if (!proc) return std::nullopt;
    return min_rbs_for(task.input_mb, link.rate_mb_per_rb_s, *proc, task.period_s, rsu.total_rbs);
}

namespace {

struct Candidate {
    int rbs;
    int cus;
    double utility;
};

// Pareto filter over one (task, rsu) group: drop any candidate that has
// another with b' <= b, c' <= c, u' >= u and at least one strict. Tuples are
// unique, so domination always has a strict coordinate.
void prune_dominated(std::vector<Candidate>& group) {
    std::sort(group.begin(), group.end(), [](const Candidate& a, const Candidate& b) {
        if (a.rbs != b.rbs) return a.rbs < b.rbs;
        return a.cus < b.cus;
    });
    std::vector<Candidate> kept;
    kept.reserve(group.size());
    for (const auto& cand : group) {
        bool dominated = false;
        for (const auto& other : kept) {
            if (other.rbs <= cand.rbs && other.cus <= cand.cus && other.utility >= cand.utility) {
                dominated = true;
                break;
            }
        }
        if (!dominated) kept.push_back(cand);
    }
    group.swap(kept);
}

}  // namespace

InstancePool enumerate_instances(const ProblemInstance& instance, bool prune,
                                 const UtilityFn& utility) {
    const auto& tasks = instance.tasks();
    const auto& rsus = instance.rsus();

    InstancePool pool;
    pool.by_task.resize(tasks.size());
    pool.by_rsu.resize(rsus.size());
    for (const RsuSpec& rsu : rsus) {
        pool.rsu_rbs.push_back(rsu.total_rbs);
        pool.rsu_cus.push_back(rsu.total_cus);
    }

    std::vector<Candidate> group;
    for (int ti = 0; ti < static_cast<int>(tasks.size()); ++ti) {
        const TaskSpec& task = tasks[static_cast<std::size_t>(ti)];
        for (int ri = 0; ri < static_cast<int>(rsus.size()); ++ri) {
            const RsuSpec& rsu = rsus[static_cast<std::size_t>(ri)];
            const LinkState* link = instance.link(ti, ri);
            if (!link) continue;

            group.clear();
            for (int c = 1; c <= rsu.total_cus; ++c) {
                auto b0 = min_rbs(task, rsu, c, *link, instance.profiles());
                if (!b0) continue;  // no RB count meets the deadline at this c
                for (int b = *b0; b <= rsu.total_rbs; ++b) {
                    double u = utility(task, rsu, b, c, *link, instance.profiles());
                    if (u > 0.0) group.push_back({b, c, u});
                }
            }
            if (prune) prune_dominated(group);

            std::sort(group.begin(), group.end(), [](const Candidate& a, const Candidate& b) {
                if (a.rbs != b.rbs) return a.rbs < b.rbs;
                return a.cus < b.cus;
            });
            for (const auto& cand : group)
                pool.all.push_back({-1, ti, ri, cand.rbs, cand.cus, cand.utility});
        }
    }

    // tasks/rsus are id-sorted, so (task, rsu, b, c) order is already in place
    for (int id = 0; id < static_cast<int>(pool.all.size()); ++id) {
        pool.all[static_cast<std::size_t>(id)].id = id;
        pool.by_task[static_cast<std::size_t>(pool.all[static_cast<std::size_t>(id)].task)]
            .push_back(id);
        pool.by_rsu[static_cast<std::size_t>(pool.all[static_cast<std::size_t>(id)].rsu)]
            .push_back(id);
    }
    return pool;
}

Assignment make_assignment(const InstancePool& pool, const ProblemInstance& instance,
                           std::span<const int> instance_ids) {
    Assignment out;
    out.used_rbs.assign(instance.rsus().size(), 0);
    out.used_cus.assign(instance.rsus().size(), 0);

    std::vector<int> ids(instance_ids.begin(), instance_ids.end());
    std::sort(ids.begin(), ids.end());
    for (int id : ids) {
        const ServiceInstance& inst = pool[id];
        out.selections.push_back({inst.task, inst.rsu, inst.rbs, inst.cus, inst.utility});
        out.used_rbs[static_cast<std::size_t>(inst.rsu)] += inst.rbs;
        out.used_cus[static_cast<std::size_t>(inst.rsu)] += inst.cus;
        out.total_utility += inst.utility;
    }
    return out;
}

}  // namespace vecsched
