#include "vecsched/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace vecsched {

void ExecutionProfile::set(const std::string& service_type, const std::string& hardware_class,
                           int cus, double proc_time_s) {
    entries_[{service_type, hardware_class, cus}] = proc_time_s;
}

std::optional<double> ExecutionProfile::proc_time(const std::string& service_type,
                                                  const std::string& hardware_class,
                                                  int cus) const {
    auto it = entries_.find({service_type, hardware_class, cus});
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

bool ExecutionProfile::has_service(const std::string& service_type) const {
    // entries_ is ordered by (service, hardware, cus), so a lower_bound probe suffices
    auto it = entries_.lower_bound({service_type, "", 0});
    return it != entries_.end() && std::get<0>(it->first) == service_type;
}

std::optional<std::string> ExecutionProfile::check_invariants() const {
    const std::string* prev_svc = nullptr;
    const std::string* prev_hw = nullptr;
    int prev_cus = 0;
    double prev_time = 0.0;
    for (const auto& [key, time] : entries_) {
        if (time <= 0.0)
            return "non-positive proc_time for (" + std::get<0>(key) + ", " + std::get<1>(key) +
                   ", " + std::to_string(std::get<2>(key)) + ")";
        if (prev_svc && *prev_svc == std::get<0>(key) && *prev_hw == std::get<1>(key) &&
            std::get<2>(key) > prev_cus && time > prev_time)
            return "proc_time increases with cus for (" + std::get<0>(key) + ", " +
                   std::get<1>(key) + ") at cus=" + std::to_string(std::get<2>(key));
        prev_svc = &std::get<0>(key);
        prev_hw = &std::get<1>(key);
        prev_cus = std::get<2>(key);
        prev_time = time;
    }
    return std::nullopt;
}

std::string to_string(Violation::Kind kind) {
    switch (kind) {
        case Violation::Kind::RbCapacity: return "rb_capacity";
        case Violation::Kind::CuCapacity: return "cu_capacity";
        case Violation::Kind::MultipleChoice: return "multiple_choice";
        case Violation::Kind::Access: return "access";
        case Violation::Kind::Deadline: return "deadline";
        case Violation::Kind::UtilityMismatch: return "utility_mismatch";
        case Violation::Kind::UsageMismatch: return "usage_mismatch";
        case Violation::Kind::BadReference: return "bad_reference";
    }
    return "unknown";
}

ProblemInstance ProblemInstance::make(std::vector<TaskSpec> tasks, std::vector<RsuSpec> rsus,
                                      ExecutionProfile profiles, std::vector<LinkState> links) {
    auto by_id = [](const auto& a, const auto& b) { return a.id < b.id; };
    std::sort(tasks.begin(), tasks.end(), by_id);
    std::sort(rsus.begin(), rsus.end(), by_id);

    for (std::size_t i = 1; i < tasks.size(); ++i)
        if (tasks[i].id == tasks[i - 1].id)
            throw std::invalid_argument("duplicate task id: " + tasks[i].id);
    for (std::size_t i = 1; i < rsus.size(); ++i)
        if (rsus[i].id == rsus[i - 1].id)
            throw std::invalid_argument("duplicate rsu id: " + rsus[i].id);

    for (const auto& t : tasks) {
        if (t.period_s <= 0 || t.input_mb <= 0 || t.local_exec_s <= 0)
            throw std::invalid_argument("task " + t.id +
                                        ": period, input size, and local exec must be positive");
        if (t.local_exec_s > t.period_s)
            throw std::invalid_argument("task " + t.id + ": local_exec_s exceeds period_s");
        if (t.criticality == Criticality::MkConstrained && !(0 < t.mk_m && t.mk_m <= t.mk_k))
            throw std::invalid_argument("task " + t.id + ": mk window requires 0 < m <= k");
    }
    for (const auto& r : rsus) {
        if (r.total_rbs < 1 || r.total_cus < 1)
            throw std::invalid_argument("rsu " + r.id + ": capacities must be >= 1");
        if (r.init_delay_s < 0)
            throw std::invalid_argument("rsu " + r.id + ": negative init delay");
    }
    if (auto bad = profiles.check_invariants())
        throw std::invalid_argument("execution profile: " + *bad);

    ProblemInstance pi;
    pi.tasks_ = std::move(tasks);
    pi.rsus_ = std::move(rsus);
    pi.profiles_ = std::move(profiles);
    pi.links_ = std::move(links);

    std::set<std::string> vehicles;
    for (const auto& t : pi.tasks_) vehicles.insert(t.vehicle_id);
    pi.link_grid_.assign(pi.tasks_.size() * pi.rsus_.size(), -1);
    for (std::size_t li = 0; li < pi.links_.size(); ++li) {
        const LinkState& link = pi.links_[li];
        if (!vehicles.count(link.vehicle_id))
            throw std::invalid_argument("link references unknown vehicle: " + link.vehicle_id);
        int r = pi.rsu_index(link.rsu_id);
        if (r < 0) throw std::invalid_argument("link references unknown rsu: " + link.rsu_id);
        if (link.accessible && link.rate_mb_per_rb_s <= 0)
            throw std::invalid_argument("accessible link with non-positive rate: " +
                                        link.vehicle_id + "->" + link.rsu_id);
        for (std::size_t ti = 0; ti < pi.tasks_.size(); ++ti) {
            if (pi.tasks_[ti].vehicle_id != link.vehicle_id) continue;
            pi.link_grid_[ti * pi.rsus_.size() + static_cast<std::size_t>(r)] =
                static_cast<int>(li);
        }
    }
    return pi;
}

int ProblemInstance::task_index(const std::string& id) const {
    auto it = std::lower_bound(tasks_.begin(), tasks_.end(), id,
                               [](const TaskSpec& t, const std::string& s) { return t.id < s; });
    if (it == tasks_.end() || it->id != id) return -1;
    return static_cast<int>(it - tasks_.begin());
}

int ProblemInstance::rsu_index(const std::string& id) const {
    auto it = std::lower_bound(rsus_.begin(), rsus_.end(), id,
                               [](const RsuSpec& r, const std::string& s) { return r.id < s; });
    if (it == rsus_.end() || it->id != id) return -1;
    return static_cast<int>(it - rsus_.begin());
}

const LinkState* ProblemInstance::link(int task, int rsu) const {
    if (task < 0 || rsu < 0 || static_cast<std::size_t>(task) >= tasks_.size() ||
        static_cast<std::size_t>(rsu) >= rsus_.size())
        return nullptr;
    const int li =
        link_grid_[static_cast<std::size_t>(task) * rsus_.size() + static_cast<std::size_t>(rsu)];
    if (li < 0) return nullptr;
    const LinkState& l = links_[static_cast<std::size_t>(li)];
    return l.accessible ? &l : nullptr;
}

double offload_time(double input_mb, int rbs, double rate_mb_per_rb_s) {
    if (rbs == 0 || rate_mb_per_rb_s <= 0.0)
        throw std::domain_error("offload_time requires rbs >= 1 and a positive rate");
    return input_mb / (static_cast<double>(rbs) * rate_mb_per_rb_s);
}

bool deadline_feasible(const TaskSpec& task, const RsuSpec& rsu, int rbs, int cus,
                       const LinkState& link, const ExecutionProfile& profiles) {
    if (!link.accessible || rbs < 1 || cus < 1) return false;
    auto proc = profiles.proc_time(task.service_type, rsu.hardware_class, cus);
    if (!proc) return false;
    return offload_time(task.input_mb, rbs, link.rate_mb_per_rb_s) + *proc <= task.period_s;
}

std::optional<int> min_rbs_for(double input_mb, double rate_mb_per_rb_s, double proc_s,
                               double period_s, int max_rbs) {
    if (rate_mb_per_rb_s <= 0 || proc_s >= period_s) return std::nullopt;
    const double budget = period_s - proc_s;
    int b = static_cast<int>(std::ceil(input_mb / (rate_mb_per_rb_s * budget)));
    b = std::max(b, 1);
    // the ceil seed can be off by one ulp; settle it against the exact predicate
    auto fits = [&](int n) { return input_mb / (static_cast<double>(n) * rate_mb_per_rb_s) + proc_s <= period_s; };
    while (b > 1 && fits(b - 1)) --b;
    while (b <= max_rbs && !fits(b)) ++b;
    if (b > max_rbs) return std::nullopt;
    return b;
}

double energy_utility(const TaskSpec& task, const RsuSpec& rsu, int rbs, int cus,
                      const LinkState& link, const ExecutionProfile& profiles) {
    if (!deadline_feasible(task, rsu, rbs, cus, link, profiles)) return 0.0;
    const double d_o = offload_time(task.input_mb, rbs, link.rate_mb_per_rb_s);
    const double saved =
        (task.local_power_w * task.local_exec_s - task.offload_power_w * d_o) / task.period_s;
    return std::max(saved, 0.0);
}

std::vector<Violation> validate(const Assignment& assignment, const ProblemInstance& instance) {
    std::vector<Violation> out;
    const auto& tasks = instance.tasks();
    const auto& rsus = instance.rsus();

    std::vector<int> task_count(tasks.size(), 0);
    std::vector<int> rb_use(rsus.size(), 0), cu_use(rsus.size(), 0);
    double utility_sum = 0.0;

    for (const auto& sel : assignment.selections) {
        if (sel.task < 0 || static_cast<std::size_t>(sel.task) >= tasks.size() || sel.rsu < 0 ||
            static_cast<std::size_t>(sel.rsu) >= rsus.size()) {
            out.push_back({Violation::Kind::BadReference, "", "selection references unknown task or rsu"});
            continue;
        }
        const TaskSpec& task = tasks[static_cast<std::size_t>(sel.task)];
        const RsuSpec& rsu = rsus[static_cast<std::size_t>(sel.rsu)];
        if (++task_count[static_cast<std::size_t>(sel.task)] == 2)
            out.push_back({Violation::Kind::MultipleChoice, task.id,
                           "more than one service instance selected"});
        const LinkState* link = instance.link(sel.task, sel.rsu);
        if (!link) {
            out.push_back({Violation::Kind::Access, task.id, "rsu " + rsu.id + " not accessible"});
        } else if (!deadline_feasible(task, rsu, sel.rbs, sel.cus, *link, instance.profiles())) {
            out.push_back({Violation::Kind::Deadline, task.id,
                           "allocation misses the deadline on rsu " + rsu.id});
        }
        rb_use[static_cast<std::size_t>(sel.rsu)] += sel.rbs;
        cu_use[static_cast<std::size_t>(sel.rsu)] += sel.cus;
        utility_sum += sel.utility;
    }

    for (std::size_t r = 0; r < rsus.size(); ++r) {
        if (rb_use[r] > rsus[r].total_rbs)
            out.push_back({Violation::Kind::RbCapacity, rsus[r].id,
                           std::to_string(rb_use[r]) + " RBs used, " +
                               std::to_string(rsus[r].total_rbs) + " available"});
        if (cu_use[r] > rsus[r].total_cus)
            out.push_back({Violation::Kind::CuCapacity, rsus[r].id,
                           std::to_string(cu_use[r]) + " CUs used, " +
                               std::to_string(rsus[r].total_cus) + " available"});
    }

    const double tol = 1e-9 * std::max(1.0, std::abs(utility_sum));
    if (std::abs(assignment.total_utility - utility_sum) > tol)
        out.push_back({Violation::Kind::UtilityMismatch, "",
                       "total_utility does not match the sum of selections"});
    if (!assignment.used_rbs.empty() || !assignment.used_cus.empty()) {
        bool mismatch = assignment.used_rbs.size() != rsus.size() ||
                        assignment.used_cus.size() != rsus.size();
        for (std::size_t r = 0; !mismatch && r < rsus.size(); ++r)
            mismatch = assignment.used_rbs[r] != rb_use[r] || assignment.used_cus[r] != cu_use[r];
        if (mismatch)
            out.push_back({Violation::Kind::UsageMismatch, "",
                           "stored per-RSU usage disagrees with the selections"});
    }
    return out;
}

}  // namespace vecsched
