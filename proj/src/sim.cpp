#include "vecsched/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <deque>
#include <map>
#include <queue>
#include <stdexcept>

#include "vecsched/instances.hpp"
#include "vecsched/rng.hpp"
#include "vecsched/scenario.hpp"

namespace vecsched {

std::optional<Mode> parse_mode(const std::string& name) {
    if (name == "sched_all") return Mode::SchedAll;
    if (name == "sched_remain") return Mode::SchedRemain;
    return std::nullopt;
}

std::string mode_name(Mode mode) {
    return mode == Mode::SchedAll ? "sched_all" : "sched_remain";
}

std::optional<Quality> parse_quality(const std::string& name) {
    if (name == "low") return Quality::Low;
    if (name == "medium") return Quality::Medium;
    if (name == "high") return Quality::High;
    return std::nullopt;
}

std::string quality_name(Quality quality) {
    switch (quality) {
        case Quality::Low: return "low";
        case Quality::Medium: return "medium";
        case Quality::High: return "high";
    }
    return "unknown";
}

double mcs_rate_fraction(int mcs) {
    // normalized spectral-efficiency ladder, index 14 carries the peak rate
    static constexpr double kFraction[kMaxMcs + 1] = {
        0.0637, 0.1052, 0.1662, 0.2438, 0.3268, 0.4099, 0.4709, 0.5291,
        0.5983, 0.6676, 0.7119, 0.7562, 0.8393, 0.9197, 1.0};
    const int idx = std::clamp(mcs, 0, kMaxMcs);
    return kFraction[idx];
}

int distance_mcs_cap(double distance_m, double radius_m, double atten) {
    if (radius_m <= 0) return kMaxMcs;
    const double drop = atten * kMaxMcs * std::max(0.0, distance_m) / radius_m;
    return std::clamp(kMaxMcs - static_cast<int>(std::floor(drop)), 0, kMaxMcs);
}

QualityParams quality_params(Quality quality) {
    switch (quality) {
        case Quality::High: return {13.0, 0.05, 0.10};
        case Quality::Medium: return {9.0, 0.15, 0.20};
        case Quality::Low: return {5.0, 0.25, 0.30};
    }
    return {9.0, 0.15, 0.20};
}

namespace {

std::string fmt(const char* pattern, ...) {
    char buf[256];
    va_list args;
    va_start(args, pattern);
    std::vsnprintf(buf, sizeof buf, pattern, args);
    va_end(args);
    return buf;
}

// event-type priority fixes the processing order at equal timestamps:
// readiness first, then channel feedback, then scheduling, then job
// completions strictly before the next releases
enum EvType : int {
    kServiceReady = 0,
    kSrsTick = 1,
    kScheduleTick = 2,
    kJobComplete = 3,
    kJobRelease = 4,
};

struct Ev {
    double t;
    int prio;
    int a;  // task / job / cycle index
    long b;  // generation stamp where applicable
    long seq;
    bool operator>(const Ev& o) const {
        if (t != o.t) return t > o.t;
        if (prio != o.prio) return prio > o.prio;
        if (a != o.a) return a > o.a;
        return seq > o.seq;
    }
};

struct Job {
    int task = -1;
    double release = 0.0;
    double d_o = 0.0;
    bool offloaded = false;
    bool met = true;
    double savings = 0.0;
    double complete = 0.0;
};

class Simulation {
public:
    Simulation(const Scenario& sc, const SimConfig& cfg)
        : sc_(sc), cfg_(cfg), rng_(cfg.rng_seed) {
        validate_config();

        tasks_ = sc.tasks;
        rsus_ = sc.rsus;
        std::sort(tasks_.begin(), tasks_.end(),
                  [](const TaskSpec& a, const TaskSpec& b) { return a.id < b.id; });
        std::sort(rsus_.begin(), rsus_.end(),
                  [](const RsuSpec& a, const RsuSpec& b) { return a.id < b.id; });
        for (std::size_t i = 0; i < tasks_.size(); ++i) task_idx_[tasks_[i].id] = static_cast<int>(i);
        for (std::size_t i = 0; i < rsus_.size(); ++i) rsu_idx_[rsus_[i].id] = static_cast<int>(i);

        std::map<std::string, const VehicleTrace*> trace_by_vehicle;
        for (const auto& tr : sc.traces) trace_by_vehicle[tr.vehicle_id] = &tr;
        for (const auto& task : tasks_) {
            if (!vehicle_idx_.count(task.vehicle_id)) {
                vehicle_idx_[task.vehicle_id] = static_cast<int>(vehicles_.size());
                vehicles_.push_back(task.vehicle_id);
                auto it = trace_by_vehicle.find(task.vehicle_id);
                vehicle_trace_.push_back(it == trace_by_vehicle.end() ? nullptr : it->second);
            }
        }
        vehicle_tasks_.resize(vehicles_.size());
        for (std::size_t t = 0; t < tasks_.size(); ++t)
            vehicle_tasks_[static_cast<std::size_t>(vehicle_idx_[tasks_[t].vehicle_id])]
                .push_back(static_cast<int>(t));

        const QualityParams qp = quality_params(cfg.quality);
        mean_mcs_ = sc.channel.mean_mcs.value_or(qp.mean_mcs);
        step_prob_ = sc.channel.step_prob.value_or(qp.step_prob);
        atten_ = sc.channel.distance_atten.value_or(qp.atten);
        const int init_mcs =
            sc.channel.initial_mcs.value_or(static_cast<int>(std::lround(mean_mcs_)));
        link_mcs_.assign(vehicles_.size() * rsus_.size(), init_mcs);
        link_rate_.assign(vehicles_.size() * rsus_.size(), 0.0);
        link_srs_time_.assign(vehicles_.size() * rsus_.size(),
                              -2.0 * cfg.schedule_interval_s);  // stale until first SRS

        registered_.assign(vehicles_.size(), 0);
        task_gen_.assign(tasks_.size(), 0);
        grants_.assign(tasks_.size(), GrantState{});
        grant_gen_.assign(tasks_.size(), 0);
        grant_pred_.assign(tasks_.size(), 0.0);
        grant_proc_.assign(tasks_.size(), 0.0);
        mk_history_.resize(tasks_.size());
        alloc_rbs_.assign(rsus_.size(), 0);
        alloc_cus_.assign(rsus_.size(), 0);

        num_cycles_ = static_cast<long>(std::floor(cfg.duration_s / cfg.schedule_interval_s +
                                                   1e-9));
        cycle_predicted_.assign(static_cast<std::size_t>(std::max(1L, num_cycles_)), 0.0);
        cycle_measured_.assign(cycle_predicted_.size(), 0.0);
        cycle_offloaded_.assign(cycle_predicted_.size(), 0);
        cycle_local_.assign(cycle_predicted_.size(), 0);
        cycle_suspensions_.assign(cycle_predicted_.size(), 0);
        cycle_latency_.assign(cycle_predicted_.size(), cfg.sched_latency_s);
    }

    SimResult run() {
        for (long c = 0; c < num_cycles_; ++c)
            push(c * cfg_.schedule_interval_s, kScheduleTick, static_cast<int>(c), 0);
        const long srs_ticks =
            static_cast<long>(std::floor(cfg_.duration_s / cfg_.srs_interval_s + 1e-9));
        for (long i = 0; i <= srs_ticks; ++i)
            push(i * cfg_.srs_interval_s, kSrsTick, 0, 0);

        while (!queue_.empty()) {
            const Ev ev = queue_.top();
            queue_.pop();
            if (ev.t > cfg_.duration_s + 1e-9) break;
            now_ = ev.t;
            switch (ev.prio) {
                case kServiceReady: on_service_ready(ev.a, ev.b); break;
                case kSrsTick: on_srs_tick(); break;
                case kScheduleTick: on_schedule_tick(ev.a); break;
                case kJobComplete: on_job_complete(ev.a); break;
                case kJobRelease: on_job_release(ev.a, ev.b); break;
                default: break;
            }
        }
        return finalize();
    }

private:
    void validate_config() const {
        if (cfg_.duration_s <= 0) throw std::invalid_argument("sim: duration_s must be positive");
        if (cfg_.schedule_interval_s <= 0)
            throw std::invalid_argument("sim: schedule_interval_s must be positive");
        if (cfg_.srs_interval_s <= 0)
            throw std::invalid_argument("sim: srs_interval_s must be positive");
        for (const auto& task : sc_.tasks)
            if (cfg_.srs_interval_s > task.period_s)
                throw std::invalid_argument(
                    "sim: srs_interval_s must not exceed the shortest task period");
        if (cfg_.coverage_radius_m <= 0)
            throw std::invalid_argument("sim: coverage_radius_m must be positive");
        if (cfg_.sched_latency_s < 0)
            throw std::invalid_argument("sim: sched_latency_s must be non-negative");
    }

    // --- infrastructure -----------------------------------------------------

    void push(double t, int prio, int a, long b) {
        if (t > cfg_.duration_s + 1e-9) return;
        queue_.push(Ev{t, prio, a, b, seq_++});
    }

    std::size_t link_index(int vehicle, int rsu) const {
        return static_cast<std::size_t>(vehicle) * rsus_.size() + static_cast<std::size_t>(rsu);
    }

    long bucket(double t) const {
        const long c = static_cast<long>((t + 1e-9) / cfg_.schedule_interval_s);
        return std::clamp(c, 0L, std::max(0L, num_cycles_ - 1));
    }

    void log(std::string line) { events_.push_back(std::move(line)); }

    double distance(int rsu, double x, double y) const {
        const RsuSpec& r = rsus_[static_cast<std::size_t>(rsu)];
        return std::hypot(x - r.x_m, y - r.y_m);
    }

    // resource conservation sentinel: allocations may never exceed capacity
    void check_conservation(int rsu) const {
        const std::size_t r = static_cast<std::size_t>(rsu);
        if (alloc_rbs_[r] > rsus_[r].total_rbs || alloc_cus_[r] > rsus_[r].total_cus ||
            alloc_rbs_[r] < 0 || alloc_cus_[r] < 0)
            throw std::logic_error("per-RSU resource accounting out of bounds");
    }

    // --- channel ------------------------------------------------------------

    void walk_mcs(std::size_t link) {
        if (sc_.channel.freeze) return;
        if (!(rng_.uniform() < step_prob_)) return;
        int& mcs = link_mcs_[link];
        int toward;
        if (static_cast<double>(mcs) < mean_mcs_) toward = 1;
        else if (static_cast<double>(mcs) > mean_mcs_) toward = -1;
        else toward = rng_.bernoulli(0.5) ? 1 : -1;
        const int dir = rng_.uniform() < 0.75 ? toward : -toward;
        mcs = std::clamp(mcs + dir, 0, kMaxMcs);
    }

    double effective_rate(std::size_t link, double dist) const {
        const int cap = distance_mcs_cap(dist, cfg_.coverage_radius_m, atten_);
        const int eff = std::min(link_mcs_[link], cap);
        return sc_.channel.peak_rate_mb_per_rb_s * mcs_rate_fraction(eff);
    }

    // --- grant state machine --------------------------------------------------

    // smallest RB count meeting the deadline under the current rate, or -1
    int required_rbs(int task, double rate) const {
        const TaskSpec& spec = tasks_[static_cast<std::size_t>(task)];
        const GrantState& grant = grants_[static_cast<std::size_t>(task)];
        const int cap = rsus_[static_cast<std::size_t>(grant.rsu)].total_rbs;
        const auto need = min_rbs_for(spec.input_mb, rate, grant_proc_[static_cast<std::size_t>(task)],
                                      spec.period_s, cap);
        return need ? *need : -1;
    }

    void suspend_grant(int task, const char* reason) {
        GrantState& grant = grants_[static_cast<std::size_t>(task)];
        if (grant.phase != GrantState::Phase::Active) return;
        grant.phase = GrantState::Phase::Suspended;
        ++suspensions_;
        ++cycle_suspensions_[static_cast<std::size_t>(bucket(now_))];
        log(fmt("t=%.6f suspend task=%s rsu=%s reason=%s", now_,
                tasks_[static_cast<std::size_t>(task)].id.c_str(),
                rsus_[static_cast<std::size_t>(grant.rsu)].id.c_str(), reason));
    }

    void terminate_grant(int task, const char* reason) {
        GrantState& grant = grants_[static_cast<std::size_t>(task)];
        if (grant.phase == GrantState::Phase::Terminated) return;
        alloc_rbs_[static_cast<std::size_t>(grant.rsu)] -= grant.granted_rbs;
        alloc_cus_[static_cast<std::size_t>(grant.rsu)] -= grant.cus;
        grant.phase = GrantState::Phase::Terminated;
        ++grant_gen_[static_cast<std::size_t>(task)];
        log(fmt("t=%.6f terminate task=%s rsu=%s reason=%s", now_,
                tasks_[static_cast<std::size_t>(task)].id.c_str(),
                rsus_[static_cast<std::size_t>(grant.rsu)].id.c_str(), reason));
    }

    // SRS feedback for one live grant: release surplus, or top up from the
    // unallocated pool, or suspend until the next SRS
    void adjust_grant(int task, double rate) {
        GrantState& grant = grants_[static_cast<std::size_t>(task)];
        if (grant.phase != GrantState::Phase::Active &&
            grant.phase != GrantState::Phase::Suspended)
            return;
        const std::size_t r = static_cast<std::size_t>(grant.rsu);
        const int needed = required_rbs(task, rate);

        if (needed >= 0 && needed <= grant.granted_rbs) {
            const int keep = std::max(grant.scheduled_rbs, needed);
            if (grant.granted_rbs > keep) {
                const int back = grant.granted_rbs - keep;
                grant.granted_rbs = keep;
                alloc_rbs_[r] -= back;
                log(fmt("t=%.6f release_rbs task=%s rsu=%s rbs=%d granted=%d", now_,
                        tasks_[static_cast<std::size_t>(task)].id.c_str(), rsus_[r].id.c_str(),
                        back, grant.granted_rbs));
            }
            if (grant.phase == GrantState::Phase::Suspended) {
                grant.phase = GrantState::Phase::Active;
                ++resumptions_;
                log(fmt("t=%.6f resume task=%s rsu=%s granted=%d", now_,
                        tasks_[static_cast<std::size_t>(task)].id.c_str(), rsus_[r].id.c_str(),
                        grant.granted_rbs));
            }
            return;
        }

        const int unallocated = rsus_[r].total_rbs - alloc_rbs_[r];
        if (needed > 0 && needed - grant.granted_rbs <= unallocated) {
            const int extra = needed - grant.granted_rbs;
            grant.granted_rbs = needed;
            alloc_rbs_[r] += extra;
            check_conservation(static_cast<int>(r));
            log(fmt("t=%.6f topup task=%s rsu=%s rbs=%d granted=%d", now_,
                    tasks_[static_cast<std::size_t>(task)].id.c_str(), rsus_[r].id.c_str(), extra,
                    grant.granted_rbs));
            if (grant.phase == GrantState::Phase::Suspended) {
                grant.phase = GrantState::Phase::Active;
                ++resumptions_;
                log(fmt("t=%.6f resume task=%s rsu=%s granted=%d", now_,
                        tasks_[static_cast<std::size_t>(task)].id.c_str(), rsus_[r].id.c_str(),
                        grant.granted_rbs));
            }
        } else {
            suspend_grant(task, "offloading_requirement");
        }
    }

    // --- event handlers -------------------------------------------------------

    void on_service_ready(int task, long gen) {
        GrantState& grant = grants_[static_cast<std::size_t>(task)];
        if (grant.phase != GrantState::Phase::AwaitingInit ||
            grant_gen_[static_cast<std::size_t>(task)] != gen)
            return;  // superseded grant
        const int vehicle = vehicle_idx_.at(tasks_[static_cast<std::size_t>(task)].vehicle_id);
        const double rate = link_rate_[link_index(vehicle, grant.rsu)];
        const int needed = required_rbs(task, rate);
        if (needed >= 0 && needed <= grant.granted_rbs) {
            grant.phase = GrantState::Phase::Active;
            log(fmt("t=%.6f service_active task=%s rsu=%s granted=%d", now_,
                    tasks_[static_cast<std::size_t>(task)].id.c_str(),
                    rsus_[static_cast<std::size_t>(grant.rsu)].id.c_str(), grant.granted_rbs));
        } else {
            // requirement not met at init: hold suspended until an SRS heals it
            grant.phase = GrantState::Phase::Active;
            suspend_grant(task, "init_requirement");
        }
    }

    void on_srs_tick() {
        while (script_cursor_ < sc_.channel.script.size() &&
               sc_.channel.script[script_cursor_].time_s <= now_ + 1e-9) {
            const int forced = sc_.channel.script[script_cursor_].mcs;
            for (auto& mcs : link_mcs_) mcs = forced;
            log(fmt("t=%.6f channel_script mcs=%d", now_, forced));
            ++script_cursor_;
        }

        for (int v = 0; v < static_cast<int>(vehicles_.size()); ++v) {
            const VehicleTrace* trace = vehicle_trace_[static_cast<std::size_t>(v)];
            const auto pos = trace ? trace_position(*trace, now_) : std::nullopt;
            const double px = pos ? pos->first : 0.0;
            const double py = pos ? pos->second : 0.0;
            bool in_any = false;
            if (pos) {
                for (int r = 0; r < static_cast<int>(rsus_.size()) && !in_any; ++r)
                    in_any = distance(r, px, py) <= cfg_.coverage_radius_m;
            }

            if (in_any && !registered_[static_cast<std::size_t>(v)]) {
                registered_[static_cast<std::size_t>(v)] = 1;
                log(fmt("t=%.6f register vehicle=%s", now_, vehicles_[static_cast<std::size_t>(v)].c_str()));
                for (int task : vehicle_tasks_[static_cast<std::size_t>(v)]) {
                    ++task_gen_[static_cast<std::size_t>(task)];
                    push(now_, kJobRelease, task, task_gen_[static_cast<std::size_t>(task)]);
                }
            } else if (!in_any && registered_[static_cast<std::size_t>(v)]) {
                registered_[static_cast<std::size_t>(v)] = 0;
                log(fmt("t=%.6f unregister vehicle=%s", now_,
                        vehicles_[static_cast<std::size_t>(v)].c_str()));
                for (int task : vehicle_tasks_[static_cast<std::size_t>(v)]) {
                    ++task_gen_[static_cast<std::size_t>(task)];
                    if (grants_[static_cast<std::size_t>(task)].phase !=
                        GrantState::Phase::Terminated)
                        terminate_grant(task, "left_coverage");
                }
            }
            if (!registered_[static_cast<std::size_t>(v)] || !pos) continue;

            for (int r = 0; r < static_cast<int>(rsus_.size()); ++r) {
                const double dist = distance(r, px, py);
                const std::size_t link = link_index(v, r);
                if (dist <= cfg_.coverage_radius_m) {
                    walk_mcs(link);
                    link_rate_[link] = effective_rate(link, dist);
                    link_srs_time_[link] = now_;
                    for (int task : vehicle_tasks_[static_cast<std::size_t>(v)])
                        if (grants_[static_cast<std::size_t>(task)].rsu == r)
                            adjust_grant(task, link_rate_[link]);
                } else {
                    // suspension is a channel-quality state; an unreachable
                    // RSU cannot even receive SRS, so its service is torn
                    // down and the task re-enters the request pool
                    for (int task : vehicle_tasks_[static_cast<std::size_t>(v)])
                        if (grants_[static_cast<std::size_t>(task)].rsu == r &&
                            grants_[static_cast<std::size_t>(task)].phase !=
                                GrantState::Phase::Terminated)
                            terminate_grant(task, "out_of_range");
                }
            }
        }
    }

    void on_schedule_tick(int cycle) {
        if (cfg_.mode == Mode::SchedAll)
            for (int task = 0; task < static_cast<int>(tasks_.size()); ++task)
                if (grants_[static_cast<std::size_t>(task)].phase != GrantState::Phase::Terminated)
                    terminate_grant(task, "sched_all_cycle");

        // pending requests and the fresh-link snapshot for this cycle
        std::vector<TaskSpec> req_tasks;
        for (int task = 0; task < static_cast<int>(tasks_.size()); ++task) {
            const int vehicle = vehicle_idx_.at(tasks_[static_cast<std::size_t>(task)].vehicle_id);
            if (!registered_[static_cast<std::size_t>(vehicle)]) continue;
            if (cfg_.mode == Mode::SchedRemain &&
                grants_[static_cast<std::size_t>(task)].phase != GrantState::Phase::Terminated)
                continue;
            req_tasks.push_back(tasks_[static_cast<std::size_t>(task)]);
        }

        std::vector<RsuSpec> req_rsus;
        for (int r = 0; r < static_cast<int>(rsus_.size()); ++r) {
            RsuSpec rsu = rsus_[static_cast<std::size_t>(r)];
            if (cfg_.mode == Mode::SchedRemain) {
                rsu.total_rbs -= alloc_rbs_[static_cast<std::size_t>(r)];
                rsu.total_cus -= alloc_cus_[static_cast<std::size_t>(r)];
            }
            if (rsu.total_rbs >= 1 && rsu.total_cus >= 1) req_rsus.push_back(rsu);
        }

        std::vector<LinkState> links;
        for (const auto& task : req_tasks) {
            const int vehicle = vehicle_idx_.at(task.vehicle_id);
            for (const auto& rsu : req_rsus) {
                const int r = rsu_idx_.at(rsu.id);
                const std::size_t link = link_index(vehicle, r);
                // an RSU without feedback during this cycle is inaccessible
                if (now_ - link_srs_time_[link] > cfg_.schedule_interval_s + 1e-9) continue;
                if (link_rate_[link] <= 0) continue;
                bool dup = false;
                for (const auto& l : links)
                    dup = dup || (l.vehicle_id == task.vehicle_id && l.rsu_id == rsu.id);
                if (!dup) links.push_back({task.vehicle_id, rsu.id, link_rate_[link], true});
            }
        }

        const ProblemInstance pi = ProblemInstance::make(req_tasks, req_rsus, sc_.profiles, links);
        const auto wall0 = std::chrono::steady_clock::now();
        const InstancePool pool = enumerate_instances(pi, cfg_.prune);
        const Assignment asg = run_algorithm(cfg_.algorithm, pool, pi);
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
        solver_wall_s_ += wall;
        const double charged = cfg_.charge_measured_runtime ? wall : cfg_.sched_latency_s;
        cycle_latency_[static_cast<std::size_t>(cycle)] = charged;
        if (!validate(asg, pi).empty())
            throw std::logic_error("scheduler produced an infeasible assignment");

        for (const auto& sel : asg.selections) {
            const int task = task_idx_.at(pi.tasks()[static_cast<std::size_t>(sel.task)].id);
            const int r = rsu_idx_.at(pi.rsus()[static_cast<std::size_t>(sel.rsu)].id);
            GrantState& grant = grants_[static_cast<std::size_t>(task)];
            grant.task = task;
            grant.rsu = r;
            grant.scheduled_rbs = grant.granted_rbs = sel.rbs;
            grant.cus = sel.cus;
            grant.phase = GrantState::Phase::AwaitingInit;
            grant.service_ready_at =
                now_ + charged + rsus_[static_cast<std::size_t>(r)].init_delay_s;
            grant_pred_[static_cast<std::size_t>(task)] = sel.utility;
            grant_proc_[static_cast<std::size_t>(task)] =
                *sc_.profiles.proc_time(tasks_[static_cast<std::size_t>(task)].service_type,
                                        rsus_[static_cast<std::size_t>(r)].hardware_class, sel.cus);
            alloc_rbs_[static_cast<std::size_t>(r)] += sel.rbs;
            alloc_cus_[static_cast<std::size_t>(r)] += sel.cus;
            check_conservation(r);
            ++grant_gen_[static_cast<std::size_t>(task)];
            push(grant.service_ready_at, kServiceReady, task,
                 grant_gen_[static_cast<std::size_t>(task)]);
            log(fmt("t=%.6f grant task=%s rsu=%s rbs=%d cus=%d ready_at=%.6f", now_,
                    tasks_[static_cast<std::size_t>(task)].id.c_str(),
                    rsus_[static_cast<std::size_t>(r)].id.c_str(), sel.rbs, sel.cus,
                    grant.service_ready_at));
        }

        double predicted = 0.0;
        for (int task = 0; task < static_cast<int>(tasks_.size()); ++task)
            if (grants_[static_cast<std::size_t>(task)].phase != GrantState::Phase::Terminated)
                predicted += grant_pred_[static_cast<std::size_t>(task)];
        cycle_predicted_[static_cast<std::size_t>(cycle)] = predicted;
        log(fmt("t=%.6f schedule cycle=%d requests=%zu assigned=%zu predicted_js=%.6f", now_,
                cycle, req_tasks.size(), asg.selections.size(), predicted));
    }

    void on_job_release(int task, long gen) {
        if (task_gen_[static_cast<std::size_t>(task)] != gen) return;  // vehicle left
        const TaskSpec& spec = tasks_[static_cast<std::size_t>(task)];
        if (now_ + spec.period_s < cfg_.duration_s - 1e-9)
            push(now_ + spec.period_s, kJobRelease, task, gen);

        const GrantState& grant = grants_[static_cast<std::size_t>(task)];
        const bool active = grant.phase == GrantState::Phase::Active;
        const long cyc = bucket(now_);

        bool offload = false;
        if (spec.criticality == Criticality::SafetyCritical) {
            // local fallback always runs; the offload copy rides alongside
            ++local_jobs_;
            ++cycle_local_[static_cast<std::size_t>(cyc)];
            offload = active;
        } else {
            offload = active && mk_window_allows(task);
            if (!offload) {
                ++local_jobs_;
                ++cycle_local_[static_cast<std::size_t>(cyc)];
                record_local_mk_job(task);
            }
        }
        if (!offload) return;

        const int vehicle = vehicle_idx_.at(spec.vehicle_id);
        const double rate = link_rate_[link_index(vehicle, grant.rsu)];
        Job job;
        job.task = task;
        job.release = now_;
        job.offloaded = true;
        job.d_o = offload_time(spec.input_mb, grant.granted_rbs, rate);
        const double proc = grant_proc_[static_cast<std::size_t>(task)];
        job.met = job.d_o + proc <= spec.period_s;
        job.savings = spec.local_power_w * spec.local_exec_s - spec.offload_power_w * job.d_o;
        job.complete = now_ + job.d_o + proc;
        ++offloaded_jobs_;
        ++cycle_offloaded_[static_cast<std::size_t>(cyc)];
        jobs_.push_back(job);
        push(job.complete, kJobComplete, static_cast<int>(jobs_.size()) - 1, 0);
    }

    void on_job_complete(int job_idx) {
        const Job& job = jobs_[static_cast<std::size_t>(job_idx)];
        if (job.offloaded) {
            if (job.met) {
                total_savings_ += job.savings;
                cycle_measured_[static_cast<std::size_t>(bucket(job.complete))] += job.savings;
            } else {
                ++deadline_misses_;
                log(fmt("t=%.6f deadline_miss task=%s", now_,
                        tasks_[static_cast<std::size_t>(job.task)].id.c_str()));
            }
        }
        if (tasks_[static_cast<std::size_t>(job.task)].criticality == Criticality::MkConstrained)
            push_mk_outcome(job.task, job.met);
    }

    // --- m-out-of-k window ----------------------------------------------------

    bool mk_window_allows(int task) const {
        const TaskSpec& spec = tasks_[static_cast<std::size_t>(task)];
        const auto& hist = mk_history_[static_cast<std::size_t>(task)];
        int met = 0;
        for (char h : hist) met += h;
        return met >= spec.mk_m;  // a miss now cannot break the window
    }

    void record_local_mk_job(int task) {
        // locals finish at release + local_exec_s <= deadline by invariant;
        // completion is what updates the window
        Job job;
        job.task = task;
        job.release = now_;
        job.offloaded = false;
        job.met = true;
        job.complete = now_ + tasks_[static_cast<std::size_t>(task)].local_exec_s;
        jobs_.push_back(job);
        push(job.complete, kJobComplete, static_cast<int>(jobs_.size()) - 1, 0);
    }

    void push_mk_outcome(int task, bool met) {
        const TaskSpec& spec = tasks_[static_cast<std::size_t>(task)];
        auto& hist = mk_history_[static_cast<std::size_t>(task)];
        hist.push_back(met ? 1 : 0);
        while (static_cast<int>(hist.size()) > spec.mk_k - 1) hist.pop_front();
    }

    // --- wrap-up ---------------------------------------------------------------

    SimResult finalize() {
        SimResult out;
        Metrics& m = out.metrics;
        m.offloaded_jobs = offloaded_jobs_;
        m.local_jobs = local_jobs_;
        m.suspensions = suspensions_;
        m.resumptions = resumptions_;
        m.deadline_misses = deadline_misses_;
        m.cycles_run = num_cycles_;
        m.measured_js = total_savings_ / cfg_.duration_s;
        m.offloaded_jobs_per_s = static_cast<double>(offloaded_jobs_) / cfg_.duration_s;
        double predicted_sum = 0.0;
        for (long c = 0; c < num_cycles_; ++c) {
            CycleStats cs;
            cs.t_start = c * cfg_.schedule_interval_s;
            cs.predicted_js = cycle_predicted_[static_cast<std::size_t>(c)];
            cs.measured_js =
                cycle_measured_[static_cast<std::size_t>(c)] / cfg_.schedule_interval_s;
            cs.offloaded_jobs = cycle_offloaded_[static_cast<std::size_t>(c)];
            cs.local_jobs = cycle_local_[static_cast<std::size_t>(c)];
            cs.suspensions = cycle_suspensions_[static_cast<std::size_t>(c)];
            cs.sched_latency_s = cycle_latency_[static_cast<std::size_t>(c)];
            predicted_sum += cs.predicted_js;
            m.cycles.push_back(cs);
        }
        if (num_cycles_ > 0) m.predicted_js = predicted_sum / static_cast<double>(num_cycles_);
        out.events = std::move(events_);
        out.solver_wall_s = solver_wall_s_;
        return out;
    }

    const Scenario& sc_;
    SimConfig cfg_;
    Rng rng_;

    std::vector<TaskSpec> tasks_;
    std::vector<RsuSpec> rsus_;
    std::map<std::string, int> task_idx_, rsu_idx_, vehicle_idx_;
    std::vector<std::string> vehicles_;
    std::vector<const VehicleTrace*> vehicle_trace_;
    std::vector<std::vector<int>> vehicle_tasks_;

    double mean_mcs_ = 9.0, step_prob_ = 0.15, atten_ = 0.2;
    std::vector<int> link_mcs_;
    std::vector<double> link_rate_;
    std::vector<double> link_srs_time_;
    std::size_t script_cursor_ = 0;

    std::vector<char> registered_;
    std::vector<long> task_gen_;
    std::vector<GrantState> grants_;
    std::vector<long> grant_gen_;
    std::vector<double> grant_pred_;
    std::vector<double> grant_proc_;
    std::vector<std::deque<char>> mk_history_;
    std::vector<int> alloc_rbs_, alloc_cus_;

    std::priority_queue<Ev, std::vector<Ev>, std::greater<Ev>> queue_;
    long seq_ = 0;
    double now_ = 0.0;

    std::vector<Job> jobs_;
    long num_cycles_ = 0;
    std::vector<double> cycle_predicted_, cycle_measured_;
    std::vector<long> cycle_offloaded_, cycle_local_, cycle_suspensions_;
    std::vector<double> cycle_latency_;
    long offloaded_jobs_ = 0, local_jobs_ = 0, suspensions_ = 0, resumptions_ = 0,
         deadline_misses_ = 0;
    double total_savings_ = 0.0;
    double solver_wall_s_ = 0.0;
    std::vector<std::string> events_;
};

}  // namespace

SimResult run_simulation(const Scenario& scenario, const SimConfig& config) {
    return Simulation(scenario, config).run();
}

ProblemInstance initial_snapshot(const Scenario& scenario, const SimConfig& config) {
    const QualityParams qp = quality_params(config.quality);
    const double mean = scenario.channel.mean_mcs.value_or(qp.mean_mcs);
    const double atten = scenario.channel.distance_atten.value_or(qp.atten);
    const int init_mcs =
        scenario.channel.initial_mcs.value_or(static_cast<int>(std::lround(mean)));

    std::vector<LinkState> links;
    for (const auto& trace : scenario.traces) {
        const auto pos = trace_position(trace, 0.0);
        if (!pos) continue;
        bool has_task = false;
        for (const auto& task : scenario.tasks)
            has_task = has_task || task.vehicle_id == trace.vehicle_id;
        if (!has_task) continue;
        for (const auto& rsu : scenario.rsus) {
            const double dist = std::hypot(pos->first - rsu.x_m, pos->second - rsu.y_m);
            if (dist > config.coverage_radius_m) continue;
            const int eff =
                std::min(init_mcs, distance_mcs_cap(dist, config.coverage_radius_m, atten));
            links.push_back({trace.vehicle_id, rsu.id,
                             scenario.channel.peak_rate_mb_per_rb_s * mcs_rate_fraction(eff),
                             true});
        }
    }
    return ProblemInstance::make(scenario.tasks, scenario.rsus, scenario.profiles, links);
}

}  // namespace vecsched
