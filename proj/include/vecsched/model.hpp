//
// vecsched -- domain model for deadline-constrained task offloading in
// vehicular edge computing: tasks, roadside units (RSUs), execution
// profiles, link snapshots, and feasibility/utility primitives shared by
// the solvers and the simulator.
//
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace vecsched {

enum class Criticality { SafetyCritical, MkConstrained };

/// A periodic real-time task submitted by a vehicle. The period doubles as
/// the implicit relative deadline of every job instance.
struct TaskSpec {
    std::string id;
    double period_s = 0.0;        // job release period, also the deadline
    double input_mb = 0.0;        // input data size per job
    double local_exec_s = 0.0;    // on-vehicle processing time (<= period_s)
    double local_power_w = 0.0;   // power draw while processing locally
    double offload_power_w = 0.0; // power draw while transmitting
    std::string service_type;
    std::string vehicle_id;
    Criticality criticality = Criticality::SafetyCritical;
    int mk_m = 0;                 // at least m of any k consecutive jobs
    int mk_k = 0;                 // must meet deadlines (MkConstrained only)
};

/// A roadside unit: a 5G radio with `total_rbs` resource blocks and a
/// compute server partitioned into `total_cus` computing units.
struct RsuSpec {
    std::string id;
    int total_rbs = 0;
    int total_cus = 0;
    std::string hardware_class;   // key into the execution profile table
    double init_delay_s = 0.0;    // service initialization time
    double x_m = 0.0;
    double y_m = 0.0;
};

/// Measured remote processing times: (service_type, hardware_class, cus)
/// -> seconds. Sparse tables are allowed; a missing entry means that
/// allocation is infeasible rather than an error.
class ExecutionProfile {
public:
    void set(const std::string& service_type, const std::string& hardware_class,
             int cus, double proc_time_s);
    std::optional<double> proc_time(const std::string& service_type,
                                    const std::string& hardware_class, int cus) const;
    bool has_service(const std::string& service_type) const;
    std::size_t size() const { return entries_.size(); }

    /// proc_time must be positive and non-increasing in cus for every
    /// (service, hardware) pair; returns a description of the first
    /// violation, if any.
    std::optional<std::string> check_invariants() const;

    const std::map<std::tuple<std::string, std::string, int>, double>& entries() const {
        return entries_;
    }

private:
    std::map<std::tuple<std::string, std::string, int>, double> entries_;
};

/// Channel snapshot for one (vehicle, RSU) pair: the data rate one
/// resource block sustains, as estimated from the latest SRS feedback.
struct LinkState {
    std::string vehicle_id;
    std::string rsu_id;
    double rate_mb_per_rb_s = 0.0;
    bool accessible = false;
};

/// One selected service deployment: task -> (RSU, RBs, CUs). Indices refer
/// to the owning ProblemInstance's sorted task/rsu vectors.
struct Selection {
    int task = -1;
    int rsu = -1;
    int rbs = 0;
    int cus = 0;
    double utility = 0.0;
};

/// A (possibly invalid) solution candidate; validate() checks it against
/// the capacity, multiple-choice, access, and deadline constraints.
struct Assignment {
    std::vector<Selection> selections;
    std::vector<int> used_rbs;  // per RSU index
    std::vector<int> used_cus;  // per RSU index
    double total_utility = 0.0;
};

struct Violation {
    enum class Kind {
        RbCapacity,
        CuCapacity,
        MultipleChoice,
        Access,
        Deadline,
        UtilityMismatch,
        UsageMismatch,
        BadReference,
    };
    Kind kind;
    std::string subject;  // offending task or RSU id
    std::string detail;
};

std::string to_string(Violation::Kind kind);

/// Pluggable per-instance utility. Must be >= 0 and must return 0 whenever
/// the deployment is infeasible.
using UtilityFn = std::function<double(const TaskSpec&, const RsuSpec&, int rbs, int cus,
                                       const LinkState&, const ExecutionProfile&)>;

/// One scheduling problem: the snapshot a solver works on. Tasks and RSUs
/// are canonicalized to ascending-id order on construction; capacities may
/// already be residual when scheduling on partially used RSUs.
class ProblemInstance {
public:
    ProblemInstance() = default;

    /// Sorts by id, checks invariants (positive periods, unique ids,
    /// resolvable link references, ...). Throws std::invalid_argument.
    static ProblemInstance make(std::vector<TaskSpec> tasks, std::vector<RsuSpec> rsus,
                                ExecutionProfile profiles, std::vector<LinkState> links);

    const std::vector<TaskSpec>& tasks() const { return tasks_; }
    const std::vector<RsuSpec>& rsus() const { return rsus_; }
    const ExecutionProfile& profiles() const { return profiles_; }

    int task_index(const std::string& id) const;  // -1 if unknown
    int rsu_index(const std::string& id) const;

    /// Accessible-link lookup; nullptr when the RSU is not accessible to
    /// the task's vehicle in this snapshot.
    const LinkState* link(int task, int rsu) const;

private:
    std::vector<TaskSpec> tasks_;
    std::vector<RsuSpec> rsus_;
    ExecutionProfile profiles_;
    std::vector<LinkState> links_;
    std::vector<int> link_grid_;  // tasks x rsus -> index into links_, -1 absent
};

/// Time to push `input_mb` through `rbs` resource blocks at `rate` MB/s
/// per block. Throws std::domain_error for rbs == 0 or rate <= 0.
double offload_time(double input_mb, int rbs, double rate_mb_per_rb_s);

/// Whether offloading + remote processing fits within the task period.
/// A missing profile entry makes the allocation infeasible, not an error.
bool deadline_feasible(const TaskSpec& task, const RsuSpec& rsu, int rbs, int cus,
                       const LinkState& link, const ExecutionProfile& profiles);

/// Smallest RB count meeting the deadline for a fixed processing time, or
/// nullopt when no RB count can. Agrees exactly with the predicate
/// offload_time(input, b, rate) + proc_s <= period_s.
std::optional<int> min_rbs_for(double input_mb, double rate_mb_per_rb_s, double proc_s,
                               double period_s, int max_rbs);

/// Default utility: energy saved per second by offloading instead of
/// running locally, clamped at zero. Returns 0 for infeasible or
/// inaccessible deployments.
double energy_utility(const TaskSpec& task, const RsuSpec& rsu, int rbs, int cus,
                      const LinkState& link, const ExecutionProfile& profiles);

/// Checks an Assignment against the problem constraints; empty means valid.
std::vector<Violation> validate(const Assignment& assignment, const ProblemInstance& instance);

}  // namespace vecsched
