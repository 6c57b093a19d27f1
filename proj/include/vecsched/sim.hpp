//
// vecsched -- deterministic discrete-event simulator of the online service
// subscription and offloading control loop: mobility over waypoint traces,
// an MCS-driven per-link channel, periodic scheduling, RSU grant state
// machines with SRS-triggered top-up/suspend/resume, and job accounting.
//
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vecsched/model.hpp"
#include "vecsched/solve.hpp"

namespace vecsched {

struct Scenario;  // scenario.hpp

enum class Mode { SchedAll, SchedRemain };
enum class Quality { Low, Medium, High };

std::optional<Mode> parse_mode(const std::string& name);
std::string mode_name(Mode mode);
std::optional<Quality> parse_quality(const std::string& name);
std::string quality_name(Quality quality);

/// Scripted channel override: force every link's MCS to `mcs` at the first
/// SRS tick at or after `time_s`.
struct McsStep {
    double time_s = 0.0;
    int mcs = 0;
};

/// Channel knobs carried by the scenario. Per-quality defaults apply where
/// no override is given; freeze disables the random walk entirely.
struct ChannelConfig {
    std::optional<int> initial_mcs;
    std::optional<double> mean_mcs;
    std::optional<double> step_prob;
    std::optional<double> distance_atten;
    bool freeze = false;
    double peak_rate_mb_per_rb_s = 37.0 / 270.0;  // MCS 14 rate per RB
    std::vector<McsStep> script;
};

inline constexpr int kMaxMcs = 14;

/// Fraction of the peak per-RB rate delivered at an MCS index; strictly
/// increasing, 1.0 at kMaxMcs.
double mcs_rate_fraction(int mcs);

/// Highest MCS index reachable at a given distance from the RSU.
int distance_mcs_cap(double distance_m, double radius_m, double atten);

struct QualityParams {
    double mean_mcs;
    double step_prob;
    double atten;
};
QualityParams quality_params(Quality quality);

struct SimConfig {
    double duration_s = 60.0;
    double schedule_interval_s = 10.0;
    double srs_interval_s = 0.01;
    Mode mode = Mode::SchedAll;
    Quality quality = Quality::Medium;
    std::uint64_t rng_seed = 1;
    Algorithm algorithm = Algorithm::SARound;
    double coverage_radius_m = 500.0;
    double sched_latency_s = 0.0;  // charged before grants reach the RSUs
    // charge the measured solver wall time instead of the fixed value;
    // results are then no longer run-to-run reproducible
    bool charge_measured_runtime = false;
    bool prune = true;  // dominance-prune the instance pool
};

/// Offload-grant lifecycle per (task, RSU). granted_rbs never drops below
/// scheduled_rbs while the grant lives; top-ups above it are returned once
/// the channel allows.
struct GrantState {
    enum class Phase { AwaitingInit, Active, Suspended, Terminated };
    int task = -1;
    int rsu = -1;
    int scheduled_rbs = 0;
    int granted_rbs = 0;
    int cus = 0;
    Phase phase = Phase::Terminated;
    double service_ready_at = 0.0;
};

struct CycleStats {
    double t_start = 0.0;
    double predicted_js = 0.0;  // sum of live grants' scheduled utility
    double measured_js = 0.0;   // energy actually saved by completed offloads
    long offloaded_jobs = 0;
    long local_jobs = 0;
    long suspensions = 0;
    double sched_latency_s = 0.0;  // latency charged to this cycle's grants
};

struct Metrics {
    double predicted_js = 0.0;
    double measured_js = 0.0;
    double offloaded_jobs_per_s = 0.0;
    long offloaded_jobs = 0;
    long local_jobs = 0;
    long suspensions = 0;
    long resumptions = 0;
    long deadline_misses = 0;  // offloaded completions past the deadline
    long cycles_run = 0;
    std::vector<CycleStats> cycles;
};

struct SimResult {
    Metrics metrics;
    std::vector<std::string> events;
    double solver_wall_s = 0.0;  // measured scheduling time, not serialized
};

/// Runs the scenario to completion. Deterministic for a fixed
/// (scenario, config): the event queue is totally ordered by
/// (time, event-type priority, entity, insertion order). Configuration
/// problems throw std::invalid_argument before the run starts.
SimResult run_simulation(const Scenario& scenario, const SimConfig& config);

/// The scheduling snapshot at t = 0 (positions, initial channel state),
/// as the solve command sees it.
ProblemInstance initial_snapshot(const Scenario& scenario, const SimConfig& config);

}  // namespace vecsched
