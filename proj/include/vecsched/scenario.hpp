//
// vecsched -- scenario/config ingestion, trace and result files, and the
// synthetic scenario generator. One canonical JSON scenario format with
// units spelled out in the field names; traces are row-oriented text.
//
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vecsched/model.hpp"
#include "vecsched/sim.hpp"

namespace vecsched {

inline constexpr const char* kCodeVersion = "0.1.0";
inline constexpr int kFormatMajor = 1;
inline constexpr int kFormatMinor = 0;

class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
/// Unreadable or syntactically malformed input.
class ParseError : public ScenarioError {
public:
    using ScenarioError::ScenarioError;
};
/// Well-formed input with missing/ill-typed fields or invariant breaches.
class SchemaError : public ScenarioError {
public:
    using ScenarioError::ScenarioError;
};
/// References that do not resolve (unknown service type, vehicle, ...).
class CrossRefError : public ScenarioError {
public:
    using ScenarioError::ScenarioError;
};

struct Waypoint {
    double time_s = 0.0;
    double x_m = 0.0;
    double y_m = 0.0;
};

struct VehicleTrace {
    std::string vehicle_id;
    std::vector<Waypoint> points;  // strictly increasing time_s
};

/// Piecewise-linear position at time t; nullopt outside the trace span.
std::optional<std::pair<double, double>> trace_position(const VehicleTrace& trace, double t);

struct Scenario {
    std::vector<TaskSpec> tasks;
    std::vector<RsuSpec> rsus;
    ExecutionProfile profiles;
    std::vector<VehicleTrace> traces;
    ChannelConfig channel;
    SimConfig sim;  // per-scenario defaults, overridable at the CLI
};

/// Loads and fully validates a scenario file. Throws ParseError,
/// SchemaError, or CrossRefError with the offending location.
Scenario load_scenario(const std::string& path);
Scenario scenario_from_json(const std::string& text, const std::string& base_dir = "");
void save_scenario(const Scenario& scenario, const std::string& path);
std::string scenario_to_json(const Scenario& scenario);

/// Trace files: header `time_s,vehicle_id,x_m,y_m`, rows sorted by
/// (vehicle_id, time_s) with strictly increasing time per vehicle.
std::vector<VehicleTrace> load_trace_file(const std::string& path);
void write_trace_file(const std::vector<VehicleTrace>& traces, const std::string& path);

/// Synthetic scenario knobs; defaults produce the shipped example layout
/// (15 RSUs with 270 RBs / 16 CUs, 80 one-task vehicles on grid roads,
/// periods from {50, 67, 100} ms, inputs 0.07..0.3 MB, init delays
/// 10..50 ms).
struct GenDescriptor {
    int num_tasks = 80;
    int num_rsus = 15;
    int num_vehicles = 0;  // 0: one vehicle per task
    int rbs_per_rsu = 270;
    int cus_per_rsu = 16;
    double area_m = 1000.0;
    double duration_s = 60.0;
    double coverage_radius_m = 500.0;
    double vehicle_speed_mps = 16.7;
    double input_mb_min = 0.07;
    double input_mb_max = 0.3;
    double init_delay_min_s = 0.01;
    double init_delay_max_s = 0.05;
    double mk_fraction = 0.3;  // share of tasks with an m-out-of-k window
    int num_service_types = 6;
    int num_hardware_classes = 6;
    std::uint64_t seed = 1;
};

/// Deterministic: the same descriptor yields a byte-identical scenario.
/// Throws SchemaError on invalid ranges.
Scenario gen_scenario(const GenDescriptor& descriptor);

/// Enough to reproduce a run bit-exactly: the scenario (named and hashed),
/// the effective knobs, and the seed.
struct RunManifest {
    std::uint64_t seed = 0;
    std::string config_hash;
    std::string code_version = kCodeVersion;
    std::string algorithm;
    std::string mode;
    std::string quality;
    std::string scenario;  // path as given on the command line
};

struct RunResult {
    RunManifest manifest;
    Metrics metrics;
};

/// 64-bit FNV-1a over the canonical scenario + config serialization.
std::string config_hash(const Scenario& scenario, const SimConfig& config);
std::string manifest_json(const RunManifest& manifest);

void write_results(const RunResult& result, const std::string& path);
RunResult read_results(const std::string& path);
void write_event_log(const std::vector<std::string>& events, const std::string& path);

}  // namespace vecsched
