#include "vecsched/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vecsched/rng.hpp"

namespace vecsched {

using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write " + path);
    out << text;
}

const json& require(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(where + ": missing field '" + key + "'");
    return *it;
}

double require_num(const json& obj, const char* key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_number()) throw SchemaError(where + ": field '" + key + "' must be a number");
    return v.get<double>();
}

int require_int(const json& obj, const char* key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_number_integer())
        throw SchemaError(where + ": field '" + key + "' must be an integer");
    return v.get<int>();
}

std::string require_str(const json& obj, const char* key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_string()) throw SchemaError(where + ": field '" + key + "' must be a string");
    return v.get<std::string>();
}

double opt_num(const json& obj, const char* key, double fallback) {
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_number()) throw SchemaError(std::string("field '") + key + "' must be a number");
    return it->get<double>();
}

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

json sim_config_to_json(const SimConfig& cfg) {
    return json{{"duration_s", cfg.duration_s},
                {"schedule_interval_s", cfg.schedule_interval_s},
                {"srs_interval_s", cfg.srs_interval_s},
                {"mode", mode_name(cfg.mode)},
                {"quality", quality_name(cfg.quality)},
                {"rng_seed", cfg.rng_seed},
                {"algorithm", algorithm_name(cfg.algorithm)},
                {"coverage_radius_m", cfg.coverage_radius_m},
                {"sched_latency_s", cfg.sched_latency_s},
                {"charge_measured_runtime", cfg.charge_measured_runtime},
                {"prune", cfg.prune}};
}

SimConfig sim_config_from_json(const json& obj) {
    SimConfig cfg;
    cfg.duration_s = opt_num(obj, "duration_s", cfg.duration_s);
    cfg.schedule_interval_s = opt_num(obj, "schedule_interval_s", cfg.schedule_interval_s);
    cfg.srs_interval_s = opt_num(obj, "srs_interval_s", cfg.srs_interval_s);
    cfg.coverage_radius_m = opt_num(obj, "coverage_radius_m", cfg.coverage_radius_m);
    cfg.sched_latency_s = opt_num(obj, "sched_latency_s", cfg.sched_latency_s);
    if (obj.contains("rng_seed")) cfg.rng_seed = obj.at("rng_seed").get<std::uint64_t>();
    if (obj.contains("prune")) cfg.prune = obj.at("prune").get<bool>();
    if (obj.contains("charge_measured_runtime"))
        cfg.charge_measured_runtime = obj.at("charge_measured_runtime").get<bool>();
    if (obj.contains("mode")) {
        auto m = parse_mode(obj.at("mode").get<std::string>());
        if (!m) throw SchemaError("sim: unknown mode '" + obj.at("mode").get<std::string>() + "'");
        cfg.mode = *m;
    }
    if (obj.contains("quality")) {
        auto q = parse_quality(obj.at("quality").get<std::string>());
        if (!q)
            throw SchemaError("sim: unknown quality '" + obj.at("quality").get<std::string>() + "'");
        cfg.quality = *q;
    }
    if (obj.contains("algorithm")) {
        auto a = parse_algorithm(obj.at("algorithm").get<std::string>());
        if (!a)
            throw SchemaError("sim: unknown algorithm '" +
                              obj.at("algorithm").get<std::string>() + "'");
        cfg.algorithm = *a;
    }
    return cfg;
}

void check_format_version(const json& root, const std::string& where) {
    const std::string version = require_str(root, "format_version", where);
    const auto dot = version.find('.');
    int major = -1;
    auto [p, ec] = std::from_chars(version.data(), version.data() + (dot == std::string::npos
                                                                         ? version.size()
                                                                         : dot),
                                   major);
    if (ec != std::errc() || major != kFormatMajor)
        throw SchemaError(where + ": unsupported format_version '" + version + "'");
    (void)p;
}

}  // namespace

std::optional<std::pair<double, double>> trace_position(const VehicleTrace& trace, double t) {
    const auto& pts = trace.points;
    if (pts.empty() || t < pts.front().time_s || t > pts.back().time_s) return std::nullopt;
    // first waypoint with time >= t; cannot be end() given the span check
    auto it = std::lower_bound(pts.begin(), pts.end(), t,
                               [](const Waypoint& w, double v) { return w.time_s < v; });
    if (it == pts.begin()) return std::make_pair(it->x_m, it->y_m);
    const Waypoint& hi = *it;
    const Waypoint& lo = *(it - 1);
    const double f = (t - lo.time_s) / (hi.time_s - lo.time_s);
    return std::make_pair(lo.x_m + f * (hi.x_m - lo.x_m), lo.y_m + f * (hi.y_m - lo.y_m));
}

// ---------------------------------------------------------------------------
// trace files

std::vector<VehicleTrace> load_trace_file(const std::string& path) {
    const std::string text = read_file(path);
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": empty trace file");
    // tolerate a \r\n header
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    if (line != "time_s,vehicle_id,x_m,y_m")
        throw ParseError(path + ": expected header 'time_s,vehicle_id,x_m,y_m'");

    std::vector<VehicleTrace> traces;
    std::string prev_vehicle;
    double prev_time = 0.0;
    long row = 1;
    while (std::getline(in, line)) {
        ++row;
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
        if (line.empty()) continue;
        std::array<std::string, 4> fields;
        std::size_t start = 0;
        for (int f = 0; f < 4; ++f) {
            const std::size_t comma = line.find(',', start);
            if (f < 3 && comma == std::string::npos)
                throw ParseError(path + ": row " + std::to_string(row) + ": expected 4 columns");
            fields[static_cast<std::size_t>(f)] =
                line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
            start = comma + 1;
        }
        auto parse_d = [&](const std::string& s, const char* what) {
            double v = 0.0;
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v))
                throw ParseError(path + ": row " + std::to_string(row) + ": bad " + what + " '" +
                                 s + "'");
            return v;
        };
        Waypoint w;
        w.time_s = parse_d(fields[0], "time_s");
        w.x_m = parse_d(fields[2], "x_m");
        w.y_m = parse_d(fields[3], "y_m");
        const std::string& vehicle = fields[1];
        if (vehicle.empty())
            throw ParseError(path + ": row " + std::to_string(row) + ": empty vehicle_id");

        if (vehicle != prev_vehicle) {
            if (!prev_vehicle.empty() && vehicle < prev_vehicle)
                throw ParseError(path + ": row " + std::to_string(row) +
                                 ": rows not sorted by (vehicle_id, time_s)");
            for (const auto& tr : traces)
                if (tr.vehicle_id == vehicle)
                    throw ParseError(path + ": row " + std::to_string(row) +
                                     ": rows not sorted by (vehicle_id, time_s)");
            traces.push_back({vehicle, {}});
            prev_vehicle = vehicle;
        } else if (w.time_s <= prev_time) {
            throw ParseError(path + ": row " + std::to_string(row) +
                             ": time_s not strictly increasing for vehicle " + vehicle);
        }
        prev_time = w.time_s;
        traces.back().points.push_back(w);
    }
    return traces;
}

void write_trace_file(const std::vector<VehicleTrace>& traces, const std::string& path) {
    std::vector<const VehicleTrace*> order;
    for (const auto& tr : traces) order.push_back(&tr);
    std::sort(order.begin(), order.end(),
              [](const VehicleTrace* a, const VehicleTrace* b) { return a->vehicle_id < b->vehicle_id; });
    std::ostringstream out;
    out << "time_s,vehicle_id,x_m,y_m\n";
    for (const VehicleTrace* tr : order)
        for (const auto& w : tr->points)
            out << format_double(w.time_s) << ',' << tr->vehicle_id << ',' << format_double(w.x_m)
                << ',' << format_double(w.y_m) << '\n';
    write_file(path, out.str());
}

// ---------------------------------------------------------------------------
// scenario json

namespace {

json traces_to_json(const std::vector<VehicleTrace>& traces) {
    json arr = json::array();
    for (const auto& tr : traces) {
        json points = json::array();
        for (const auto& w : tr.points)
            points.push_back(json{{"time_s", w.time_s}, {"x_m", w.x_m}, {"y_m", w.y_m}});
        arr.push_back(json{{"vehicle_id", tr.vehicle_id}, {"waypoints", points}});
    }
    return json{{"inline", arr}};
}

std::vector<VehicleTrace> traces_from_json(const json& obj, const std::string& base_dir) {
    if (obj.contains("path")) {
        std::string p = obj.at("path").get<std::string>();
        if (!base_dir.empty() && !p.empty() && p.front() != '/') p = base_dir + "/" + p;
        return load_trace_file(p);
    }
    const json& arr = require(obj, "inline", "traces");
    if (!arr.is_array()) throw SchemaError("traces.inline must be an array");
    std::vector<VehicleTrace> traces;
    for (const auto& tr : arr) {
        VehicleTrace out;
        out.vehicle_id = require_str(tr, "vehicle_id", "traces.inline");
        const json& points = require(tr, "waypoints", "trace " + out.vehicle_id);
        for (const auto& p : points) {
            Waypoint w;
            w.time_s = require_num(p, "time_s", "trace " + out.vehicle_id);
            w.x_m = require_num(p, "x_m", "trace " + out.vehicle_id);
            w.y_m = require_num(p, "y_m", "trace " + out.vehicle_id);
            if (!std::isfinite(w.x_m) || !std::isfinite(w.y_m) || !std::isfinite(w.time_s))
                throw SchemaError("trace " + out.vehicle_id + ": non-finite waypoint");
            if (!out.points.empty() && w.time_s <= out.points.back().time_s)
                throw SchemaError("trace " + out.vehicle_id + ": time_s must strictly increase");
            out.points.push_back(w);
        }
        traces.push_back(std::move(out));
    }
    return traces;
}

}  // namespace

std::string scenario_to_json(const Scenario& sc) {
    json root;
    root["format_version"] =
        std::to_string(kFormatMajor) + "." + std::to_string(kFormatMinor);

    json rsus = json::array();
    for (const auto& r : sc.rsus)
        rsus.push_back(json{{"id", r.id},
                            {"total_rbs", r.total_rbs},
                            {"total_cus", r.total_cus},
                            {"hardware_class", r.hardware_class},
                            {"init_delay_s", r.init_delay_s},
                            {"x_m", r.x_m},
                            {"y_m", r.y_m}});
    root["rsus"] = std::move(rsus);

    json tasks = json::array();
    for (const auto& t : sc.tasks) {
        json task{{"id", t.id},
                  {"period_s", t.period_s},
                  {"input_mb", t.input_mb},
                  {"local_exec_s", t.local_exec_s},
                  {"local_power_w", t.local_power_w},
                  {"offload_power_w", t.offload_power_w},
                  {"service_type", t.service_type},
                  {"vehicle_id", t.vehicle_id},
                  {"criticality", t.criticality == Criticality::SafetyCritical
                                      ? "safety_critical"
                                      : "mk_constrained"}};
        if (t.criticality == Criticality::MkConstrained) {
            task["mk_m"] = t.mk_m;
            task["mk_k"] = t.mk_k;
        }
        tasks.push_back(std::move(task));
    }
    root["tasks"] = std::move(tasks);

    json profiles = json::array();
    for (const auto& [key, time] : sc.profiles.entries())
        profiles.push_back(json{{"service_type", std::get<0>(key)},
                                {"hardware_class", std::get<1>(key)},
                                {"cus", std::get<2>(key)},
                                {"proc_time_s", time}});
    root["profiles"] = std::move(profiles);

    root["traces"] = traces_to_json(sc.traces);

    json channel;
    if (sc.channel.initial_mcs) channel["initial_mcs"] = *sc.channel.initial_mcs;
    if (sc.channel.mean_mcs) channel["mean_mcs"] = *sc.channel.mean_mcs;
    if (sc.channel.step_prob) channel["step_prob"] = *sc.channel.step_prob;
    if (sc.channel.distance_atten) channel["distance_atten"] = *sc.channel.distance_atten;
    channel["freeze"] = sc.channel.freeze;
    channel["peak_rate_mb_per_rb_s"] = sc.channel.peak_rate_mb_per_rb_s;
    if (!sc.channel.script.empty()) {
        json script = json::array();
        for (const auto& step : sc.channel.script)
            script.push_back(json{{"time_s", step.time_s}, {"mcs", step.mcs}});
        channel["script"] = std::move(script);
    }
    root["channel"] = std::move(channel);

    root["sim"] = sim_config_to_json(sc.sim);
    return root.dump(2) + "\n";
}

Scenario scenario_from_json(const std::string& text, const std::string& base_dir) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("scenario: ") + e.what());
    }
    if (!root.is_object()) throw SchemaError("scenario: top level must be an object");
    check_format_version(root, "scenario");

    Scenario sc;
    const json& rsus = require(root, "rsus", "scenario");
    for (const auto& r : rsus) {
        RsuSpec rsu;
        rsu.id = require_str(r, "id", "rsus");
        rsu.total_rbs = require_int(r, "total_rbs", "rsu " + rsu.id);
        rsu.total_cus = require_int(r, "total_cus", "rsu " + rsu.id);
        rsu.hardware_class = require_str(r, "hardware_class", "rsu " + rsu.id);
        rsu.init_delay_s = opt_num(r, "init_delay_s", 0.0);
        rsu.x_m = opt_num(r, "x_m", 0.0);
        rsu.y_m = opt_num(r, "y_m", 0.0);
        if (rsu.total_rbs < 1 || rsu.total_cus < 1)
            throw SchemaError("rsu " + rsu.id + ": capacities must be >= 1");
        if (rsu.init_delay_s < 0) throw SchemaError("rsu " + rsu.id + ": negative init_delay_s");
        sc.rsus.push_back(std::move(rsu));
    }

    const json& tasks = require(root, "tasks", "scenario");
    for (const auto& t : tasks) {
        TaskSpec task;
        task.id = require_str(t, "id", "tasks");
        const std::string where = "task " + task.id;
        task.period_s = require_num(t, "period_s", where);
        task.input_mb = require_num(t, "input_mb", where);
        task.local_exec_s = require_num(t, "local_exec_s", where);
        task.local_power_w = require_num(t, "local_power_w", where);
        task.offload_power_w = require_num(t, "offload_power_w", where);
        task.service_type = require_str(t, "service_type", where);
        task.vehicle_id = require_str(t, "vehicle_id", where);
        const std::string crit = require_str(t, "criticality", where);
        if (crit == "safety_critical") {
            task.criticality = Criticality::SafetyCritical;
        } else if (crit == "mk_constrained") {
            task.criticality = Criticality::MkConstrained;
            task.mk_m = require_int(t, "mk_m", where);
            task.mk_k = require_int(t, "mk_k", where);
            if (!(0 < task.mk_m && task.mk_m <= task.mk_k))
                throw SchemaError(where + ": mk window requires 0 < mk_m <= mk_k");
        } else {
            throw SchemaError(where + ": unknown criticality '" + crit + "'");
        }
        if (task.period_s <= 0 || task.input_mb <= 0 || task.local_exec_s <= 0)
            throw SchemaError(where + ": period_s, input_mb, local_exec_s must be positive");
        if (task.local_exec_s > task.period_s)
            throw SchemaError(where + ": local_exec_s exceeds period_s");
        sc.tasks.push_back(std::move(task));
    }

    const json& profiles = require(root, "profiles", "scenario");
    for (const auto& p : profiles) {
        const std::string svc = require_str(p, "service_type", "profiles");
        const std::string hw = require_str(p, "hardware_class", "profiles");
        const int cus = require_int(p, "cus", "profiles");
        const double time = require_num(p, "proc_time_s", "profiles");
        if (cus < 1) throw SchemaError("profiles: cus must be >= 1");
        sc.profiles.set(svc, hw, cus, time);
    }
    if (auto bad = sc.profiles.check_invariants()) throw SchemaError("profiles: " + *bad);

    sc.traces = traces_from_json(require(root, "traces", "scenario"), base_dir);

    if (root.contains("channel")) {
        const json& ch = root.at("channel");
        if (ch.contains("initial_mcs")) sc.channel.initial_mcs = ch.at("initial_mcs").get<int>();
        if (ch.contains("mean_mcs")) sc.channel.mean_mcs = ch.at("mean_mcs").get<double>();
        if (ch.contains("step_prob")) sc.channel.step_prob = ch.at("step_prob").get<double>();
        if (ch.contains("distance_atten"))
            sc.channel.distance_atten = ch.at("distance_atten").get<double>();
        if (ch.contains("freeze")) sc.channel.freeze = ch.at("freeze").get<bool>();
        sc.channel.peak_rate_mb_per_rb_s =
            opt_num(ch, "peak_rate_mb_per_rb_s", sc.channel.peak_rate_mb_per_rb_s);
        if (sc.channel.peak_rate_mb_per_rb_s <= 0)
            throw SchemaError("channel: peak_rate_mb_per_rb_s must be positive");
        if (ch.contains("script")) {
            double prev = -1.0;
            for (const auto& s : ch.at("script")) {
                McsStep step;
                step.time_s = require_num(s, "time_s", "channel.script");
                step.mcs = require_int(s, "mcs", "channel.script");
                if (step.mcs < 0 || step.mcs > kMaxMcs)
                    throw SchemaError("channel.script: mcs out of range");
                if (step.time_s < prev)
                    throw SchemaError("channel.script: steps must be time-ordered");
                prev = step.time_s;
                sc.channel.script.push_back(step);
            }
        }
        if (sc.channel.initial_mcs && (*sc.channel.initial_mcs < 0 || *sc.channel.initial_mcs > kMaxMcs))
            throw SchemaError("channel: initial_mcs out of range");
    }

    if (root.contains("sim")) sc.sim = sim_config_from_json(root.at("sim"));

    // cross references
    std::vector<std::string> task_ids, rsu_ids;
    for (const auto& t : sc.tasks) task_ids.push_back(t.id);
    for (const auto& r : sc.rsus) rsu_ids.push_back(r.id);
    std::sort(task_ids.begin(), task_ids.end());
    std::sort(rsu_ids.begin(), rsu_ids.end());
    if (std::adjacent_find(task_ids.begin(), task_ids.end()) != task_ids.end())
        throw SchemaError("duplicate task id");
    if (std::adjacent_find(rsu_ids.begin(), rsu_ids.end()) != rsu_ids.end())
        throw SchemaError("duplicate rsu id");

    for (const auto& t : sc.tasks) {
        if (!sc.profiles.has_service(t.service_type))
            throw CrossRefError("task " + t.id + ": no profile rows for service_type '" +
                                t.service_type + "'");
        bool has_trace = false;
        for (const auto& tr : sc.traces) has_trace = has_trace || tr.vehicle_id == t.vehicle_id;
        if (!has_trace)
            throw CrossRefError("task " + t.id + ": no trace for vehicle '" + t.vehicle_id + "'");
    }
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::string base_dir;
    const auto slash = path.find_last_of('/');
    if (slash != std::string::npos) base_dir = path.substr(0, slash);
    return scenario_from_json(read_file(path), base_dir);
}

void save_scenario(const Scenario& scenario, const std::string& path) {
    write_file(path, scenario_to_json(scenario));
}

// ---------------------------------------------------------------------------
// generator

namespace {

double round_to_tenth_ms(double seconds) {
    return std::max(1.0, std::round(seconds * 10000.0)) / 10000.0;
}

}  // namespace

Scenario gen_scenario(const GenDescriptor& d) {
    if (d.num_tasks < 1 || d.num_rsus < 1 || d.rbs_per_rsu < 1 || d.cus_per_rsu < 1)
        throw SchemaError("gen: counts and capacities must be >= 1");
    if (d.input_mb_min <= 0 || d.input_mb_max < d.input_mb_min)
        throw SchemaError("gen: bad input_mb range");
    if (d.init_delay_min_s < 0 || d.init_delay_max_s < d.init_delay_min_s)
        throw SchemaError("gen: bad init delay range");
    if (d.duration_s <= 0 || d.area_m <= 0 || d.vehicle_speed_mps <= 0)
        throw SchemaError("gen: duration, area, and speed must be positive");
    if (d.num_service_types < 1 || d.num_service_types > 99 || d.num_hardware_classes < 1 ||
        d.num_hardware_classes > 26)
        throw SchemaError("gen: bad service/hardware counts");
    if (d.mk_fraction < 0 || d.mk_fraction > 1) throw SchemaError("gen: bad mk_fraction");

    Rng rng(d.seed);
    Scenario sc;
    char buf[32];

    std::vector<std::string> services, hardware;
    for (int s = 0; s < d.num_service_types; ++s) {
        std::snprintf(buf, sizeof buf, "svc_%02d", s);
        services.push_back(buf);
    }
    for (int h = 0; h < d.num_hardware_classes; ++h) {
        std::snprintf(buf, sizeof buf, "gpu_%c", 'a' + h);
        hardware.push_back(buf);
    }

    // grid roads over the square area, 5 lines each way
    constexpr int kGridLines = 5;
    const double pitch = d.area_m / (kGridLines - 1);
    auto node_pos = [&](int node) {
        return std::make_pair(pitch * (node % kGridLines), pitch * (node / kGridLines));
    };
    const int num_nodes = kGridLines * kGridLines;

    for (int k = 0; k < d.num_rsus; ++k) {
        RsuSpec rsu;
        std::snprintf(buf, sizeof buf, "rsu_%02d", k);
        rsu.id = buf;
        rsu.total_rbs = d.rbs_per_rsu;
        rsu.total_cus = d.cus_per_rsu;
        rsu.hardware_class = rng.pick(hardware);
        rsu.init_delay_s = rng.uniform(d.init_delay_min_s, d.init_delay_max_s);
        const auto [x, y] = node_pos(static_cast<int>(
            (static_cast<long>(k) * num_nodes) / d.num_rsus));
        rsu.x_m = x;
        rsu.y_m = y;
        sc.rsus.push_back(std::move(rsu));
    }

    // per-class speed factors, then one work figure per (service, hardware)
    std::vector<double> speed;
    for (int h = 0; h < d.num_hardware_classes; ++h) speed.push_back(rng.uniform(0.8, 2.4));
    for (const auto& svc : services) {
        const double work = rng.uniform(0.05, 0.6);  // seconds on one CU at speed 1
        for (int h = 0; h < d.num_hardware_classes; ++h)
            for (int c = 1; c <= d.cus_per_rsu; ++c)
                sc.profiles.set(svc, hardware[static_cast<std::size_t>(h)], c,
                                round_to_tenth_ms(work / (speed[static_cast<std::size_t>(h)] * c)));
    }

    const int num_vehicles = d.num_vehicles > 0 ? d.num_vehicles : d.num_tasks;
    for (int v = 0; v < num_vehicles; ++v) {
        VehicleTrace trace;
        std::snprintf(buf, sizeof buf, "veh_%03d", v);
        trace.vehicle_id = buf;
        int node = static_cast<int>(rng.uniform_int(0, num_nodes - 1));
        int prev = -1;
        double t = 0.0;
        auto [x, y] = node_pos(node);
        trace.points.push_back({0.0, x, y});
        while (t < d.duration_s) {
            // pick an adjacent grid node, avoiding an immediate U-turn
            std::vector<int> next;
            const int col = node % kGridLines, row = node / kGridLines;
            if (col > 0) next.push_back(node - 1);
            if (col < kGridLines - 1) next.push_back(node + 1);
            if (row > 0) next.push_back(node - kGridLines);
            if (row < kGridLines - 1) next.push_back(node + kGridLines);
            if (next.size() > 1)
                next.erase(std::remove(next.begin(), next.end(), prev), next.end());
            const int chosen = next[static_cast<std::size_t>(
                rng.uniform_int(0, static_cast<std::int64_t>(next.size()) - 1))];
            prev = node;
            node = chosen;
            t += pitch / d.vehicle_speed_mps;
            const auto [nx, ny] = node_pos(node);
            trace.points.push_back({t, nx, ny});
        }
        sc.traces.push_back(std::move(trace));
    }

    const std::vector<double> periods = {0.05, 0.067, 0.1};
    const std::vector<std::pair<int, int>> mk_windows = {{1, 2}, {2, 3}, {3, 4}, {4, 5}};
    for (int i = 0; i < d.num_tasks; ++i) {
        TaskSpec task;
        std::snprintf(buf, sizeof buf, "task_%03d", i);
        task.id = buf;
        task.period_s = rng.pick(periods);
        task.input_mb = rng.uniform(d.input_mb_min, d.input_mb_max);
        task.local_exec_s = task.period_s * rng.uniform(0.5, 0.9);
        task.local_power_w = rng.uniform(4.0, 8.0);
        task.offload_power_w = rng.uniform(1.0, 2.5);
        task.service_type = rng.pick(services);
        std::snprintf(buf, sizeof buf, "veh_%03d", i % num_vehicles);
        task.vehicle_id = buf;
        if (rng.bernoulli(d.mk_fraction)) {
            task.criticality = Criticality::MkConstrained;
            const auto [m, k] = rng.pick(mk_windows);
            task.mk_m = m;
            task.mk_k = k;
        }
        sc.tasks.push_back(std::move(task));
    }

    sc.sim.duration_s = d.duration_s;
    sc.sim.coverage_radius_m = d.coverage_radius_m;
    sc.sim.rng_seed = d.seed;
    return sc;
}

// ---------------------------------------------------------------------------
// results

std::string config_hash(const Scenario& scenario, const SimConfig& config) {
    const std::string blob = scenario_to_json(scenario) + sim_config_to_json(config).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : blob) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

json manifest_to_json(const RunManifest& m) {
    return json{{"seed", m.seed},
                {"config_hash", m.config_hash},
                {"code_version", m.code_version},
                {"algorithm", m.algorithm},
                {"mode", m.mode},
                {"quality", m.quality},
                {"scenario", m.scenario}};
}

RunManifest manifest_from_json(const json& obj) {
    RunManifest m;
    m.seed = obj.at("seed").get<std::uint64_t>();
    m.config_hash = obj.at("config_hash").get<std::string>();
    m.code_version = obj.at("code_version").get<std::string>();
    m.algorithm = obj.at("algorithm").get<std::string>();
    m.mode = obj.at("mode").get<std::string>();
    m.quality = obj.at("quality").get<std::string>();
    if (obj.contains("scenario")) m.scenario = obj.at("scenario").get<std::string>();
    return m;
}

}  // namespace

std::string manifest_json(const RunManifest& manifest) {
    return manifest_to_json(manifest).dump();
}

void write_results(const RunResult& result, const std::string& path) {
    json root;
    root["format_version"] = std::to_string(kFormatMajor) + "." + std::to_string(kFormatMinor);
    root["manifest"] = manifest_to_json(result.manifest);
    const Metrics& m = result.metrics;
    root["summary"] = json{{"predicted_js", m.predicted_js},
                           {"measured_js", m.measured_js},
                           {"offloaded_jobs_per_s", m.offloaded_jobs_per_s},
                           {"offloaded_jobs", m.offloaded_jobs},
                           {"local_jobs", m.local_jobs},
                           {"suspensions", m.suspensions},
                           {"resumptions", m.resumptions},
                           {"deadline_misses", m.deadline_misses},
                           {"cycles_run", m.cycles_run}};
    json cycles = json::array();
    for (const auto& c : m.cycles)
        cycles.push_back(json{{"t_start", c.t_start},
                              {"predicted_js", c.predicted_js},
                              {"measured_js", c.measured_js},
                              {"offloaded_jobs", c.offloaded_jobs},
                              {"local_jobs", c.local_jobs},
                              {"suspensions", c.suspensions},
                              {"sched_latency_s", c.sched_latency_s}});
    root["cycles"] = std::move(cycles);
    write_file(path, root.dump(2) + "\n");
}

RunResult read_results(const std::string& path) {
    json root;
    try {
        root = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("results: ") + e.what());
    }
    check_format_version(root, "results");
    RunResult out;
    out.manifest = manifest_from_json(root.at("manifest"));
    const json& s = root.at("summary");
    Metrics& m = out.metrics;
    m.predicted_js = s.at("predicted_js").get<double>();
    m.measured_js = s.at("measured_js").get<double>();
    m.offloaded_jobs_per_s = s.at("offloaded_jobs_per_s").get<double>();
    m.offloaded_jobs = s.at("offloaded_jobs").get<long>();
    m.local_jobs = s.at("local_jobs").get<long>();
    m.suspensions = s.at("suspensions").get<long>();
    m.resumptions = s.at("resumptions").get<long>();
    m.deadline_misses = s.at("deadline_misses").get<long>();
    m.cycles_run = s.at("cycles_run").get<long>();
    for (const auto& c : root.at("cycles")) {
        CycleStats cs;
        cs.t_start = c.at("t_start").get<double>();
        cs.predicted_js = c.at("predicted_js").get<double>();
        cs.measured_js = c.at("measured_js").get<double>();
        cs.offloaded_jobs = c.at("offloaded_jobs").get<long>();
        cs.local_jobs = c.at("local_jobs").get<long>();
        cs.suspensions = c.at("suspensions").get<long>();
        cs.sched_latency_s = c.at("sched_latency_s").get<double>();
        m.cycles.push_back(cs);
    }
    return out;
}

void write_event_log(const std::vector<std::string>& events, const std::string& path) {
    std::ostringstream out;
    for (const auto& line : events) out << line << '\n';
    write_file(path, out.str());
}

}  // namespace vecsched
