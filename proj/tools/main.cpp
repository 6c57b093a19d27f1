//
// vecsched command-line tool: solve one scheduling snapshot, run
// simulations, sweep benchmark matrices, certify approximation ratios, and
// generate synthetic scenarios.
//
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vecsched/oracle.hpp"
#include "vecsched/rng.hpp"
#include "vecsched/scenario.hpp"
#include "vecsched/sim.hpp"

namespace {

using namespace vecsched;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;  // invariant failure: should never happen
constexpr int kExitUsage = 2;

std::string resolve_out(const std::string& path) {
    if (path.empty() || path.front() == '/') return path;
    const char* dir = std::getenv("VECSCHED_OUT_DIR");
    if (!dir || !*dir) return path;
    return std::string(dir) + "/" + path;
}

std::vector<std::string> split_csv(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

struct CommonFlags {
    std::string scenario_path;
    std::string out;
    std::string algorithm = "saround";
    std::string mode;
    std::string quality;
    std::string format = "summary";
    std::uint64_t seed = 0;
    bool seed_set = false;
};

SimConfig effective_config(const Scenario& sc, const CommonFlags& flags) {
    SimConfig cfg = sc.sim;
    if (auto a = parse_algorithm(flags.algorithm)) cfg.algorithm = *a;
    else throw SchemaError("unknown algorithm '" + flags.algorithm + "'");
    if (!flags.mode.empty()) {
        auto m = parse_mode(flags.mode);
        if (!m) throw SchemaError("unknown mode '" + flags.mode + "'");
        cfg.mode = *m;
    }
    if (!flags.quality.empty()) {
        auto q = parse_quality(flags.quality);
        if (!q) throw SchemaError("unknown quality '" + flags.quality + "'");
        cfg.quality = *q;
    }
    if (flags.seed_set) cfg.rng_seed = flags.seed;
    return cfg;
}

RunManifest make_manifest(const Scenario& sc, const SimConfig& cfg, const std::string& path) {
    RunManifest m;
    m.seed = cfg.rng_seed;
    m.config_hash = config_hash(sc, cfg);
    m.algorithm = algorithm_name(cfg.algorithm);
    m.mode = mode_name(cfg.mode);
    m.quality = quality_name(cfg.quality);
    m.scenario = path;
    return m;
}

int cmd_solve(const CommonFlags& flags) {
    const Scenario sc = load_scenario(flags.scenario_path);
    const SimConfig cfg = effective_config(sc, flags);
    std::cout << "manifest " << manifest_json(make_manifest(sc, cfg, flags.scenario_path)) << "\n";

    const ProblemInstance pi = initial_snapshot(sc, cfg);
    const InstancePool pool = enumerate_instances(pi, cfg.prune);
    const Assignment asg = run_algorithm(cfg.algorithm, pool, pi);
    const auto violations = validate(asg, pi);

    json out;
    out["algorithm"] = algorithm_name(cfg.algorithm);
    out["total_utility_js"] = asg.total_utility;
    json sels = json::array();
    for (const auto& sel : asg.selections)
        sels.push_back(json{{"task_id", pi.tasks()[static_cast<std::size_t>(sel.task)].id},
                            {"rsu_id", pi.rsus()[static_cast<std::size_t>(sel.rsu)].id},
                            {"rbs", sel.rbs},
                            {"cus", sel.cus},
                            {"utility_js", sel.utility}});
    out["selections"] = sels;
    json usage = json::array();
    for (std::size_t r = 0; r < pi.rsus().size(); ++r)
        usage.push_back(json{{"rsu_id", pi.rsus()[r].id},
                             {"used_rbs", asg.used_rbs[r]},
                             {"total_rbs", pi.rsus()[r].total_rbs},
                             {"used_cus", asg.used_cus[r]},
                             {"total_cus", pi.rsus()[r].total_cus}});
    out["rsu_usage"] = usage;

    std::cout << out.dump(2) << "\n";
    if (!flags.out.empty()) {
        json file = out;
        file["manifest"] = json::parse(manifest_json(make_manifest(sc, cfg, flags.scenario_path)));
        file["format_version"] = "1.0";
        std::ofstream f(resolve_out(flags.out));
        f << file.dump(2) << "\n";
    }
    if (!violations.empty()) {
        for (const auto& v : violations)
            std::cerr << "violation: " << to_string(v.kind) << " " << v.subject << ": " << v.detail
                      << "\n";
        return kExitInternal;
    }
    std::cout << "validate: ok (" << asg.selections.size() << " tasks offloaded)\n";
    return kExitOk;
}

void print_metrics_rows(const Metrics& m) {
    std::printf("t_start,predicted_js,measured_js,offloaded_jobs,local_jobs,suspensions\n");
    for (const auto& c : m.cycles)
        std::printf("%.3f,%.6f,%.6f,%ld,%ld,%ld\n", c.t_start, c.predicted_js, c.measured_js,
                    c.offloaded_jobs, c.local_jobs, c.suspensions);
}

int cmd_simulate(const CommonFlags& flags, const std::string& log_path, double duration_override) {
    const Scenario sc = load_scenario(flags.scenario_path);
    SimConfig cfg = effective_config(sc, flags);
    if (duration_override > 0) cfg.duration_s = duration_override;
    const RunManifest manifest = make_manifest(sc, cfg, flags.scenario_path);
    std::cout << "manifest " << manifest_json(manifest) << "\n";

    const SimResult result = run_simulation(sc, cfg);
    if (flags.format == "rows") {
        print_metrics_rows(result.metrics);
    } else {
        const Metrics& m = result.metrics;
        std::printf("predicted_js          %.6f\n", m.predicted_js);
        std::printf("measured_js           %.6f\n", m.measured_js);
        std::printf("offloaded_jobs_per_s  %.6f\n", m.offloaded_jobs_per_s);
        std::printf("offloaded_jobs        %ld\n", m.offloaded_jobs);
        std::printf("local_jobs            %ld\n", m.local_jobs);
        std::printf("suspensions           %ld\n", m.suspensions);
        std::printf("resumptions           %ld\n", m.resumptions);
        std::printf("deadline_misses       %ld\n", m.deadline_misses);
        std::printf("cycles_run            %ld\n", m.cycles_run);
    }
    if (!flags.out.empty()) write_results({manifest, result.metrics}, resolve_out(flags.out));
    if (!log_path.empty()) write_event_log(result.events, resolve_out(log_path));
    return kExitOk;
}

int cmd_bench(const CommonFlags& flags, const std::string& algorithms, const std::string& qualities,
              const std::string& modes, int seeds, const std::string& n_tasks_list, int num_rsus,
              int rbs, int cus, double duration) {
    std::cout << "manifest " << json{{"seed", flags.seed}, {"code_version", kCodeVersion}}.dump()
              << "\n";
    std::printf(
        "algorithm,quality,mode,n_tasks,seed,predicted_js,measured_js,offloaded_jobs_per_s,"
        "solver_wall_ms\n");
    std::ostringstream file_rows;
    long cell = 0;
    for (const std::string& n_str : split_csv(n_tasks_list)) {
        const int n = std::stoi(n_str);
        for (const std::string& alg : split_csv(algorithms)) {
            const auto algorithm = parse_algorithm(alg);
            if (!algorithm) throw SchemaError("unknown algorithm '" + alg + "'");
            for (const std::string& q : split_csv(qualities)) {
                const auto quality = parse_quality(q);
                if (!quality) throw SchemaError("unknown quality '" + q + "'");
                for (const std::string& mo : split_csv(modes)) {
                    const auto mode = parse_mode(mo);
                    if (!mode) throw SchemaError("unknown mode '" + mo + "'");
                    for (int s = 0; s < seeds; ++s) {
                        const std::uint64_t cell_seed =
                            Rng::derive(flags.seed, static_cast<std::uint64_t>(cell));
                        ++cell;
                        GenDescriptor gen;
                        gen.num_tasks = n;
                        gen.num_rsus = num_rsus;
                        gen.rbs_per_rsu = rbs;
                        gen.cus_per_rsu = cus;
                        gen.duration_s = duration;
                        gen.seed = cell_seed;
                        const Scenario sc = gen_scenario(gen);
                        SimConfig cfg = sc.sim;
                        cfg.algorithm = *algorithm;
                        cfg.quality = *quality;
                        cfg.mode = *mode;
                        cfg.rng_seed = cell_seed;
                        const SimResult r = run_simulation(sc, cfg);
                        char row[256];
                        std::snprintf(row, sizeof row, "%s,%s,%s,%d,%llu,%.6f,%.6f,%.6f,%.3f\n",
                                      alg.c_str(), q.c_str(), mo.c_str(), n,
                                      static_cast<unsigned long long>(cell_seed),
                                      r.metrics.predicted_js, r.metrics.measured_js,
                                      r.metrics.offloaded_jobs_per_s, r.solver_wall_s * 1e3);
                        std::fputs(row, stdout);
                        std::fflush(stdout);
                        file_rows << row;
                    }
                }
            }
        }
    }
    if (!flags.out.empty()) {
        std::ofstream f(resolve_out(flags.out));
        f << "algorithm,quality,mode,n_tasks,seed,predicted_js,measured_js,offloaded_jobs_per_s,"
             "solver_wall_ms\n"
          << file_rows.str();
    }
    return kExitOk;
}

int cmd_certify(const CommonFlags& flags, const std::string& targets, int trials,
                const InstanceFamily& family) {
    std::cout << "manifest "
              << json{{"seed", flags.seed}, {"trials", trials}, {"code_version", kCodeVersion}}
                     .dump()
              << "\n";
    bool violated = false;
    json reports = json::array();
    for (const std::string& name : split_csv(targets)) {
        const auto target = parse_certify_target(name);
        if (!target) throw SchemaError("unknown certify target '" + name + "'");
        const CertifyReport rep = certify_ratio(*target, family, trials, flags.seed);
        json jr{{"target", certify_target_name(rep.target)},
                {"trials", rep.trials},
                {"ratio_samples", rep.ratio_samples},
                {"min_ratio", rep.min_ratio},
                {"mean_ratio", rep.mean_ratio},
                {"bound_violations", rep.bound_violations},
                {"feasibility_violations", rep.feasibility_violations},
                {"lps_checked", rep.lps_checked},
                {"lp_violations", rep.lp_violations},
                {"oracle_nodes", rep.oracle_nodes},
                {"all_exact", rep.all_exact}};
        if (rep.bound) jr["bound"] = *rep.bound;
        if (!rep.details.empty()) jr["details"] = rep.details;
        reports.push_back(jr);
        violated = violated || rep.bound_violations > 0 || rep.feasibility_violations > 0 ||
                   rep.lp_violations > 0;
    }
    const std::string text = json{{"reports", reports}}.dump(2);
    std::cout << text << "\n";
    if (!flags.out.empty()) {
        std::ofstream f(resolve_out(flags.out));
        f << text << "\n";
    }
    return violated ? kExitInternal : kExitOk;
}

int cmd_gen(const GenDescriptor& descriptor, const std::string& out) {
    const Scenario sc = gen_scenario(descriptor);
    const std::string path = resolve_out(out);
    save_scenario(sc, path);
    std::cout << "manifest "
              << json{{"seed", descriptor.seed},
                      {"config_hash", config_hash(sc, sc.sim)},
                      {"code_version", kCodeVersion}}
                     .dump()
              << "\n";
    std::cout << "wrote " << path << " (" << sc.tasks.size() << " tasks, " << sc.rsus.size()
              << " rsus, " << sc.traces.size() << " vehicles)\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deadline-constrained offloading scheduler and VEC simulator"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string log_path;
    double duration_override = 0.0;

    auto add_common = [&](CLI::App* cmd, bool with_scenario) {
        if (with_scenario)
            cmd->add_option("--scenario", flags.scenario_path, "scenario file")->required();
        cmd->add_option("--out", flags.out, "output file (VECSCHED_OUT_DIR applies)");
        cmd->add_option("--algorithm", flags.algorithm, "saround|greedy|iterative|game|idassign");
        cmd->add_option("--mode", flags.mode, "sched_all|sched_remain");
        cmd->add_option("--quality", flags.quality, "low|medium|high");
        cmd->add_option("--format", flags.format, "summary|rows");
        cmd->add_option("--seed", flags.seed, "rng seed")->each([&](const std::string&) {
            flags.seed_set = true;
        });
    };

    CLI::App* solve = app.add_subcommand("solve", "run one scheduling snapshot");
    add_common(solve, true);

    CLI::App* simulate = app.add_subcommand("simulate", "run the event simulator");
    add_common(simulate, true);
    simulate->add_option("--log", log_path, "event log output path");
    simulate->add_option("--duration", duration_override, "override duration_s");

    CLI::App* bench = app.add_subcommand("bench", "sweep a benchmark matrix");
    std::string algorithms = "saround,greedy,iterative,game,idassign";
    std::string qualities = "medium";
    std::string modes = "sched_all";
    std::string n_tasks_list = "20";
    int seeds = 1, bench_rsus = 5, bench_rbs = 60, bench_cus = 8;
    double bench_duration = 30.0;
    add_common(bench, false);
    bench->add_option("--algorithms", algorithms, "comma-separated list");
    bench->add_option("--qualities", qualities, "comma-separated list");
    bench->add_option("--modes", modes, "comma-separated list");
    bench->add_option("--seeds", seeds, "seeds per cell");
    bench->add_option("--n-tasks", n_tasks_list, "comma-separated task counts");
    bench->add_option("--rsus", bench_rsus, "RSUs per generated scenario");
    bench->add_option("--rbs", bench_rbs, "RBs per RSU");
    bench->add_option("--cus", bench_cus, "CUs per RSU");
    bench->add_option("--duration", bench_duration, "simulated seconds per cell");

    CLI::App* certify = app.add_subcommand("certify", "check approximation bounds vs the oracle");
    std::string targets = "saround,floor_rd";
    int trials = 500;
    InstanceFamily family;
    add_common(certify, false);
    certify->add_option("--targets", targets, "comma-separated: saround,floor_rd,greedy,...");
    certify->add_option("--trials", trials, "random instances per target");
    certify->add_option("--n-max", family.n_max, "max tasks per instance");
    certify->add_option("--m-max", family.m_max, "max RSUs per instance");
    certify->add_option("--b-max", family.b_max, "max RBs per RSU");
    certify->add_option("--c-max", family.c_max, "max CUs per RSU");

    CLI::App* gen = app.add_subcommand("gen", "generate a synthetic scenario");
    GenDescriptor descriptor;
    std::string gen_out = "scenario.json";
    gen->add_option("--out", gen_out, "output scenario path")->required();
    gen->add_option("--tasks", descriptor.num_tasks, "task count");
    gen->add_option("--rsus", descriptor.num_rsus, "RSU count");
    gen->add_option("--vehicles", descriptor.num_vehicles, "vehicle count (0: one per task)");
    gen->add_option("--rbs", descriptor.rbs_per_rsu, "RBs per RSU");
    gen->add_option("--cus", descriptor.cus_per_rsu, "CUs per RSU");
    gen->add_option("--area", descriptor.area_m, "square area edge, meters");
    gen->add_option("--duration", descriptor.duration_s, "trace/sim duration, seconds");
    gen->add_option("--radius", descriptor.coverage_radius_m, "coverage radius, meters");
    gen->add_option("--mk-fraction", descriptor.mk_fraction, "share of m-out-of-k tasks");
    gen->add_option("--seed", descriptor.seed, "generator seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (solve->parsed()) return cmd_solve(flags);
        if (simulate->parsed()) return cmd_simulate(flags, log_path, duration_override);
        if (bench->parsed())
            return cmd_bench(flags, algorithms, qualities, modes, seeds, n_tasks_list, bench_rsus,
                             bench_rbs, bench_cus, bench_duration);
        if (certify->parsed()) return cmd_certify(flags, targets, trials, family);
        if (gen->parsed()) return cmd_gen(descriptor, gen_out);
    } catch (const ScenarioError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitUsage;
}
