// Acceptance suite: runs every gate the project commits to and prints one
// PASS/FAIL line per criterion. Exits nonzero if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "vecsched/baselines.hpp"
#include "vecsched/oracle.hpp"
#include "vecsched/rng.hpp"
#include "vecsched/saround.hpp"
#include "vecsched/scenario.hpp"
#include "vecsched/sim.hpp"

using namespace vecsched;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- criteria 1-3: certification harness ----------------------------------

void criteria_ratio_bounds() {
    const InstanceFamily family;  // N in [2,6], M in [1,3], B in [2,6], C in [2,4]
    const auto t0 = std::chrono::steady_clock::now();
    const CertifyReport whole = certify_ratio(CertifyTarget::SARound, family, 500, 20260810);
    const CertifyReport per_rsu = certify_ratio(CertifyTarget::FloorRd, family, 500, 20260811);
    const double elapsed = seconds_since(t0);

    {
        std::ostringstream msg;
        msg << "whole-problem ratio >= 0.25 over " << whole.trials
            << " instances: min=" << whole.min_ratio << " mean=" << whole.mean_ratio
            << " violations=" << whole.bound_violations << " (" << elapsed << " s"
            << (whole.mean_ratio > 0.8 ? ", mean well above 0.8" : "") << ")";
        report(1, whole.bound_violations == 0 && whole.min_ratio >= 0.25 - 1e-9 &&
                      whole.ratio_samples > 400 && whole.all_exact && elapsed < 120.0,
               msg.str());
    }
    {
        std::ostringstream msg;
        msg << "per-RSU ratio >= 1/3 over " << per_rsu.trials
            << " instances: min=" << per_rsu.min_ratio
            << " violations=" << per_rsu.bound_violations;
        report(2, per_rsu.bound_violations == 0 && per_rsu.min_ratio >= 1.0 / 3.0 - 1e-9 &&
                      per_rsu.ratio_samples > 400 && per_rsu.all_exact,
               msg.str());
    }
    {
        const long lps = whole.lps_checked + per_rsu.lps_checked;
        const long bad = whole.lp_violations + per_rsu.lp_violations;
        std::ostringstream msg;
        msg << "basic-solution structure on " << lps << " LPs (positives <= N+2, <= 4 fractional"
            << " in <= 2 tasks): violations=" << bad;
        report(3, lps >= 500 && bad == 0, msg.str());
    }
}

// ---- criterion 4: feasibility across all five algorithms -------------------

void criterion_feasibility() {
    const InstanceFamily family;
    long violations = 0, assignments = 0;
    for (int trial = 0; trial < 500; ++trial) {
        Rng rng(Rng::derive(77, static_cast<std::uint64_t>(trial)));
        const ProblemInstance pi = random_small_instance(family, rng);
        const InstancePool pool = enumerate_instances(pi, trial % 2 == 0);
        for (const Assignment& asg :
             {saround(pool, pi), solve_greedy(pool, pi), solve_iterative(pool, pi),
              solve_game(pool, pi), solve_id_assign(pool, pi)}) {
            ++assignments;
            violations += !validate(asg, pi).empty();
        }
    }
    std::ostringstream msg;
    msg << assignments << " assignments from 5 algorithms x 500 instances, "
        << violations << " constraint violations";
    report(4, violations == 0, msg.str());
}

// ---- shared scenario builders ----------------------------------------------

Scenario closed_loop_scenario() {
    Scenario sc;
    for (int k = 0; k < 2; ++k) {
        RsuSpec rsu;
        rsu.id = "r" + std::to_string(k);
        rsu.total_rbs = 270;
        rsu.total_cus = 16;
        rsu.hardware_class = "hw_a";
        rsu.init_delay_s = 0.0;
        rsu.x_m = 400.0 * k;
        sc.rsus.push_back(rsu);
    }
    for (int c = 1; c <= 16; ++c) sc.profiles.set("svc", "hw_a", c, 0.02);
    char buf[16];
    for (int i = 0; i < 10; ++i) {
        TaskSpec t;
        std::snprintf(buf, sizeof buf, "t%02d", i);
        t.id = buf;
        t.period_s = i % 2 == 0 ? 0.05 : 0.1;
        t.input_mb = 0.08 + 0.01 * i;
        t.local_exec_s = 0.04;
        t.local_power_w = 6.0;
        t.offload_power_w = 2.0;
        t.service_type = "svc";
        std::snprintf(buf, sizeof buf, "v%02d", i);
        t.vehicle_id = buf;
        sc.tasks.push_back(t);
        const double x = 400.0 * (i % 2);
        sc.traces.push_back({t.vehicle_id, {{0.0, x, 10.0 + i}, {600.0, x, 10.0 + i}}});
    }
    sc.channel.freeze = true;
    sc.channel.initial_mcs = 14;
    sc.channel.distance_atten = 0.0;
    sc.sim.duration_s = 60.0;
    sc.sim.schedule_interval_s = 10.0;
    sc.sim.mode = Mode::SchedAll;
    sc.sim.algorithm = Algorithm::SARound;
    return sc;
}

void criterion_closed_loop() {
    const Scenario sc = closed_loop_scenario();
    const auto t0 = std::chrono::steady_clock::now();
    const SimResult r = run_simulation(sc, sc.sim);
    const double wall = seconds_since(t0);

    bool ok = r.metrics.cycles.size() == 6 && wall < 5.0;
    double worst = 0.0;
    for (std::size_t c = 1; c < r.metrics.cycles.size(); ++c) {
        const auto& cyc = r.metrics.cycles[c];
        if (cyc.predicted_js <= 0) {
            ok = false;
            continue;
        }
        const double rel = std::abs(cyc.measured_js - cyc.predicted_js) / cyc.predicted_js;
        worst = std::max(worst, rel);
        ok = ok && rel <= 0.02;
    }
    std::ostringstream msg;
    msg << "frozen channel, zero init, sched_all: worst per-cycle |measured-predicted| = "
        << worst * 100.0 << "% (limit 2%), wall " << wall << " s";
    report(5, ok, msg.str());
}

void criterion_offload_control() {
    Scenario sc = closed_loop_scenario();
    sc.sim.mode = Mode::SchedRemain;  // grants persist, so recovery resumes them
    sc.channel.script = {{30.0, 1}, {40.0, 14}};
    const SimResult r = run_simulation(sc, sc.sim);

    double last_resume = -1.0, first_suspend = -1.0;
    for (const auto& line : r.events) {
        if (line.find(" suspend ") != std::string::npos && first_suspend < 0)
            first_suspend = std::stod(line.substr(2, line.find(' ') - 2));
        if (line.find(" resume ") != std::string::npos)
            last_resume = std::stod(line.substr(2, line.find(' ') - 2));
    }
    const bool ok = r.metrics.suspensions >= 1 && r.metrics.deadline_misses == 0 &&
                    r.metrics.resumptions >= 1 && first_suspend >= 30.0 && last_resume >= 40.0;
    std::ostringstream msg;
    msg << "MCS drop at 30 s: suspensions=" << r.metrics.suspensions
        << " resumptions=" << r.metrics.resumptions
        << " deadline_misses=" << r.metrics.deadline_misses << " first_suspend=" << first_suspend
        << " last_resume=" << last_resume;
    report(6, ok, msg.str());
}

void criterion_mode_effect() {
    double mean_all = 0.0, mean_remain = 0.0;
    const int seeds = 20;
    for (int s = 0; s < seeds; ++s) {
        GenDescriptor d;
        d.num_tasks = 12;
        d.num_rsus = 3;
        d.rbs_per_rsu = 60;
        d.cus_per_rsu = 8;
        d.duration_s = 60.0;
        d.seed = Rng::derive(991, static_cast<std::uint64_t>(s));
        const Scenario sc = gen_scenario(d);
        SimConfig cfg = sc.sim;
        cfg.quality = Quality::Medium;
        cfg.algorithm = Algorithm::SARound;
        cfg.mode = Mode::SchedAll;
        mean_all += run_simulation(sc, cfg).metrics.offloaded_jobs_per_s;
        cfg.mode = Mode::SchedRemain;
        mean_remain += run_simulation(sc, cfg).metrics.offloaded_jobs_per_s;
    }
    mean_all /= seeds;
    mean_remain /= seeds;
    std::ostringstream msg;
    msg << "mean offloaded jobs/s over " << seeds << " seeds: sched_remain=" << mean_remain
        << " >= sched_all=" << mean_all;
    report(7, mean_remain >= mean_all, msg.str());
}

void criterion_runtime_scaling() {
    const auto t0 = std::chrono::steady_clock::now();
    InstanceFamily family;
    family.m_min = family.m_max = 5;
    family.b_min = family.b_max = 30;
    family.c_min = family.c_max = 8;

    std::vector<int> sizes = {25, 50, 100, 200};
    std::vector<double> times;
    for (int n : sizes) {
        family.n_min = family.n_max = n;
        double best = 1e100;
        for (int rep = 0; rep < 3; ++rep) {
            Rng rng(Rng::derive(1234, static_cast<std::uint64_t>(n * 10 + rep)));
            const ProblemInstance pi = random_small_instance(family, rng);
            const auto s0 = std::chrono::steady_clock::now();
            const InstancePool pool = enumerate_instances(pi, true);
            const Assignment asg = saround(pool, pi);
            best = std::min(best, seconds_since(s0));
            if (asg.total_utility < 0) std::abort();  // keep the work observable
        }
        times.push_back(best);
    }
    bool ok = true;
    std::ostringstream msg;
    msg << "solver wall time, min of 3 reps:";
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        msg << " N=" << sizes[i] << ":" << times[i] * 1e3 << "ms";
        if (i > 0) {
            const double ratio = times[i] / std::max(times[i - 1], 1e-9);
            msg << " (x" << ratio << ")";
            ok = ok && ratio <= 2.8;
        }
    }
    const double wall = seconds_since(t0);
    msg << ", sweep " << wall << " s";
    report(8, ok && wall < 300.0, msg.str());
}

void criterion_baseline_dominance() {
    const int scenarios = 50;
    double means[5] = {0, 0, 0, 0, 0};
    const Algorithm algos[5] = {Algorithm::SARound, Algorithm::Greedy, Algorithm::Iterative,
                                Algorithm::Game, Algorithm::IdAssign};
    for (int s = 0; s < scenarios; ++s) {
        GenDescriptor d;
        d.num_tasks = 10;
        d.num_rsus = 2;
        d.rbs_per_rsu = 40;
        d.cus_per_rsu = 8;
        d.duration_s = 30.0;
        d.seed = Rng::derive(5150, static_cast<std::uint64_t>(s));
        const Scenario sc = gen_scenario(d);
        for (int a = 0; a < 5; ++a) {
            SimConfig cfg = sc.sim;
            cfg.quality = Quality::Medium;
            cfg.mode = Mode::SchedAll;
            cfg.algorithm = algos[a];
            means[a] += run_simulation(sc, cfg).metrics.predicted_js / scenarios;
        }
    }
    bool ok = true;
    std::ostringstream msg;
    msg << "mean predicted J/s over " << scenarios << " scenarios:";
    for (int a = 0; a < 5; ++a) {
        msg << " " << algorithm_name(algos[a]) << "=" << means[a];
        if (a > 0) ok = ok && means[0] >= means[a] - 1e-9;
    }
    report(9, ok, msg.str());
}

void criterion_determinism() {
    GenDescriptor d;
    d.num_tasks = 10;
    d.num_rsus = 2;
    d.rbs_per_rsu = 60;
    d.cus_per_rsu = 8;
    d.duration_s = 40.0;
    d.seed = 31337;
    const Scenario sc = gen_scenario(d);
    SimConfig cfg = sc.sim;
    cfg.quality = Quality::Medium;

    const fs::path dir = fs::temp_directory_path() / "vecsched_acceptance";
    fs::create_directories(dir);
    std::string blobs[2], logs[2];
    for (int i = 0; i < 2; ++i) {
        const SimResult r = run_simulation(sc, cfg);
        RunResult rr;
        rr.manifest.seed = cfg.rng_seed;
        rr.manifest.config_hash = config_hash(sc, cfg);
        rr.manifest.algorithm = algorithm_name(cfg.algorithm);
        rr.manifest.mode = mode_name(cfg.mode);
        rr.manifest.quality = quality_name(cfg.quality);
        rr.metrics = r.metrics;
        const fs::path res = dir / ("res" + std::to_string(i) + ".json");
        const fs::path log = dir / ("log" + std::to_string(i) + ".txt");
        write_results(rr, res.string());
        write_event_log(r.events, log.string());
        std::ifstream fr(res, std::ios::binary), fl(log, std::ios::binary);
        std::ostringstream br, bl;
        br << fr.rdbuf();
        bl << fl.rdbuf();
        blobs[i] = br.str();
        logs[i] = bl.str();
    }
    const bool ok = !blobs[0].empty() && blobs[0] == blobs[1] && logs[0] == logs[1];
    std::ostringstream msg;
    msg << "two identical runs: result files " << (blobs[0] == blobs[1] ? "identical" : "differ")
        << ", event logs " << (logs[0] == logs[1] ? "identical" : "differ") << " ("
        << logs[0].size() << " bytes)";
    report(10, ok, msg.str());
}

}  // namespace

int main() {
    criteria_ratio_bounds();     // 1, 2, 3
    criterion_feasibility();     // 4
    criterion_closed_loop();     // 5
    criterion_offload_control(); // 6
    criterion_mode_effect();     // 7
    criterion_runtime_scaling(); // 8
    criterion_baseline_dominance();  // 9
    criterion_determinism();     // 10

    if (failures > 0) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
