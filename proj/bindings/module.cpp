//
// vecsched python bindings: scenario loading/generation, the five solvers
// on a scenario's initial snapshot, the event simulator, and the
// oracle-backed ratio certification harness.
//
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "vecsched/oracle.hpp"
#include "vecsched/scenario.hpp"
#include "vecsched/sim.hpp"

namespace py = pybind11;
using namespace vecsched;

namespace {

SimConfig config_from_kwargs(const Scenario& sc, const std::string& algorithm,
                             const std::string& mode, const std::string& quality,
                             std::optional<std::uint64_t> seed, std::optional<double> duration) {
    SimConfig cfg = sc.sim;
    if (!algorithm.empty()) {
        auto a = parse_algorithm(algorithm);
        if (!a) throw py::value_error("unknown algorithm '" + algorithm + "'");
        cfg.algorithm = *a;
    }
    if (!mode.empty()) {
        auto m = parse_mode(mode);
        if (!m) throw py::value_error("unknown mode '" + mode + "'");
        cfg.mode = *m;
    }
    if (!quality.empty()) {
        auto q = parse_quality(quality);
        if (!q) throw py::value_error("unknown quality '" + quality + "'");
        cfg.quality = *q;
    }
    if (seed) cfg.rng_seed = *seed;
    if (duration) cfg.duration_s = *duration;
    return cfg;
}

struct PyAssignment {
    double total_utility = 0.0;
    std::vector<py::dict> selections;
    bool valid = true;
};

PyAssignment solve_scenario(const Scenario& sc, const std::string& algorithm,
                            const std::string& quality, std::optional<std::uint64_t> seed,
                            bool prune) {
    SimConfig cfg = config_from_kwargs(sc, algorithm, "", quality, seed, std::nullopt);
    cfg.prune = prune;
    const ProblemInstance pi = initial_snapshot(sc, cfg);
    const InstancePool pool = enumerate_instances(pi, cfg.prune);
    const Assignment asg = run_algorithm(cfg.algorithm, pool, pi);
    PyAssignment out;
    out.total_utility = asg.total_utility;
    out.valid = validate(asg, pi).empty();
    for (const auto& sel : asg.selections) {
        py::dict d;
        d["task_id"] = pi.tasks()[static_cast<std::size_t>(sel.task)].id;
        d["rsu_id"] = pi.rsus()[static_cast<std::size_t>(sel.rsu)].id;
        d["rbs"] = sel.rbs;
        d["cus"] = sel.cus;
        d["utility_js"] = sel.utility;
        out.selections.push_back(std::move(d));
    }
    return out;
}

Metrics simulate_scenario(const Scenario& sc, const std::string& algorithm,
                          const std::string& mode, const std::string& quality,
                          std::optional<std::uint64_t> seed, std::optional<double> duration) {
    const SimConfig cfg = config_from_kwargs(sc, algorithm, mode, quality, seed, duration);
    return run_simulation(sc, cfg).metrics;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "deadline-constrained offloading scheduler and VEC simulator";
    m.attr("__version__") = kCodeVersion;

    py::register_exception<ScenarioError>(m, "ScenarioError");

    py::class_<Scenario>(m, "Scenario")
        .def_property_readonly("num_tasks",
                               [](const Scenario& sc) { return sc.tasks.size(); })
        .def_property_readonly("num_rsus", [](const Scenario& sc) { return sc.rsus.size(); })
        .def_property_readonly("num_vehicles",
                               [](const Scenario& sc) { return sc.traces.size(); })
        .def("to_json", &scenario_to_json);

    py::class_<PyAssignment>(m, "Assignment")
        .def_readonly("total_utility", &PyAssignment::total_utility)
        .def_readonly("selections", &PyAssignment::selections)
        .def_readonly("valid", &PyAssignment::valid);

    py::class_<CycleStats>(m, "CycleStats")
        .def_readonly("t_start", &CycleStats::t_start)
        .def_readonly("predicted_js", &CycleStats::predicted_js)
        .def_readonly("measured_js", &CycleStats::measured_js)
        .def_readonly("offloaded_jobs", &CycleStats::offloaded_jobs)
        .def_readonly("local_jobs", &CycleStats::local_jobs)
        .def_readonly("suspensions", &CycleStats::suspensions);

    py::class_<Metrics>(m, "Metrics")
        .def_readonly("predicted_js", &Metrics::predicted_js)
        .def_readonly("measured_js", &Metrics::measured_js)
        .def_readonly("offloaded_jobs_per_s", &Metrics::offloaded_jobs_per_s)
        .def_readonly("offloaded_jobs", &Metrics::offloaded_jobs)
        .def_readonly("local_jobs", &Metrics::local_jobs)
        .def_readonly("suspensions", &Metrics::suspensions)
        .def_readonly("resumptions", &Metrics::resumptions)
        .def_readonly("deadline_misses", &Metrics::deadline_misses)
        .def_readonly("cycles", &Metrics::cycles);

    py::class_<CertifyReport>(m, "CertifyReport")
        .def_readonly("trials", &CertifyReport::trials)
        .def_readonly("ratio_samples", &CertifyReport::ratio_samples)
        .def_readonly("min_ratio", &CertifyReport::min_ratio)
        .def_readonly("mean_ratio", &CertifyReport::mean_ratio)
        .def_readonly("bound_violations", &CertifyReport::bound_violations)
        .def_readonly("feasibility_violations", &CertifyReport::feasibility_violations)
        .def_readonly("lps_checked", &CertifyReport::lps_checked)
        .def_readonly("lp_violations", &CertifyReport::lp_violations);

    m.def("load_scenario", &load_scenario, py::arg("path"));
    m.def("save_scenario", &save_scenario, py::arg("scenario"), py::arg("path"));
    m.def(
        "gen_scenario",
        [](int tasks, int rsus, int vehicles, int rbs, int cus, double duration, double area,
           double radius, std::uint64_t seed) {
            GenDescriptor d;
            d.num_tasks = tasks;
            d.num_rsus = rsus;
            d.num_vehicles = vehicles;
            d.rbs_per_rsu = rbs;
            d.cus_per_rsu = cus;
            d.duration_s = duration;
            d.area_m = area;
            d.coverage_radius_m = radius;
            d.seed = seed;
            return gen_scenario(d);
        },
        py::arg("tasks") = 80, py::arg("rsus") = 15, py::arg("vehicles") = 0,
        py::arg("rbs") = 270, py::arg("cus") = 16, py::arg("duration") = 60.0,
        py::arg("area") = 1000.0, py::arg("radius") = 500.0, py::arg("seed") = 1);
    m.def("solve", &solve_scenario, py::arg("scenario"), py::arg("algorithm") = "saround",
          py::arg("quality") = "", py::arg("seed") = std::nullopt, py::arg("prune") = true);
    m.def("simulate", &simulate_scenario, py::arg("scenario"), py::arg("algorithm") = "",
          py::arg("mode") = "", py::arg("quality") = "", py::arg("seed") = std::nullopt,
          py::arg("duration") = std::nullopt);
    m.def(
        "certify",
        [](const std::string& target, int trials, std::uint64_t seed) {
            const auto t = parse_certify_target(target);
            if (!t) throw py::value_error("unknown certify target '" + target + "'");
            return certify_ratio(*t, InstanceFamily{}, trials, seed);
        },
        py::arg("target") = "saround", py::arg("trials") = 50, py::arg("seed") = 1);
}
