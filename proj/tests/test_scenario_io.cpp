#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "vecsched/scenario.hpp"
#include "vecsched/sim.hpp"

using namespace vecsched;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    static int counter = 0;
    fs::path dir = fs::temp_directory_path() /
                   ("vecsched_io_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

GenDescriptor small_descriptor() {
    GenDescriptor d;
    d.num_tasks = 10;
    d.num_rsus = 2;
    d.rbs_per_rsu = 40;
    d.cus_per_rsu = 8;
    d.duration_s = 20.0;
    d.seed = 7;
    return d;
}

}  // namespace

TEST_CASE("generation is deterministic and schema-valid") {
    const Scenario a = gen_scenario(small_descriptor());
    const Scenario b = gen_scenario(small_descriptor());
    CHECK(scenario_to_json(a) == scenario_to_json(b));

    // generated output always loads back
    const Scenario reloaded = scenario_from_json(scenario_to_json(a));
    CHECK(scenario_to_json(reloaded) == scenario_to_json(a));
    CHECK(reloaded.tasks.size() == 10);
    CHECK(reloaded.rsus.size() == 2);
    CHECK(reloaded.traces.size() == 10);
}

TEST_CASE("generated periods come from the three standard rates") {
    const Scenario sc = gen_scenario(small_descriptor());
    const std::set<double> allowed = {0.05, 0.067, 0.1};
    for (const auto& t : sc.tasks) CHECK(allowed.count(t.period_s) == 1);
}

TEST_CASE("generated execution profiles are non-increasing in CUs") {
    const Scenario sc = gen_scenario(small_descriptor());
    CHECK_FALSE(sc.profiles.check_invariants().has_value());
    // exhaustive scan per (service, hardware)
    double prev = 1e9;
    const std::string* prev_svc = nullptr;
    const std::string* prev_hw = nullptr;
    for (const auto& [key, time] : sc.profiles.entries()) {
        CHECK(time > 0.0);
        if (prev_svc && std::get<0>(key) == *prev_svc && std::get<1>(key) == *prev_hw)
            CHECK(time <= prev);
        prev_svc = &std::get<0>(key);
        prev_hw = &std::get<1>(key);
        prev = time;
    }
}

TEST_CASE("the shipped example scenario loads with the documented shape") {
    const Scenario sc = load_scenario(std::string(VECSCHED_SCENARIO_DIR) + "/example.json");
    CHECK(sc.rsus.size() == 15);
    CHECK(sc.traces.size() == 80);
    CHECK(sc.tasks.size() >= 80);
    for (const auto& rsu : sc.rsus) {
        CHECK(rsu.total_rbs == 270);
        CHECK(rsu.total_cus == 16);
    }
}

TEST_CASE("scenario save/load round-trips through a file") {
    const fs::path dir = temp_dir();
    const Scenario sc = gen_scenario(small_descriptor());
    save_scenario(sc, (dir / "scenario.json").string());
    const Scenario back = load_scenario((dir / "scenario.json").string());
    CHECK(scenario_to_json(back) == scenario_to_json(sc));
}

TEST_CASE("loader reports precise failures") {
    SUBCASE("missing profile rows for a referenced service") {
        Scenario sc = gen_scenario(small_descriptor());
        sc.tasks[0].service_type = "svc_missing";
        CHECK_THROWS_AS(scenario_from_json(scenario_to_json(sc)), CrossRefError);
    }
    SUBCASE("missing trace for a referenced vehicle") {
        Scenario sc = gen_scenario(small_descriptor());
        sc.tasks[0].vehicle_id = "veh_unknown";
        CHECK_THROWS_AS(scenario_from_json(scenario_to_json(sc)), CrossRefError);
    }
    SUBCASE("unknown format major is rejected") {
        std::string text = scenario_to_json(gen_scenario(small_descriptor()));
        const auto pos = text.find("\"format_version\": \"1.");
        REQUIRE(pos != std::string::npos);
        text.replace(pos, 22, "\"format_version\": \"9.");
        CHECK_THROWS_AS(scenario_from_json(text), SchemaError);
    }
    SUBCASE("syntactically broken input is a parse error") {
        CHECK_THROWS_AS(scenario_from_json("{ not json"), ParseError);
    }
    SUBCASE("missing required field is a schema error") {
        CHECK_THROWS_AS(scenario_from_json(R"({"format_version":"1.0","tasks":[]})"),
                        SchemaError);
    }
    SUBCASE("mk window must be sane") {
        Scenario sc = gen_scenario(small_descriptor());
        std::string text = scenario_to_json(sc);
        // force an invalid window on the first mk task, if any; otherwise craft one
        Scenario bad = sc;
        bad.tasks[0].criticality = Criticality::MkConstrained;
        bad.tasks[0].mk_m = 5;
        bad.tasks[0].mk_k = 2;
        CHECK_THROWS_AS(scenario_from_json(scenario_to_json(bad)), SchemaError);
    }
}

TEST_CASE("trace files round-trip and reject unsorted rows") {
    const fs::path dir = temp_dir();
    const Scenario sc = gen_scenario(small_descriptor());
    const fs::path trace_path = dir / "traces.csv";
    write_trace_file(sc.traces, trace_path.string());
    const auto back = load_trace_file(trace_path.string());
    REQUIRE(back.size() == sc.traces.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].vehicle_id == sc.traces[i].vehicle_id);
        REQUIRE(back[i].points.size() == sc.traces[i].points.size());
        for (std::size_t j = 0; j < back[i].points.size(); ++j) {
            CHECK(back[i].points[j].time_s == sc.traces[i].points[j].time_s);
            CHECK(back[i].points[j].x_m == sc.traces[i].points[j].x_m);
        }
    }

    // scenario referencing an external trace file by relative path
    {
        nlohmann::json root = nlohmann::json::parse(scenario_to_json(sc));
        root["traces"] = nlohmann::json{{"path", "traces.csv"}};
        std::ofstream(dir / "scenario_ref.json") << root.dump(2);
        const Scenario loaded = load_scenario((dir / "scenario_ref.json").string());
        CHECK(loaded.traces.size() == sc.traces.size());
    }

    SUBCASE("unsorted rows carry the row number") {
        const fs::path bad = dir / "bad.csv";
        std::ofstream(bad) << "time_s,vehicle_id,x_m,y_m\n"
                              "0,veh_a,0,0\n"
                              "2,veh_a,5,0\n"
                              "1,veh_a,9,0\n";
        try {
            load_trace_file(bad.string());
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find("row 4") != std::string::npos);
        }
    }

    SUBCASE("bad header") {
        const fs::path bad = dir / "hdr.csv";
        std::ofstream(bad) << "time,vehicle,x,y\n";
        CHECK_THROWS_AS(load_trace_file(bad.string()), ParseError);
    }
}

TEST_CASE("trace interpolation is piecewise linear") {
    VehicleTrace tr{"v", {{0.0, 0.0, 0.0}, {10.0, 100.0, 50.0}, {20.0, 100.0, 100.0}}};
    auto mid = trace_position(tr, 5.0);
    REQUIRE(mid.has_value());
    CHECK(mid->first == doctest::Approx(50.0));
    CHECK(mid->second == doctest::Approx(25.0));
    auto at_point = trace_position(tr, 10.0);
    CHECK(at_point->first == doctest::Approx(100.0));
    CHECK_FALSE(trace_position(tr, -1.0).has_value());
    CHECK_FALSE(trace_position(tr, 20.5).has_value());
}

TEST_CASE("results round-trip losslessly and rows match the cycle count") {
    const Scenario sc = gen_scenario(small_descriptor());
    SimConfig cfg = sc.sim;
    cfg.duration_s = 20.0;
    cfg.schedule_interval_s = 5.0;
    const SimResult sim = run_simulation(sc, cfg);

    RunResult result;
    result.manifest.seed = cfg.rng_seed;
    result.manifest.config_hash = config_hash(sc, cfg);
    result.manifest.algorithm = algorithm_name(cfg.algorithm);
    result.manifest.mode = mode_name(cfg.mode);
    result.manifest.quality = quality_name(cfg.quality);
    result.metrics = sim.metrics;

    CHECK(result.metrics.cycles.size() ==
          static_cast<std::size_t>(cfg.duration_s / cfg.schedule_interval_s));

    const fs::path dir = temp_dir();
    const fs::path path = dir / "results.json";
    write_results(result, path.string());
    const RunResult back = read_results(path.string());

    CHECK(back.manifest.config_hash == result.manifest.config_hash);
    CHECK(back.manifest.seed == result.manifest.seed);
    CHECK(back.metrics.predicted_js == result.metrics.predicted_js);
    CHECK(back.metrics.measured_js == result.metrics.measured_js);
    REQUIRE(back.metrics.cycles.size() == result.metrics.cycles.size());
    double mean = 0.0;
    for (std::size_t i = 0; i < back.metrics.cycles.size(); ++i) {
        CHECK(back.metrics.cycles[i].predicted_js == result.metrics.cycles[i].predicted_js);
        CHECK(back.metrics.cycles[i].measured_js == result.metrics.cycles[i].measured_js);
        mean += back.metrics.cycles[i].predicted_js;
    }
    mean /= static_cast<double>(back.metrics.cycles.size());
    CHECK(mean == doctest::Approx(back.metrics.predicted_js).epsilon(1e-9));

    // byte-identical rewrite
    write_results(back, (dir / "results2.json").string());
    CHECK(slurp(path) == slurp(dir / "results2.json"));
}

TEST_CASE("event logs are written verbatim") {
    const fs::path dir = temp_dir();
    write_event_log({"a", "b"}, (dir / "events.log").string());
    CHECK(slurp(dir / "events.log") == "a\nb\n");
}
