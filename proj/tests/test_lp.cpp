#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>

#include "helpers.hpp"
#include "vecsched/lp.hpp"
#include "vecsched/oracle.hpp"
#include "vecsched/rng.hpp"

using namespace vecsched;
using namespace vecsched::testing;

namespace {

LinearProgram lp2(std::vector<double> obj, std::vector<std::pair<std::vector<double>, double>> rows) {
    LinearProgram lp;
    lp.num_vars = static_cast<int>(obj.size());
    lp.objective = std::move(obj);
    for (auto& [coeffs, rhs] : rows) lp.rows.push_back({std::move(coeffs), rhs});
    return lp;
}

bool rows_satisfied(const LinearProgram& lp, const BasicSolution& sol) {
    for (const auto& row : lp.rows) {
        double lhs = 0.0, norm = 1.0;
        for (int j = 0; j < lp.num_vars; ++j) {
            lhs += row.coeffs[static_cast<std::size_t>(j)] * sol.values[static_cast<std::size_t>(j)];
            norm = std::max(norm, std::abs(row.coeffs[static_cast<std::size_t>(j)]));
        }
        if ((lhs - row.rhs) / norm > 1e-9) return false;
    }
    for (double v : sol.values)
        if (v < -1e-9) return false;
    return true;
}

}  // namespace

TEST_CASE("textbook maximization reaches the hand-computed vertex") {
    const auto lp = lp2({3.0, 2.0}, {{{1.0, 1.0}, 4.0}, {{1.0, 0.0}, 2.0}});
    const BasicSolution sol = solve_lp(lp);
    CHECK(sol.objective_value == doctest::Approx(10.0));
    CHECK(sol.values[0] == doctest::Approx(2.0));
    CHECK(sol.values[1] == doctest::Approx(2.0));
    CHECK(rows_satisfied(lp, sol));
}

TEST_CASE("the symmetric two-task relaxation lands on the fractional vertex") {
    // the B = C = 2 cross shape: both variables end at 2/3
    const auto lp = lp2({6.0, 6.0}, {{{2.0, 1.0}, 2.0},
                                     {{1.0, 2.0}, 2.0},
                                     {{1.0, 0.0}, 1.0},
                                     {{0.0, 1.0}, 1.0}});
    const BasicSolution sol = solve_lp(lp);
    CHECK(sol.objective_value == doctest::Approx(8.0));
    CHECK(sol.values[0] == doctest::Approx(2.0 / 3.0));
    CHECK(sol.values[1] == doctest::Approx(2.0 / 3.0));
    CHECK(lp_is_fractional(sol.values[0]));
    CHECK(lp_is_fractional(sol.values[1]));
}

TEST_CASE("zero objective stays at the origin") {
    const auto lp = lp2({0.0, 0.0}, {{{1.0, 1.0}, 4.0}});
    const BasicSolution sol = solve_lp(lp);
    CHECK(sol.objective_value == 0.0);
    CHECK(sol.values[0] == 0.0);
    CHECK(sol.values[1] == 0.0);
}

TEST_CASE("degenerate and invalid programs") {
    CHECK(solve_lp(LinearProgram{}).objective_value == 0.0);
    CHECK_THROWS_AS(solve_lp(lp2({1.0}, {{{1.0, 2.0}, 1.0}})), std::invalid_argument);
    CHECK_THROWS_AS(solve_lp(lp2({1.0}, {{{1.0}, -1.0}})), std::invalid_argument);
    CHECK_THROWS_AS(solve_lp(lp2({1.0}, {})), std::runtime_error);  // unbounded
}

TEST_CASE("solves are bit-identical across repeated calls") {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = static_cast<int>(rng.uniform_int(1, 12));
        const int m = static_cast<int>(rng.uniform_int(1, 6));
        LinearProgram lp;
        lp.num_vars = n;
        for (int j = 0; j < n; ++j) lp.objective.push_back(rng.uniform(0.0, 5.0));
        for (int i = 0; i < m; ++i) {
            LinearProgram::Row row;
            for (int j = 0; j < n; ++j)
                row.coeffs.push_back(rng.bernoulli(0.4) ? rng.uniform(0.1, 3.0) : 0.0);
            row.rhs = rng.uniform(0.5, 6.0);
            lp.rows.push_back(row);
        }
        // bound every variable so the program cannot be unbounded
        for (int j = 0; j < n; ++j) {
            LinearProgram::Row cap;
            cap.coeffs.assign(static_cast<std::size_t>(n), 0.0);
            cap.coeffs[static_cast<std::size_t>(j)] = 1.0;
            cap.rhs = 1.0;
            lp.rows.push_back(cap);
        }

        const BasicSolution a = solve_lp(lp);
        const BasicSolution b = solve_lp(lp);
        CHECK(rows_satisfied(lp, a));
        REQUIRE(a.values.size() == b.values.size());
        CHECK(std::memcmp(a.values.data(), b.values.data(), a.values.size() * sizeof(double)) == 0);
        CHECK(a.objective_value == b.objective_value);
        CHECK(a.basis == b.basis);

        // basicness: positive structural variables never outnumber the rows
        int positives = 0;
        for (double v : a.values) positives += v > kLpSnapTol;
        CHECK(positives <= static_cast<int>(lp.rows.size()));
    }
}

TEST_CASE("build_rsu_lp assembles the single-RSU relaxation") {
    // empty slice
    const InstancePool empty = hand_pool(1, {{4, 4}}, {});
    std::vector<double> no_weights;
    const RsuLp none = build_rsu_lp(empty, 0, no_weights);
    CHECK(none.lp.num_vars == 0);
    CHECK(solve_lp(none.lp).objective_value == 0.0);
    CHECK_THROWS_AS(build_rsu_lp(empty, 3, no_weights), std::out_of_range);

    // two tasks, one instance each: rows are RB, CU, and one choice row per task
    const InstancePool cross = hand_pool(
        2, {{2, 2}}, {{0, 0, 2, 1, 6.0}, {1, 0, 1, 2, 6.0}});
    std::vector<double> w = {6.0, 6.0};
    const RsuLp rlp = build_rsu_lp(cross, 0, w);
    REQUIRE(rlp.lp.num_vars == 2);
    const LinearProgram dense = rlp.lp.dense();
    REQUIRE(dense.rows.size() == 4);
    CHECK(rlp.num_tasks == 2);
    CHECK(dense.rows[0].coeffs == std::vector<double>{2.0, 1.0});
    CHECK(dense.rows[0].rhs == 2.0);
    CHECK(dense.rows[1].coeffs == std::vector<double>{1.0, 2.0});
    CHECK(dense.rows[1].rhs == 2.0);
    CHECK(solve_lp(rlp.lp).objective_value == doctest::Approx(8.0));
    // the dense and sparse paths agree
    CHECK(solve_lp(dense).objective_value == solve_lp(rlp.lp).objective_value);

    // one task with two retained instances: a single choice row with two ones
    const InstancePool multi = hand_pool(1, {{4, 4}}, {{0, 0, 1, 1, 2.0}, {0, 0, 2, 1, 3.0}});
    std::vector<double> w2 = {2.0, 3.0};
    const RsuLp mlp = build_rsu_lp(multi, 0, w2);
    const LinearProgram mdense = mlp.lp.dense();
    REQUIRE(mdense.rows.size() == 3);
    CHECK(mdense.rows[2].coeffs == std::vector<double>{1.0, 1.0});
    CHECK(mdense.rows[2].rhs == 1.0);

    // non-positive weights are excluded from the program
    std::vector<double> w3 = {-1.0, 3.0};
    CHECK(build_rsu_lp(multi, 0, w3).lp.num_vars == 1);
}

TEST_CASE("LP relaxation dominates the exact single-RSU optimum") {
    Rng rng(29);
    InstanceFamily family;
    family.m_min = family.m_max = 1;
    for (int trial = 0; trial < 60; ++trial) {
        const ProblemInstance pi = random_small_instance(family, rng);
        const InstancePool pool = enumerate_instances(pi, false);
        std::vector<double> weights(pool.size());
        for (std::size_t i = 0; i < pool.size(); ++i) weights[i] = pool.all[i].utility;
        const RsuLp rlp = build_rsu_lp(pool, 0, weights);
        if (rlp.lp.num_vars == 0) continue;
        const double lp_value = solve_lp(rlp.lp).objective_value;
        const OracleResult exact = solve_exact_single_rsu(pool, 0, weights);
        CHECK(lp_value >= exact.optimum - 1e-9);
    }
}

TEST_CASE("basic solutions honor the structural bounds on random relaxations") {
    Rng rng(31);
    InstanceFamily family;
    long checked = 0;
    for (int trial = 0; trial < 120; ++trial) {
        const ProblemInstance pi = random_small_instance(family, rng);
        const InstancePool pool = enumerate_instances(pi, false);
        std::vector<double> weights(pool.size());
        for (std::size_t i = 0; i < pool.size(); ++i) weights[i] = pool.all[i].utility;
        for (int r = 0; r < static_cast<int>(pi.rsus().size()); ++r) {
            const RsuLp rlp = build_rsu_lp(pool, r, weights);
            if (rlp.lp.num_vars == 0) continue;
            const BasicSolution sol = solve_lp(rlp.lp);
            ++checked;

            int positives = 0, fractionals = 0;
            std::vector<int> frac_tasks;
            for (int v = 0; v < rlp.lp.num_vars; ++v) {
                positives += sol.values[static_cast<std::size_t>(v)] > kLpSnapTol;
                if (lp_is_fractional(sol.values[static_cast<std::size_t>(v)])) {
                    ++fractionals;
                    frac_tasks.push_back(rlp.var_task[static_cast<std::size_t>(v)]);
                }
            }
            std::sort(frac_tasks.begin(), frac_tasks.end());
            frac_tasks.erase(std::unique(frac_tasks.begin(), frac_tasks.end()), frac_tasks.end());
            CHECK(positives <= rlp.num_tasks + 2);
            CHECK(fractionals <= 4);
            CHECK(frac_tasks.size() <= 2);
            CHECK(rows_satisfied(rlp.lp.dense(), sol));
        }
    }
    CHECK(checked >= 100);
}
