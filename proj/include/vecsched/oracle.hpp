//
// vecsched -- exact solvers for desk-scale instances, used to certify the
// approximation bounds and to validate pool pruning. Branch-and-bound over
// tasks; each node either assigns one of the task's instances or skips the
// task, pruned by residual capacities and an optimistic utility bound.
//
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vecsched/instances.hpp"
#include "vecsched/rng.hpp"

namespace vecsched {

struct OracleBudget {
    long max_nodes = 10'000'000;
    double max_seconds = 30.0;
};

struct OracleResult {
    double optimum = 0.0;
    std::vector<int> selected;
    long nodes_explored = 0;
    bool exact = true;  // false when the search stopped on budget
};

/// Exact maximum over the whole pool. Deterministic as long as the node
/// budget (not the wall-clock backstop) bounds the search.
OracleResult solve_exact(const InstancePool& pool, const ProblemInstance& instance,
                         const OracleBudget& budget = {});

/// Exact maximum restricted to one RSU under an arbitrary weight vector.
OracleResult solve_exact_single_rsu(const InstancePool& pool, int rsu,
                                    std::span<const double> weights,
                                    const OracleBudget& budget = {});

/// Size caps for the random instances the certification harness solves
/// exactly. Defaults match the desk-scale documentation caps.
struct InstanceFamily {
    int n_min = 2, n_max = 6;  // tasks
    int m_min = 1, m_max = 3;  // RSUs
    int b_min = 2, b_max = 6;  // RBs per RSU
    int c_min = 2, c_max = 4;  // CUs per RSU
};

/// Seeded random problem small enough for the exact solver.
ProblemInstance random_small_instance(const InstanceFamily& family, Rng& rng);

enum class CertifyTarget { SARound, FloorRd, Greedy, Iterative, Game, IdAssign };

std::optional<CertifyTarget> parse_certify_target(const std::string& name);
std::string certify_target_name(CertifyTarget target);

struct CertifyReport {
    CertifyTarget target = CertifyTarget::SARound;
    int trials = 0;
    std::optional<double> bound;  // 1/4 for the rounding solver, 1/3 per-RSU
    int ratio_samples = 0;        // trials with a positive exact optimum
    double min_ratio = 1.0;
    double mean_ratio = 1.0;
    int bound_violations = 0;
    int feasibility_violations = 0;
    long lps_checked = 0;
    long lp_violations = 0;  // basic-solution structure breaches
    long oracle_nodes = 0;
    bool all_exact = true;
    std::vector<std::string> details;  // first few violations, for the report
};

/// Runs `trials` seeded random instances, comparing the target algorithm
/// against the exact optimum, validating every produced assignment, and
/// checking the basic-solution structure of each per-RSU LP it solves
/// (positive structural variables <= tasks + 2; at most four fractional
/// values spanning at most two tasks). FloorRd restricts the family to a
/// single RSU. trials = 0 yields an empty report.
CertifyReport certify_ratio(CertifyTarget target, const InstanceFamily& family, int trials,
                            std::uint64_t seed);

}  // namespace vecsched
