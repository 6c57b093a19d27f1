//
// vecsched -- benchmark solvers. These reconstruct the comparison
// algorithms from their published one-line descriptions (see README);
// internals such as the iterative sub-solvers, the deviation set of the
// game, and the light/heavy threshold are this project's choices.
//
#pragma once

#include "vecsched/instances.hpp"

namespace vecsched {

/// Resource efficiency used by the greedy baseline:
/// psi = u / ((b / B) * (c / C)) with B, C the instance's RSU capacities.
struct EfficiencyScore {
    int instance_id = -1;
    double psi = 0.0;
};

EfficiencyScore efficiency_score(const InstancePool& pool, int instance_id);

/// Scans instances by non-increasing psi (ties by lowest id), selecting
/// whenever the task is free and the RSU still has room.
Assignment solve_greedy(const InstancePool& pool, const ProblemInstance& instance);

/// Alternates a task->RSU reassignment step (each task's resource amounts
/// fixed) with a per-RSU resource redistribution step until a fixed point
/// or max_rounds. Total utility never decreases from round to round.
Assignment solve_iterative(const InstancePool& pool, const ProblemInstance& instance,
                           int max_rounds = 20);

/// Sequential best-response dynamics: apply the single feasible deviation
/// with the largest total-utility gain until none improves or the
/// iteration cap is hit.
Assignment solve_game(const InstancePool& pool, const ProblemInstance& instance,
                      int max_iters = 0 /* 0 -> 10 * num tasks */);

/// Classifies instances as light or heavy at half the RSU capacity, runs a
/// local-ratio pass over the lights, then fits heavies on the residual.
Assignment solve_id_assign(const InstancePool& pool, const ProblemInstance& instance);

}  // namespace vecsched
