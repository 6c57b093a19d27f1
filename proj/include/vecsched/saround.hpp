//
// vecsched -- the LP-rounding approximation solver.
//
// One layer per RSU: solve that RSU's LP relaxation, floor the fractional
// entries, and keep the better of the floored set and the single
// heaviest instance. The layer's picks are then charged against the rest
// of the pool through a local-ratio weight decomposition, and the
// remaining layers run on the marginal weights. The combined selection is
// a 1/4-approximation of the exact optimum; each per-RSU rounding step is
// a 1/3-approximation of its single-RSU subproblem.
//
#pragma once

#include <span>
#include <utility>
#include <vector>

#include "vecsched/lp.hpp"

namespace vecsched {

/// Rounds the single-RSU relaxation: returns either the floored integral
/// part of an optimal basic solution or the heaviest single instance,
/// whichever weighs more (ties keep the floored set; instance ties go to
/// the lowest id). Empty when the RSU has no positive-weight instance.
/// The result always fits the RSU's capacities with one instance per task.
std::vector<int> floor_rd(const InstancePool& pool, int rsu, std::span<const double> weights);

/// Local-ratio split w = w1 + w2. On the RSU's own instances w1 takes
/// everything; siblings of a selected instance (same task, other RSU)
/// carry the selected weight in w1 and keep only the marginal w(l')-w(l)
/// in w2 (possibly negative); everything else stays in w2. The identity
/// w1 + w2 = w holds exactly, elementwise.
std::pair<std::vector<double>, std::vector<double>> decompose_weights(
    std::span<const double> weights, const InstancePool& pool, int rsu,
    std::span<const int> selected);

/// Full solve: layers run over RSUs in ascending id order; the unwind drops
/// a layer pick whenever a deeper layer already serves the same task. The
/// reported utility always uses the base utilities, never layer weights.
Assignment saround(const InstancePool& pool, const ProblemInstance& instance);

}  // namespace vecsched
