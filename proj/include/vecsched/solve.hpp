//
// vecsched -- algorithm selection shared by the CLI, simulator, and
// bindings.
//
#pragma once

#include <optional>
#include <string>

#include "vecsched/instances.hpp"

namespace vecsched {

enum class Algorithm { SARound, Greedy, Iterative, Game, IdAssign };

std::optional<Algorithm> parse_algorithm(const std::string& name);
std::string algorithm_name(Algorithm algorithm);

/// Dispatches to the chosen solver with its default parameters.
Assignment run_algorithm(Algorithm algorithm, const InstancePool& pool,
                         const ProblemInstance& instance);

}  // namespace vecsched
