#include "vecsched/solve.hpp"

#include "vecsched/baselines.hpp"
#include "vecsched/saround.hpp"

namespace vecsched {

std::optional<Algorithm> parse_algorithm(const std::string& name) {
    if (name == "saround") return Algorithm::SARound;
    if (name == "greedy") return Algorithm::Greedy;
    if (name == "iterative") return Algorithm::Iterative;
    if (name == "game") return Algorithm::Game;
    if (name == "idassign") return Algorithm::IdAssign;
    return std::nullopt;
}

std::string algorithm_name(Algorithm algorithm) {
    switch (algorithm) {
        case Algorithm::SARound: return "saround";
        case Algorithm::Greedy: return "greedy";
        case Algorithm::Iterative: return "iterative";
        case Algorithm::Game: return "game";
        case Algorithm::IdAssign: return "idassign";
    }
    return "unknown";
}

Assignment run_algorithm(Algorithm algorithm, const InstancePool& pool,
                         const ProblemInstance& instance) {
    switch (algorithm) {
        case Algorithm::SARound: return saround(pool, instance);
        case Algorithm::Greedy: return solve_greedy(pool, instance);
        case Algorithm::Iterative: return solve_iterative(pool, instance);
        case Algorithm::Game: return solve_game(pool, instance);
        case Algorithm::IdAssign: return solve_id_assign(pool, instance);
    }
    return {};
}

}  // namespace vecsched
