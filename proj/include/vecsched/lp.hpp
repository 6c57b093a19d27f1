//
// vecsched -- small dense LP solver returning an optimal BASIC feasible
// solution (max c.x s.t. Ax <= b, x >= 0, b >= 0), plus the per-RSU LP
// builder used by the rounding solver.
//
// The rounding step depends on basicness: at most m structural variables
// positive for m functional rows, and the fractional support limited the
// way vertex solutions are. An interior-point method would not do.
//
#pragma once

#include <span>
#include <vector>

#include "vecsched/instances.hpp"

namespace vecsched {

struct LinearProgram {
    struct Row {
        std::vector<double> coeffs;  // length num_vars
        double rhs = 0.0;            // >= 0
    };
    int num_vars = 0;
    std::vector<double> objective;  // length num_vars, maximized
    std::vector<Row> rows;
};

/// Column-compressed form of the same program. The per-RSU relaxations have
/// three nonzeros per column, so this is what the solver consumes; the
/// dense form exists for hand-written programs and inspection.
struct SparseLp {
    int num_vars = 0;
    int num_rows = 0;
    std::vector<double> objective;  // length num_vars
    std::vector<double> rhs;        // length num_rows, >= 0
    std::vector<int> col_start;     // length num_vars + 1
    std::vector<int> entry_row;
    std::vector<double> entry_value;

    LinearProgram dense() const;
};

SparseLp sparsify(const LinearProgram& lp);

struct BasicSolution {
    std::vector<double> values;  // structural variables only, length num_vars
    double objective_value = 0.0;
    std::vector<int> basis;  // variable index per row; slacks are num_vars + row
};

/// Values within snap distance of 0 or 1 are treated as integral; anything
/// in between is fractional. Simplex noise must not leak into rounding.
inline constexpr double kLpPivotTol = 1e-9;
inline constexpr double kLpSnapTol = 1e-7;

inline bool lp_is_one(double v) { return v >= 1.0 - kLpSnapTol; }
inline bool lp_is_zero(double v) { return v <= kLpSnapTol; }
inline bool lp_is_fractional(double v) { return !lp_is_zero(v) && !lp_is_one(v); }

/// Warm-start hint: make structural variable `first` basic in row `second`.
/// Accepted only when the columns admit a closed-form feasible basis;
/// otherwise the solve silently starts from the slack basis.
using CrashPair = std::pair<int, int>;

/// Primal revised simplex with maintained reduced costs, starting from the
/// slack basis (origin is feasible since rhs >= 0) or a crash vertex.
/// Largest-coefficient pivoting for a bounded number of iterations, then
/// Bland's rule, so the solve always terminates without cycling. Throws
/// std::invalid_argument on dimension mismatch or negative rhs and
/// std::runtime_error on an unbounded program.
BasicSolution solve_lp(const LinearProgram& lp, std::span<const CrashPair> crash = {});
BasicSolution solve_lp(const SparseLp& lp, std::span<const CrashPair> crash = {});

/// The single-RSU relaxation built by the rounding solver: one variable per
/// retained instance of the RSU, an RB row, a CU row, and one
/// multiple-choice row per represented task (emitted even for singletons,
/// as a z <= 1 cap, to keep the functional-constraint count exact).
struct RsuLp {
    SparseLp lp;
    std::vector<int> var_instance;  // LP variable -> instance id
    std::vector<int> var_task;      // LP variable -> task index
    std::vector<int> var_row;       // LP variable -> its multiple-choice row
    int num_tasks = 0;              // distinct tasks represented
};

/// Builds the relaxation for one RSU. Instances with weight <= 0 are left
/// out; an optimal solution would zero them anyway, and dropping them keeps
/// the LP small. Throws std::out_of_range for an unknown RSU index.
RsuLp build_rsu_lp(const InstancePool& pool, int rsu, std::span<const double> weights);

/// Deterministic greedy packing used to warm-start the relaxation near its
/// optimum; pairs are consumed by solve_lp.
std::vector<CrashPair> greedy_crash_vertex(const InstancePool& pool, const RsuLp& rlp);

}  // namespace vecsched
