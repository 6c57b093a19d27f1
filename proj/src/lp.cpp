#include "vecsched/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vecsched {

LinearProgram SparseLp::dense() const {
    LinearProgram out;
    out.num_vars = num_vars;
    out.objective = objective;
    out.rows.assign(static_cast<std::size_t>(num_rows),
                    {std::vector<double>(static_cast<std::size_t>(num_vars), 0.0), 0.0});
    for (int i = 0; i < num_rows; ++i) out.rows[static_cast<std::size_t>(i)].rhs = rhs[static_cast<std::size_t>(i)];
    for (int j = 0; j < num_vars; ++j)
        for (int e = col_start[static_cast<std::size_t>(j)];
             e < col_start[static_cast<std::size_t>(j) + 1]; ++e)
            out.rows[static_cast<std::size_t>(entry_row[static_cast<std::size_t>(e)])]
                .coeffs[static_cast<std::size_t>(j)] = entry_value[static_cast<std::size_t>(e)];
    return out;
}

SparseLp sparsify(const LinearProgram& lp) {
    if (static_cast<int>(lp.objective.size()) != lp.num_vars)
        throw std::invalid_argument("objective length does not match num_vars");
    for (const auto& r : lp.rows)
        if (static_cast<int>(r.coeffs.size()) != lp.num_vars)
            throw std::invalid_argument("constraint length does not match num_vars");

    SparseLp out;
    out.num_vars = lp.num_vars;
    out.num_rows = static_cast<int>(lp.rows.size());
    out.objective = lp.objective;
    for (const auto& r : lp.rows) out.rhs.push_back(r.rhs);
    out.col_start.assign(static_cast<std::size_t>(lp.num_vars) + 1, 0);
    for (int j = 0; j < lp.num_vars; ++j) {
        for (int i = 0; i < out.num_rows; ++i) {
            const double a = lp.rows[static_cast<std::size_t>(i)].coeffs[static_cast<std::size_t>(j)];
            if (a != 0.0) {
                out.entry_row.push_back(i);
                out.entry_value.push_back(a);
            }
        }
        out.col_start[static_cast<std::size_t>(j) + 1] = static_cast<int>(out.entry_row.size());
    }
    return out;
}

namespace {

class Simplex {
public:
    Simplex(const SparseLp& lp, std::span<const CrashPair> crash)
        : lp_(lp), n_(lp.num_vars), m_(lp.num_rows) {
        for (double r : lp.rhs)
            if (r < 0.0) throw std::invalid_argument("negative rhs");
        slack_basis();
        if (!crash.empty()) try_crash(crash);
        reset_duals();
    }

    BasicSolution solve() {
        const int dantzig_limit = 50 + 20 * (m_ + 16);
        const long max_pivots = 10000L + 400L * (m_ + n_);
        long pivots = 0;
        std::vector<double> alpha(static_cast<std::size_t>(m_));
        std::vector<double> rho(static_cast<std::size_t>(n_ + m_));

        for (;;) {
            if (pivots > max_pivots)
                throw std::runtime_error("simplex failed to terminate (internal error)");
            if (pivots > 0 && pivots % 128 == 0) {
                refactorize();
                reset_duals();
            }

            // pricing on maintained reduced costs: largest first, Bland's
            // rule once the iteration budget for it is spent
            const bool bland = pivots >= dantzig_limit;
            int entering = -1;
            double best = kLpPivotTol;
            for (int j = 0; j < n_ + m_; ++j) {
                if (in_basis_[static_cast<std::size_t>(j)]) continue;
                const double dj = d_[static_cast<std::size_t>(j)];
                if (dj > best) {
                    entering = j;
                    if (bland) break;
                    best = dj;
                }
            }
            if (entering < 0) break;  // optimal

            compute_column(entering, alpha);

            // ratio test; ties go to the smallest basis variable index
            int leave = -1;
            double best_ratio = 0.0;
            for (int i = 0; i < m_; ++i) {
                const double a = alpha[static_cast<std::size_t>(i)];
                if (a <= kLpPivotTol) continue;
                const double ratio = xb_[static_cast<std::size_t>(i)] / a;
                if (leave < 0 || ratio < best_ratio - kLpPivotTol ||
                    (ratio < best_ratio + kLpPivotTol &&
                     basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)]))
                {
                    leave = i;
                    best_ratio = ratio;
                }
            }
            if (leave < 0) throw std::runtime_error("unbounded LP (internal error)");

            update_duals(entering, leave, alpha, rho);
            pivot(entering, leave, alpha);
            ++pivots;
        }
        return extract();
    }

private:
    std::size_t idx(int r, int c) const {
        return static_cast<std::size_t>(r) * static_cast<std::size_t>(m_) +
               static_cast<std::size_t>(c);
    }

    void slack_basis() {
        basis_.resize(static_cast<std::size_t>(m_));
        in_basis_.assign(static_cast<std::size_t>(n_ + m_), 0);
        for (int i = 0; i < m_; ++i) {
            basis_[static_cast<std::size_t>(i)] = n_ + i;
            in_basis_[static_cast<std::size_t>(n_ + i)] = 1;
        }
        binv_.assign(static_cast<std::size_t>(m_) * static_cast<std::size_t>(m_), 0.0);
        for (int i = 0; i < m_; ++i) binv_[idx(i, i)] = 1.0;
        xb_ = lp_.rhs;
    }

    // Installs a warm-start vertex when the proposed columns allow the
    // closed-form inverse: each crash column must touch no crash row other
    // than its own. Falls back to the slack basis otherwise.
    void try_crash(std::span<const CrashPair> crash) {
        std::vector<char> crash_row(static_cast<std::size_t>(m_), 0);
        for (const auto& [var, row] : crash) {
            if (var < 0 || var >= n_ || row < 0 || row >= m_) return;
            if (crash_row[static_cast<std::size_t>(row)]) return;  // duplicate row
            crash_row[static_cast<std::size_t>(row)] = 1;
        }
        for (const auto& [var, row] : crash) {
            bool own_row_is_unit = false;
            for (int e = lp_.col_start[static_cast<std::size_t>(var)];
                 e < lp_.col_start[static_cast<std::size_t>(var) + 1]; ++e) {
                const int r = lp_.entry_row[static_cast<std::size_t>(e)];
                if (r == row) {
                    own_row_is_unit = lp_.entry_value[static_cast<std::size_t>(e)] == 1.0;
                } else if (crash_row[static_cast<std::size_t>(r)]) {
                    return;  // couples two crash rows: no closed form
                }
            }
            if (!own_row_is_unit) return;
        }

        // B = I + sum_k u_k e_{r_k}^T with u_k supported off the crash rows,
        // so B^-1 = I - sum_k u_k e_{r_k}^T and xB stays cheap to form
        for (const auto& [var, row] : crash) {
            for (int e = lp_.col_start[static_cast<std::size_t>(var)];
                 e < lp_.col_start[static_cast<std::size_t>(var) + 1]; ++e) {
                const int r = lp_.entry_row[static_cast<std::size_t>(e)];
                if (r != row) binv_[idx(r, row)] = -lp_.entry_value[static_cast<std::size_t>(e)];
            }
        }
        // xB = B^-1 rhs, using the sparse perturbation directly
        std::vector<double> xb = lp_.rhs;
        for (const auto& [var, row] : crash) {
            const double z = lp_.rhs[static_cast<std::size_t>(row)];
            for (int e = lp_.col_start[static_cast<std::size_t>(var)];
                 e < lp_.col_start[static_cast<std::size_t>(var) + 1]; ++e) {
                const int r = lp_.entry_row[static_cast<std::size_t>(e)];
                if (r != row)
                    xb[static_cast<std::size_t>(r)] -=
                        lp_.entry_value[static_cast<std::size_t>(e)] * z;
            }
        }
        for (double v : xb) {
            if (v < 0.0) {  // proposed vertex infeasible: fall back
                slack_basis();
                return;
            }
        }
        for (const auto& [var, row] : crash) {
            in_basis_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(row)])] = 0;
            basis_[static_cast<std::size_t>(row)] = var;
            in_basis_[static_cast<std::size_t>(var)] = 1;
        }
        xb_ = std::move(xb);
    }

    // reduced costs from scratch: d = c - c_B B^-1 A
    void reset_duals() {
        std::vector<double> y(static_cast<std::size_t>(m_), 0.0);
        for (int i = 0; i < m_; ++i) {
            const int v = basis_[static_cast<std::size_t>(i)];
            const double cb = v < n_ ? lp_.objective[static_cast<std::size_t>(v)] : 0.0;
            if (cb == 0.0) continue;
            const double* row = &binv_[idx(i, 0)];
            for (int k = 0; k < m_; ++k) y[static_cast<std::size_t>(k)] += cb * row[k];
        }
        d_.assign(static_cast<std::size_t>(n_ + m_), 0.0);
        for (int j = 0; j < n_; ++j) {
            double dj = lp_.objective[static_cast<std::size_t>(j)];
            for (int e = lp_.col_start[static_cast<std::size_t>(j)];
                 e < lp_.col_start[static_cast<std::size_t>(j) + 1]; ++e)
                dj -= y[static_cast<std::size_t>(lp_.entry_row[static_cast<std::size_t>(e)])] *
                      lp_.entry_value[static_cast<std::size_t>(e)];
            d_[static_cast<std::size_t>(j)] = dj;
        }
        for (int i = 0; i < m_; ++i)
            d_[static_cast<std::size_t>(n_ + i)] = -y[static_cast<std::size_t>(i)];
    }

    void compute_column(int var, std::vector<double>& alpha) const {
        if (var >= n_) {
            const int c = var - n_;
            for (int i = 0; i < m_; ++i) alpha[static_cast<std::size_t>(i)] = binv_[idx(i, c)];
            return;
        }
        for (int i = 0; i < m_; ++i) {
            const double* row = &binv_[idx(i, 0)];
            double s = 0.0;
            for (int e = lp_.col_start[static_cast<std::size_t>(var)];
                 e < lp_.col_start[static_cast<std::size_t>(var) + 1]; ++e)
                s += row[lp_.entry_row[static_cast<std::size_t>(e)]] *
                     lp_.entry_value[static_cast<std::size_t>(e)];
            alpha[static_cast<std::size_t>(i)] = s;
        }
    }

    // d'_j = d_j - (d_q / alpha_r) * rho_j with rho the current tableau row r
    void update_duals(int entering, int leave, const std::vector<double>& alpha,
                      std::vector<double>& rho) {
        const double scale =
            d_[static_cast<std::size_t>(entering)] / alpha[static_cast<std::size_t>(leave)];
        if (scale == 0.0) return;
        const double* brow = &binv_[idx(leave, 0)];
        for (int j = 0; j < n_; ++j) {
            double s = 0.0;
            for (int e = lp_.col_start[static_cast<std::size_t>(j)];
                 e < lp_.col_start[static_cast<std::size_t>(j) + 1]; ++e)
                s += brow[lp_.entry_row[static_cast<std::size_t>(e)]] *
                     lp_.entry_value[static_cast<std::size_t>(e)];
            rho[static_cast<std::size_t>(j)] = s;
        }
        for (int i = 0; i < m_; ++i) rho[static_cast<std::size_t>(n_ + i)] = brow[i];
        for (int j = 0; j < n_ + m_; ++j)
            d_[static_cast<std::size_t>(j)] -= scale * rho[static_cast<std::size_t>(j)];
        d_[static_cast<std::size_t>(entering)] = 0.0;
    }

    void pivot(int entering, int leave, const std::vector<double>& alpha) {
        const double piv = alpha[static_cast<std::size_t>(leave)];
        double* lrow = &binv_[idx(leave, 0)];
        for (int k = 0; k < m_; ++k) lrow[k] /= piv;
        const double xl = xb_[static_cast<std::size_t>(leave)] / piv;
        xb_[static_cast<std::size_t>(leave)] = xl;
        for (int i = 0; i < m_; ++i) {
            if (i == leave) continue;
            const double f = alpha[static_cast<std::size_t>(i)];
            if (f == 0.0) continue;
            double* row = &binv_[idx(i, 0)];
            for (int k = 0; k < m_; ++k) row[k] -= f * lrow[k];
            double& x = xb_[static_cast<std::size_t>(i)];
            x -= f * xl;
            if (x < 0.0 && x > -kLpPivotTol) x = 0.0;  // clamp pivot noise
        }
        in_basis_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(leave)])] = 0;
        in_basis_[static_cast<std::size_t>(entering)] = 1;
        basis_[static_cast<std::size_t>(leave)] = entering;
    }

    // Rebuild B^-1 from scratch by Gauss-Jordan with partial pivoting; keeps
    // long solves from accumulating update error.
    void refactorize() {
        std::vector<double> work(static_cast<std::size_t>(m_) * static_cast<std::size_t>(2 * m_),
                                 0.0);
        auto widx = [this](int r, int c) {
            return static_cast<std::size_t>(r) * static_cast<std::size_t>(2 * m_) +
                   static_cast<std::size_t>(c);
        };
        for (int i = 0; i < m_; ++i) {
            const int v = basis_[static_cast<std::size_t>(i)];
            if (v >= n_) {
                work[widx(v - n_, i)] = 1.0;
            } else {
                for (int e = lp_.col_start[static_cast<std::size_t>(v)];
                     e < lp_.col_start[static_cast<std::size_t>(v) + 1]; ++e)
                    work[widx(lp_.entry_row[static_cast<std::size_t>(e)], i)] =
                        lp_.entry_value[static_cast<std::size_t>(e)];
            }
            work[widx(i, m_ + i)] = 1.0;
        }
        for (int col = 0; col < m_; ++col) {
            int p = col;
            for (int r = col + 1; r < m_; ++r)
                if (std::abs(work[widx(r, col)]) > std::abs(work[widx(p, col)])) p = r;
            if (std::abs(work[widx(p, col)]) < 1e-12)
                throw std::runtime_error("singular basis during refactorization");
            if (p != col)
                for (int c = 0; c < 2 * m_; ++c) std::swap(work[widx(p, c)], work[widx(col, c)]);
            const double dd = work[widx(col, col)];
            for (int c = 0; c < 2 * m_; ++c) work[widx(col, c)] /= dd;
            for (int r = 0; r < m_; ++r) {
                if (r == col) continue;
                const double f = work[widx(r, col)];
                if (f == 0.0) continue;
                for (int c = 0; c < 2 * m_; ++c) work[widx(r, c)] -= f * work[widx(col, c)];
            }
        }
        for (int r = 0; r < m_; ++r)
            for (int c = 0; c < m_; ++c) binv_[idx(r, c)] = work[widx(r, m_ + c)];
        for (int i = 0; i < m_; ++i) {
            double s = 0.0;
            const double* row = &binv_[idx(i, 0)];
            for (int k = 0; k < m_; ++k) s += row[k] * lp_.rhs[static_cast<std::size_t>(k)];
            xb_[static_cast<std::size_t>(i)] = std::max(s, 0.0);
        }
    }

    BasicSolution extract() const {
        BasicSolution out;
        out.values.assign(static_cast<std::size_t>(n_), 0.0);
        out.basis.assign(basis_.begin(), basis_.end());
        for (int i = 0; i < m_; ++i) {
            const int v = basis_[static_cast<std::size_t>(i)];
            if (v < n_)
                out.values[static_cast<std::size_t>(v)] =
                    std::max(xb_[static_cast<std::size_t>(i)], 0.0);
        }
        double obj = 0.0;
        for (int j = 0; j < n_; ++j)
            obj += lp_.objective[static_cast<std::size_t>(j)] *
                   out.values[static_cast<std::size_t>(j)];
        out.objective_value = obj;
        return out;
    }

    const SparseLp& lp_;
    int n_;
    int m_;
    std::vector<int> basis_;
    std::vector<char> in_basis_;
    std::vector<double> binv_;  // row-major m x m
    std::vector<double> xb_;
    std::vector<double> d_;  // maintained reduced costs, structural then slack
};

BasicSolution solve_empty(int num_rows) {
    BasicSolution out;
    out.objective_value = 0.0;
    for (int i = 0; i < num_rows; ++i) out.basis.push_back(i);
    return out;
}

}  // namespace

BasicSolution solve_lp(const LinearProgram& lp, std::span<const CrashPair> crash) {
    if (lp.num_vars == 0) return solve_empty(static_cast<int>(lp.rows.size()));
    const SparseLp sparse = sparsify(lp);
    return Simplex(sparse, crash).solve();
}

BasicSolution solve_lp(const SparseLp& lp, std::span<const CrashPair> crash) {
    if (lp.num_vars == 0) return solve_empty(lp.num_rows);
    return Simplex(lp, crash).solve();
}

RsuLp build_rsu_lp(const InstancePool& pool, int rsu, std::span<const double> weights) {
    if (rsu < 0 || static_cast<std::size_t>(rsu) >= pool.by_rsu.size())
        throw std::out_of_range("unknown rsu index");
    if (weights.size() != pool.all.size())
        throw std::invalid_argument("weight vector length does not match the pool");

    RsuLp out;
    std::vector<int> task_row;  // task index -> row offset among task rows, -1 if absent
    for (int id : pool.by_rsu[static_cast<std::size_t>(rsu)]) {
        if (weights[static_cast<std::size_t>(id)] <= 0.0) continue;
        const ServiceInstance& inst = pool[id];
        out.var_instance.push_back(id);
        out.var_task.push_back(inst.task);
        if (static_cast<std::size_t>(inst.task) >= task_row.size())
            task_row.resize(static_cast<std::size_t>(inst.task) + 1, -1);
        if (task_row[static_cast<std::size_t>(inst.task)] < 0)
            task_row[static_cast<std::size_t>(inst.task)] = out.num_tasks++;
    }

    const int n = static_cast<int>(out.var_instance.size());
    SparseLp& lp = out.lp;
    lp.num_vars = n;
    lp.num_rows = 2 + out.num_tasks;
    lp.objective.resize(static_cast<std::size_t>(n));
    lp.rhs.assign(static_cast<std::size_t>(lp.num_rows), 1.0);
    lp.rhs[0] = static_cast<double>(pool.rsu_rbs[static_cast<std::size_t>(rsu)]);
    lp.rhs[1] = static_cast<double>(pool.rsu_cus[static_cast<std::size_t>(rsu)]);
    lp.col_start.assign(static_cast<std::size_t>(n) + 1, 0);
    lp.entry_row.reserve(static_cast<std::size_t>(3 * n));
    lp.entry_value.reserve(static_cast<std::size_t>(3 * n));

    out.var_row.resize(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) {
        const ServiceInstance& inst = pool[out.var_instance[static_cast<std::size_t>(v)]];
        lp.objective[static_cast<std::size_t>(v)] = weights[static_cast<std::size_t>(inst.id)];
        const int tr = 2 + task_row[static_cast<std::size_t>(inst.task)];
        lp.entry_row.push_back(0);
        lp.entry_value.push_back(static_cast<double>(inst.rbs));
        lp.entry_row.push_back(1);
        lp.entry_value.push_back(static_cast<double>(inst.cus));
        lp.entry_row.push_back(tr);
        lp.entry_value.push_back(1.0);
        lp.col_start[static_cast<std::size_t>(v) + 1] = static_cast<int>(lp.entry_row.size());
        out.var_row[static_cast<std::size_t>(v)] = tr;
    }
    return out;
}

std::vector<CrashPair> greedy_crash_vertex(const InstancePool& pool, const RsuLp& rlp) {
    // one candidate per task row: the best weight per unit of scarce
    // resource, then a greedy integral packing in score order
    const int n = rlp.lp.num_vars;
    if (n == 0) return {};
    std::vector<int> best_var;  // per task row offset
    std::vector<double> best_score;
    const double cap_b = rlp.lp.rhs[0];
    const double cap_c = rlp.lp.rhs[1];
    for (int v = 0; v < n; ++v) {
        const ServiceInstance& inst = pool[rlp.var_instance[static_cast<std::size_t>(v)]];
        const double share =
            static_cast<double>(inst.rbs) / cap_b + static_cast<double>(inst.cus) / cap_c;
        const double score = rlp.lp.objective[static_cast<std::size_t>(v)] / share;
        const std::size_t row =
            static_cast<std::size_t>(rlp.var_row[static_cast<std::size_t>(v)] - 2);
        if (row >= best_var.size()) {
            best_var.resize(row + 1, -1);
            best_score.resize(row + 1, 0.0);
        }
        if (best_var[row] < 0 || score > best_score[row]) {
            best_var[row] = v;
            best_score[row] = score;
        }
    }
    std::vector<std::size_t> order(best_var.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return best_score[a] > best_score[b]; });

    std::vector<CrashPair> crash;
    double rb_left = cap_b, cu_left = cap_c;
    for (std::size_t row : order) {
        const int v = best_var[row];
        if (v < 0) continue;
        const ServiceInstance& inst = pool[rlp.var_instance[static_cast<std::size_t>(v)]];
        if (inst.rbs > rb_left || inst.cus > cu_left) continue;
        rb_left -= inst.rbs;
        cu_left -= inst.cus;
        crash.push_back({v, rlp.var_row[static_cast<std::size_t>(v)]});
    }
    return crash;
}

}  // namespace vecsched
