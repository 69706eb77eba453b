#include "csg/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace csg {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kOptTol = 1e-9;    // reduced-cost threshold for entering
constexpr double kPivotTol = 1e-11; // smallest acceptable pivot element
constexpr double kFeasTol = 1e-8;   // phase-1 success threshold
constexpr double kDegenStep = 1e-10;
constexpr int kBlandTrigger = 40;         // degenerate pivots before Bland kicks in
constexpr std::uint64_t kPivotBudget = 1000000;

enum class VarState { Basic, AtLower, AtUpper, FreeAtZero };

// Working storage for one solve: the problem rewritten as equalities over
// structural + slack + artificial columns, with a dense B^-1 A tableau.
struct Simplex {
    int m = 0;          // rows
    int total = 0;      // structural + slack + artificial columns
    int structurals = 0;
    int art_begin = 0;  // first artificial column
    std::vector<std::vector<double>> tab;  // m x total
    std::vector<double> xval;              // current value of every column
    std::vector<double> lo, hi;
    std::vector<double> cost;              // current phase's objective
    std::vector<double> d;                 // reduced costs
    std::vector<int> basis;                // column basic in each row
    std::vector<VarState> state;
    std::uint64_t pivots = 0;
    int degenerate_streak = 0;

    void recompute_reduced_costs() {
        d = cost;
        for (int i = 0; i < m; ++i) {
            const double cb = cost[static_cast<std::size_t>(basis[static_cast<std::size_t>(i)])];
            if (cb == 0.0) continue;
            const std::vector<double>& row = tab[static_cast<std::size_t>(i)];
            for (int j = 0; j < total; ++j) d[static_cast<std::size_t>(j)] -= cb * row[static_cast<std::size_t>(j)];
        }
        for (int i = 0; i < m; ++i) d[static_cast<std::size_t>(basis[static_cast<std::size_t>(i)])] = 0.0;
    }

    // Entering column and its direction (+1 raises the variable, -1 lowers).
    // Dantzig by default, Bland under a degeneracy streak. Returns -1 at
    // optimality.
    std::pair<int, int> choose_entering() const {
        const bool bland = degenerate_streak >= kBlandTrigger;
        int best = -1, dir = 0;
        double best_score = kOptTol;
        for (int j = 0; j < total; ++j) {
            const VarState s = state[static_cast<std::size_t>(j)];
            if (s == VarState::Basic) continue;
            if (lo[static_cast<std::size_t>(j)] == hi[static_cast<std::size_t>(j)]) continue;
            const double dj = d[static_cast<std::size_t>(j)];
            int candidate_dir = 0;
            if (dj > kOptTol && s != VarState::AtUpper) candidate_dir = +1;
            else if (dj < -kOptTol && s != VarState::AtLower) candidate_dir = -1;
            if (candidate_dir == 0) continue;
            if (bland) return {j, candidate_dir};
            if (std::abs(dj) > best_score) {
                best_score = std::abs(dj);
                best = j;
                dir = candidate_dir;
            }
        }
        return {best, dir};
    }

    void pivot(int row, int col) {
        std::vector<double>& prow = tab[static_cast<std::size_t>(row)];
        const double piv = prow[static_cast<std::size_t>(col)];
        for (int j = 0; j < total; ++j) prow[static_cast<std::size_t>(j)] /= piv;
        for (int i = 0; i < m; ++i) {
            if (i == row) continue;
            std::vector<double>& r = tab[static_cast<std::size_t>(i)];
            const double factor = r[static_cast<std::size_t>(col)];
            if (factor == 0.0) continue;
            for (int j = 0; j < total; ++j) r[static_cast<std::size_t>(j)] -= factor * prow[static_cast<std::size_t>(j)];
            r[static_cast<std::size_t>(col)] = 0.0;
        }
        const double dfactor = d[static_cast<std::size_t>(col)];
        if (dfactor != 0.0) {
            for (int j = 0; j < total; ++j) d[static_cast<std::size_t>(j)] -= dfactor * prow[static_cast<std::size_t>(j)];
        }
        d[static_cast<std::size_t>(col)] = 0.0;
        ++pivots;
    }

    // One simplex step. Returns the phase outcome when the step ends the
    // phase, or Optimal-as-sentinel via `done=false` while iterating.
    LpStatus step(bool& done) {
        done = false;
        const auto [j, dir] = choose_entering();
        if (j < 0) {
            done = true;
            return LpStatus::Optimal;
        }
        const double sigma = dir;

        // Ratio test: how far can x_j move before something hits a bound?
        double limit = kInf;
        if (std::isfinite(lo[static_cast<std::size_t>(j)]) && std::isfinite(hi[static_cast<std::size_t>(j)]))
            limit = hi[static_cast<std::size_t>(j)] - lo[static_cast<std::size_t>(j)];  // bound flip
        double best_t = limit;
        int leave_row = -1;   // -1 with finite best_t means bound flip
        for (int i = 0; i < m; ++i) {
            const double a = sigma * tab[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (std::abs(a) <= kPivotTol) continue;
            const int bi = basis[static_cast<std::size_t>(i)];
            const double xb = xval[static_cast<std::size_t>(bi)];
            double t;
            if (a > 0.0) {
                const double bound = lo[static_cast<std::size_t>(bi)];
                if (!std::isfinite(bound)) continue;
                t = (xb - bound) / a;
            } else {
                const double bound = hi[static_cast<std::size_t>(bi)];
                if (!std::isfinite(bound)) continue;
                t = (bound - xb) / (-a);
            }
            if (t < -1e-9) t = 0.0;  // tiny infeasibility from roundoff
            t = std::max(t, 0.0);
            const bool closer = t < best_t - 1e-12;
            const bool tied = std::abs(t - best_t) <= 1e-12 && leave_row >= 0;
            bool replace = closer;
            if (tied) {
                if (degenerate_streak >= kBlandTrigger) {
                    replace = bi < basis[static_cast<std::size_t>(leave_row)];
                } else {
                    replace = std::abs(tab[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) >
                              std::abs(tab[static_cast<std::size_t>(leave_row)][static_cast<std::size_t>(j)]);
                }
            } else if (std::abs(t - best_t) <= 1e-12 && leave_row < 0 && t < limit) {
                replace = true;  // prefer a basis change over a flip only when strictly needed
            }
            if (replace) {
                best_t = t;
                leave_row = i;
            }
        }

        if (!std::isfinite(best_t)) return LpStatus::Unbounded;
        if (pivots >= kPivotBudget) return LpStatus::IterationLimit;

        degenerate_streak = best_t < kDegenStep ? degenerate_streak + 1 : 0;

        // Apply the move to the primal point.
        if (best_t > 0.0) {
            xval[static_cast<std::size_t>(j)] += sigma * best_t;
            for (int i = 0; i < m; ++i) {
                const double a = tab[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                if (a == 0.0) continue;
                const int bi = basis[static_cast<std::size_t>(i)];
                xval[static_cast<std::size_t>(bi)] -= sigma * best_t * a;
            }
        }

        if (leave_row < 0) {
            // Bound flip: x_j traveled to its opposite bound; basis unchanged.
            state[static_cast<std::size_t>(j)] =
                sigma > 0 ? VarState::AtUpper : VarState::AtLower;
            xval[static_cast<std::size_t>(j)] = sigma > 0 ? hi[static_cast<std::size_t>(j)] : lo[static_cast<std::size_t>(j)];
            ++pivots;
            return LpStatus::Optimal;  // not done; status ignored
        }

        if (std::abs(tab[static_cast<std::size_t>(leave_row)][static_cast<std::size_t>(j)]) < kPivotTol) {
            done = true;
            return LpStatus::NumericallySingular;
        }

        const int leaving = basis[static_cast<std::size_t>(leave_row)];
        const double a = sigma * tab[static_cast<std::size_t>(leave_row)][static_cast<std::size_t>(j)];
        state[static_cast<std::size_t>(leaving)] = a > 0.0 ? VarState::AtLower : VarState::AtUpper;
        xval[static_cast<std::size_t>(leaving)] =
            a > 0.0 ? lo[static_cast<std::size_t>(leaving)] : hi[static_cast<std::size_t>(leaving)];
        basis[static_cast<std::size_t>(leave_row)] = j;
        state[static_cast<std::size_t>(j)] = VarState::Basic;
        pivot(leave_row, j);
        return LpStatus::Optimal;  // not done
    }

    LpStatus run_phase() {
        recompute_reduced_costs();
        for (;;) {
            if (pivots >= kPivotBudget) return LpStatus::IterationLimit;
            if (pivots % 256 == 255) recompute_reduced_costs();  // numerical hygiene
            bool done = false;
            const LpStatus st = step(done);
            if (done) return st;
            if (st == LpStatus::Unbounded || st == LpStatus::IterationLimit) return st;
        }
    }
};

}  // namespace

LpProblem fix_variable(const LpProblem& problem, int var, double value) {
    if (var < 0 || var >= problem.num_vars()) throw std::out_of_range("variable index");
    LpProblem fixed = problem;
    fixed.lower[static_cast<std::size_t>(var)] = value;
    fixed.upper[static_cast<std::size_t>(var)] = value;
    return fixed;
}

LpSolution lp_solve(const LpProblem& problem) {
    const int n = problem.num_vars();
    const int m = problem.num_rows();
    if (static_cast<int>(problem.rows.size()) != m || static_cast<int>(problem.rhs.size()) != m ||
        static_cast<int>(problem.relations.size()) != m ||
        static_cast<int>(problem.lower.size()) != n || static_cast<int>(problem.upper.size()) != n)
        throw std::invalid_argument("inconsistent LP dimensions");
    for (int i = 0; i < m; ++i)
        if (static_cast<int>(problem.rows[static_cast<std::size_t>(i)].size()) != n)
            throw std::invalid_argument("inconsistent LP row length");
    for (int j = 0; j < n; ++j)
        if (problem.lower[static_cast<std::size_t>(j)] > problem.upper[static_cast<std::size_t>(j)])
            return LpSolution{LpStatus::Infeasible, 0.0, {}, 0};

    Simplex s;
    s.m = m;
    s.structurals = n;
    s.art_begin = n + m;
    s.total = n + 2 * m;
    s.lo.assign(static_cast<std::size_t>(s.total), 0.0);
    s.hi.assign(static_cast<std::size_t>(s.total), 0.0);
    s.cost.assign(static_cast<std::size_t>(s.total), 0.0);
    s.xval.assign(static_cast<std::size_t>(s.total), 0.0);
    s.state.assign(static_cast<std::size_t>(s.total), VarState::AtLower);
    s.tab.assign(static_cast<std::size_t>(m), std::vector<double>(static_cast<std::size_t>(s.total), 0.0));

    for (int j = 0; j < n; ++j) {
        s.lo[static_cast<std::size_t>(j)] = problem.lower[static_cast<std::size_t>(j)];
        s.hi[static_cast<std::size_t>(j)] = problem.upper[static_cast<std::size_t>(j)];
        if (std::isfinite(s.lo[static_cast<std::size_t>(j)])) {
            s.xval[static_cast<std::size_t>(j)] = s.lo[static_cast<std::size_t>(j)];
            s.state[static_cast<std::size_t>(j)] = VarState::AtLower;
        } else if (std::isfinite(s.hi[static_cast<std::size_t>(j)])) {
            s.xval[static_cast<std::size_t>(j)] = s.hi[static_cast<std::size_t>(j)];
            s.state[static_cast<std::size_t>(j)] = VarState::AtUpper;
        } else {
            s.xval[static_cast<std::size_t>(j)] = 0.0;
            s.state[static_cast<std::size_t>(j)] = VarState::FreeAtZero;
        }
    }
    // Slack column per row turns every relation into an equality. Each slack
    // starts at 0, which is the lower bound of a Le slack but the upper bound
    // of a Ge slack — the state must say which, or pricing could push the
    // variable out of range.
    for (int i = 0; i < m; ++i) {
        const int sj = n + i;
        switch (problem.relations[static_cast<std::size_t>(i)]) {
            case Relation::Le:
                s.lo[static_cast<std::size_t>(sj)] = 0.0;
                s.hi[static_cast<std::size_t>(sj)] = kInf;
                s.state[static_cast<std::size_t>(sj)] = VarState::AtLower;
                break;
            case Relation::Ge:
                s.lo[static_cast<std::size_t>(sj)] = -kInf;
                s.hi[static_cast<std::size_t>(sj)] = 0.0;
                s.state[static_cast<std::size_t>(sj)] = VarState::AtUpper;
                break;
            case Relation::Eq:
                s.lo[static_cast<std::size_t>(sj)] = 0.0;
                s.hi[static_cast<std::size_t>(sj)] = 0.0;
                s.state[static_cast<std::size_t>(sj)] = VarState::AtLower;
                break;
        }
        s.xval[static_cast<std::size_t>(sj)] = 0.0;
    }

    // Phase 1: artificial basis covering the residual b - A x0 - s0.
    s.basis.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        double residual = problem.rhs[static_cast<std::size_t>(i)];
        for (int j = 0; j < n; ++j)
            residual -= problem.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                        s.xval[static_cast<std::size_t>(j)];
        const double sign = residual >= 0.0 ? 1.0 : -1.0;
        std::vector<double>& row = s.tab[static_cast<std::size_t>(i)];
        for (int j = 0; j < n; ++j)
            row[static_cast<std::size_t>(j)] = sign * problem.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        row[static_cast<std::size_t>(n + i)] = sign;  // slack
        const int aj = s.art_begin + i;
        row[static_cast<std::size_t>(aj)] = 1.0;
        s.lo[static_cast<std::size_t>(aj)] = 0.0;
        s.hi[static_cast<std::size_t>(aj)] = kInf;
        s.xval[static_cast<std::size_t>(aj)] = std::abs(residual);
        s.state[static_cast<std::size_t>(aj)] = VarState::Basic;
        s.cost[static_cast<std::size_t>(aj)] = -1.0;
        s.basis[static_cast<std::size_t>(i)] = aj;
    }

    LpStatus st = s.run_phase();
    if (st == LpStatus::IterationLimit || st == LpStatus::NumericallySingular)
        return LpSolution{st, 0.0, {}, s.pivots};
    double infeasibility = 0.0;
    for (int i = 0; i < m; ++i)
        infeasibility += std::abs(s.xval[static_cast<std::size_t>(s.art_begin + i)]);
    if (st == LpStatus::Unbounded || infeasibility > kFeasTol)
        return LpSolution{LpStatus::Infeasible, 0.0, {}, s.pivots};

    // Pin artificials at zero; drive basic ones out where a usable pivot
    // exists (a row with none is redundant and stays parked on it).
    for (int j = s.art_begin; j < s.total; ++j) {
        s.lo[static_cast<std::size_t>(j)] = 0.0;
        s.hi[static_cast<std::size_t>(j)] = 0.0;
        s.cost[static_cast<std::size_t>(j)] = 0.0;
    }
    for (int i = 0; i < m; ++i) {
        const int bi = s.basis[static_cast<std::size_t>(i)];
        if (bi < s.art_begin) continue;
        int best_col = -1;
        double best_abs = 1e-7;
        for (int j = 0; j < s.art_begin; ++j) {
            const double a = std::abs(s.tab[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
            if (s.state[static_cast<std::size_t>(j)] != VarState::Basic && a > best_abs) {
                best_abs = a;
                best_col = j;
            }
        }
        if (best_col < 0) continue;
        s.state[static_cast<std::size_t>(bi)] = VarState::AtLower;
        s.xval[static_cast<std::size_t>(bi)] = 0.0;
        s.basis[static_cast<std::size_t>(i)] = best_col;
        s.state[static_cast<std::size_t>(best_col)] = VarState::Basic;
        s.pivot(i, best_col);
    }

    // Phase 2: the real objective.
    for (int j = 0; j < n; ++j) s.cost[static_cast<std::size_t>(j)] = problem.c[static_cast<std::size_t>(j)];
    for (int j = n; j < s.total; ++j) s.cost[static_cast<std::size_t>(j)] = 0.0;
    s.degenerate_streak = 0;
    st = s.run_phase();
    if (st != LpStatus::Optimal) return LpSolution{st, 0.0, {}, s.pivots};

    LpSolution solution;
    solution.status = LpStatus::Optimal;
    solution.x.assign(static_cast<std::size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) solution.x[static_cast<std::size_t>(j)] = s.xval[static_cast<std::size_t>(j)];
    solution.objective = 0.0;
    for (int j = 0; j < n; ++j)
        solution.objective += problem.c[static_cast<std::size_t>(j)] * solution.x[static_cast<std::size_t>(j)];
    solution.pivots = s.pivots;
    return solution;
}

}  // namespace csg
