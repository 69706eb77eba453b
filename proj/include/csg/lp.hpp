#pragma once

#include <cstdint>
#include <vector>

namespace csg {

enum class Relation { Le, Eq, Ge };

/// Dense LP in the form: maximize c^T x subject to rows (<=, =, >=) rhs and
/// lower <= x <= upper. Bounds may be +/-infinity.
struct LpProblem {
    std::vector<double> c;
    std::vector<std::vector<double>> rows;
    std::vector<Relation> relations;
    std::vector<double> rhs;
    std::vector<double> lower;
    std::vector<double> upper;

    int num_vars() const { return static_cast<int>(c.size()); }
    int num_rows() const { return static_cast<int>(rows.size()); }
};

/// Copy of the problem with one variable pinned to a single value (used for
/// branching decisions). The input is left untouched.
LpProblem fix_variable(const LpProblem& problem, int var, double value);

enum class LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
    NumericallySingular,
};

struct LpSolution {
    LpStatus status = LpStatus::NumericallySingular;
    double objective = 0.0;
    std::vector<double> x;  // structural variables only
    std::uint64_t pivots = 0;
};

/// Two-phase primal simplex with bounded variables. Dantzig pricing with a
/// Bland fallback engaged under sustained degeneracy; pivot-element floor
/// 1e-11 (below it the solve reports NumericallySingular); pivot budget 1e6.
LpSolution lp_solve(const LpProblem& problem);

}  // namespace csg
