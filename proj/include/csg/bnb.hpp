#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "csg/core.hpp"
#include "csg/trace.hpp"

namespace csg {

/// Set-partitioning formulation: one binary variable per candidate block,
/// one coverage equality per agent. The relaxation is what the search bounds
/// with.
struct SetPartitionModel {
    int n = 0;
    std::vector<Coalition> pool;    // candidate blocks C_1..C_M
    std::vector<double> values;     // v(C_i), fetched once at build time
    std::optional<int> size_cap;
    std::uint64_t build_queries = 0;  // oracle queries spent building
};

/// Candidate pool = every nonempty coalition of size <= size_cap (all of
/// them when the cap is absent; guarded to n <= 14 in that case). Each
/// candidate's value is queried exactly once.
SetPartitionModel build_model(const ValueOracle& oracle, std::optional<int> size_cap = {});

struct BnbStats {
    std::uint64_t nodes_explored = 0;  // nodes whose relaxation was solved
    std::uint64_t nodes_pruned = 0;    // fathomed by bound or infeasibility
    std::uint64_t lp_pivots = 0;
    std::optional<double> root_bound;
    std::optional<double> root_gap;    // root bound minus best integral value
    bool budget_exhausted = false;
    std::vector<TraceRecord> incumbent_history;
};

struct BnbResult {
    double best_value = 0.0;
    std::optional<CoalitionStructure> best;
    BnbStats stats;
};

/// Index of the variable to branch on: fractional part closest to 0.5,
/// ties to the larger candidate value, then the lower index. Rejects an
/// integral solution (everything within 1e-6 of a bound).
int branch_select(const std::vector<double>& x, const SetPartitionModel& model);

/// Root relaxation bound minus a known integral optimum. Rejects models
/// whose root relaxation is infeasible or fails numerically.
double root_gap(const SetPartitionModel& model, double integral_opt);

inline constexpr std::uint64_t kDefaultNodeBudget = 1u << 20;

/// Best-first branch-and-bound on the set-partitioning relaxation. Nodes
/// are ordered by their own LP bound (solved eagerly at creation), FIFO on
/// ties. A node is fathomed when infeasible, integral (within 1e-6), or
/// bounded by incumbent + 1e-9. Incumbents arise only from integral
/// relaxations; each updates the trace with nodes_explored as the work unit.
/// Exhausting the node budget stops the search with the flag set (the best
/// incumbent so far is still returned).
BnbResult bnb_solve(const SetPartitionModel& model, AnytimeTrace& trace,
                    std::uint64_t node_budget = kDefaultNodeBudget);

}  // namespace csg
