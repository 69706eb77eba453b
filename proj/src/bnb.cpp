#include "csg/bnb.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>

#include "csg/lp.hpp"

namespace csg {
namespace {

constexpr int kUncappedMaxAgents = 14;
constexpr double kIntegralityTol = 1e-6;
constexpr double kFathomTol = 1e-9;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::int64_t elapsed_ns(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(
               std::chrono::steady_clock::now() - start)
        .count();
}

LpProblem relaxation_of(const SetPartitionModel& model) {
    const int m = static_cast<int>(model.pool.size());
    LpProblem lp;
    lp.c = model.values;
    lp.lower.assign(static_cast<std::size_t>(m), 0.0);
    lp.upper.assign(static_cast<std::size_t>(m), 1.0);
    lp.rows.assign(static_cast<std::size_t>(model.n),
                   std::vector<double>(static_cast<std::size_t>(m), 0.0));
    lp.relations.assign(static_cast<std::size_t>(model.n), Relation::Eq);
    lp.rhs.assign(static_cast<std::size_t>(model.n), 1.0);
    for (int i = 0; i < m; ++i)
        for (int a = 0; a < model.n; ++a)
            if (model.pool[static_cast<std::size_t>(i)].contains(a))
                lp.rows[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)] = 1.0;
    return lp;
}

bool is_integral(const std::vector<double>& x) {
    for (const double v : x)
        if (std::abs(v - std::round(v)) > kIntegralityTol) return false;
    return true;
}

// One open node: its decided fixings, its own relaxation bound, and the
// variable chosen for the next split (computed eagerly from its solution).
struct Node {
    std::vector<std::pair<int, double>> fixings;
    double bound = 0.0;
    int branch_var = -1;
    std::uint64_t id = 0;
};

struct NodeOrder {
    // priority_queue pops the *largest*; we want max bound, then min id.
    bool operator()(const Node& a, const Node& b) const {
        if (a.bound != b.bound) return a.bound < b.bound;
        return a.id > b.id;
    }
};

}  // namespace

SetPartitionModel build_model(const ValueOracle& oracle, std::optional<int> size_cap) {
    const int n = oracle.agent_count();
    if (n < 1 || n > kMaxAgents) throw std::invalid_argument("agent count must be in 1..20");
    if (!size_cap && n > kUncappedMaxAgents)
        throw GuardViolation("uncapped set-partition models support 1..14 agents");
    if (size_cap && (*size_cap < 1 || *size_cap > n))
        throw std::invalid_argument("size cap must be in 1..n");

    CountingOracle counted(oracle);
    SetPartitionModel model;
    model.n = n;
    model.size_cap = size_cap;
    const int cap = size_cap.value_or(n);
    const std::uint32_t end = Coalition::full(n).bits;
    for (std::uint32_t s = 1; s <= end; ++s) {
        if (std::popcount(s) > cap) continue;
        model.pool.push_back(Coalition{s});
        model.values.push_back(counted.value(Coalition{s}));
    }
    model.build_queries = counted.queries();
    return model;
}

int branch_select(const std::vector<double>& x, const SetPartitionModel& model) {
    if (x.size() != model.pool.size()) throw std::invalid_argument("solution size mismatch");
    int best = -1;
    double best_dist = 0.5;
    for (int i = 0; i < static_cast<int>(x.size()); ++i) {
        const double xi = x[static_cast<std::size_t>(i)];
        if (std::abs(xi - std::round(xi)) <= kIntegralityTol) continue;
        const double dist = std::abs(xi - 0.5);
        const bool better =
            best < 0 || dist < best_dist - 1e-12 ||
            (std::abs(dist - best_dist) <= 1e-12 &&
             model.values[static_cast<std::size_t>(i)] > model.values[static_cast<std::size_t>(best)]);
        if (better) {
            best = i;
            best_dist = dist;
        }
    }
    if (best < 0) throw std::invalid_argument("solution is integral; nothing to branch on");
    return best;
}

double root_gap(const SetPartitionModel& model, double integral_opt) {
    const LpSolution root = lp_solve(relaxation_of(model));
    if (root.status != LpStatus::Optimal)
        throw std::invalid_argument("root relaxation did not solve to optimality");
    return root.objective - integral_opt;
}

BnbResult bnb_solve(const SetPartitionModel& model, AnytimeTrace& trace,
                    std::uint64_t node_budget) {
    if (model.pool.empty()) throw std::invalid_argument("empty candidate pool");
    if (node_budget == 0) throw std::invalid_argument("node budget must be positive");
    const auto start = std::chrono::steady_clock::now();

    trace.solver_id = trace.solver_id.empty() ? "bnb" : trace.solver_id;
    trace.work_unit_kind = "nodes_explored";

    LpProblem lp = relaxation_of(model);
    const std::vector<double> lower0 = lp.lower;
    const std::vector<double> upper0 = lp.upper;

    BnbResult result;
    result.best_value = kNegInf;
    BnbStats& stats = result.stats;

    // Solves the relaxation under a node's fixings; restores bounds after.
    // Bounds are edited in place rather than through fix_variable to avoid
    // copying the constraint matrix once per node.
    const auto solve_with = [&](const std::vector<std::pair<int, double>>& fixings) {
        for (const auto& [var, val] : fixings) {
            lp.lower[static_cast<std::size_t>(var)] = val;
            lp.upper[static_cast<std::size_t>(var)] = val;
        }
        LpSolution sol = lp_solve(lp);
        for (const auto& [var, val] : fixings) {
            (void)val;
            lp.lower[static_cast<std::size_t>(var)] = lower0[static_cast<std::size_t>(var)];
            lp.upper[static_cast<std::size_t>(var)] = upper0[static_cast<std::size_t>(var)];
        }
        stats.lp_pivots += sol.pivots;
        ++stats.nodes_explored;
        return sol;
    };

    const auto accept_integral = [&](const std::vector<double>& x) {
        CoalitionStructure cs;
        double exact = 0.0;
        for (int i = 0; i < static_cast<int>(x.size()); ++i) {
            if (x[static_cast<std::size_t>(i)] < 0.5) continue;
            cs.blocks.push_back(model.pool[static_cast<std::size_t>(i)]);
            exact += model.values[static_cast<std::size_t>(i)];
        }
        if (exact > result.best_value) {
            result.best_value = exact;
            result.best = canonicalize(cs);
            trace.append(stats.nodes_explored, elapsed_ns(start), exact, "incumbent",
                         model.build_queries);
            stats.incumbent_history.push_back(trace.records().back());
        }
    };

    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    std::uint64_t next_id = 0;

    // Root node.
    {
        const LpSolution root = solve_with({});
        if (root.status == LpStatus::Infeasible) {
            return result;  // no partition at all (e.g. capped pool too tight)
        }
        if (root.status != LpStatus::Optimal)
            throw std::runtime_error("root relaxation failed numerically");
        stats.root_bound = root.objective;
        if (is_integral(root.x)) {
            accept_integral(root.x);
        } else {
            open.push(Node{{}, root.objective, branch_select(root.x, model), next_id++});
        }
    }

    while (!open.empty()) {
        if (stats.nodes_explored >= node_budget) {
            stats.budget_exhausted = true;
            break;
        }
        const Node node = open.top();
        open.pop();
        // Stale-bound re-check: the incumbent may have improved since this
        // node was queued.
        if (result.best && node.bound <= result.best_value + kFathomTol) {
            ++stats.nodes_pruned;
            continue;
        }
        for (const double branch_value : {1.0, 0.0}) {
            if (stats.nodes_explored >= node_budget) {
                stats.budget_exhausted = true;
                break;
            }
            Node child;
            child.fixings = node.fixings;
            child.fixings.emplace_back(node.branch_var, branch_value);
            const LpSolution sol = solve_with(child.fixings);
            if (sol.status == LpStatus::Infeasible) {
                ++stats.nodes_pruned;
                continue;
            }
            if (sol.status != LpStatus::Optimal)
                throw std::runtime_error("node relaxation failed numerically");
            if (result.best && sol.objective <= result.best_value + kFathomTol) {
                ++stats.nodes_pruned;
                continue;
            }
            if (is_integral(sol.x)) {
                accept_integral(sol.x);
                continue;
            }
            child.bound = sol.objective;
            child.branch_var = branch_select(sol.x, model);
            child.id = next_id++;
            open.push(std::move(child));
        }
    }
    if (!open.empty()) stats.budget_exhausted = true;

    if (result.best && stats.root_bound) {
        stats.root_gap = *stats.root_bound - result.best_value;
        trace.append(stats.nodes_explored, elapsed_ns(start), result.best_value, "done",
                     model.build_queries);
    }
    return result;
}

}  // namespace csg
