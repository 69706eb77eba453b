#include "csg/sparse.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "csg/lp.hpp"

namespace csg {
namespace {

constexpr int kUncappedPoolMaxAgents = 16;

std::int64_t elapsed_ns(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(
               std::chrono::steady_clock::now() - start)
        .count();
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Per-agent singleton values, taken from the pool where present and queried
// (once) otherwise. Returns the values and the number of fresh queries.
std::pair<std::vector<double>, std::uint64_t> singleton_values(const ValueOracle& oracle,
                                                               const CandidatePool& pool) {
    std::vector<double> values(static_cast<std::size_t>(pool.n), 0.0);
    std::uint64_t fresh = 0;
    std::unordered_map<std::uint32_t, double> cached;
    for (int i = 0; i < pool.size(); ++i)
        if (pool.candidates[static_cast<std::size_t>(i)].size() == 1)
            cached.emplace(pool.candidates[static_cast<std::size_t>(i)].bits,
                           pool.values[static_cast<std::size_t>(i)]);
    for (int a = 0; a < pool.n; ++a) {
        const Coalition single = Coalition::of({a});
        const auto it = cached.find(single.bits);
        if (it != cached.end()) {
            values[static_cast<std::size_t>(a)] = it->second;
        } else {
            values[static_cast<std::size_t>(a)] = oracle.value(single);
            ++fresh;
        }
    }
    return {values, fresh};
}

}  // namespace

CandidatePool build_pool_all(const ValueOracle& oracle, std::optional<int> size_cap) {
    const int n = oracle.agent_count();
    if (n < 1 || n > kMaxAgents) throw std::invalid_argument("agent count must be in 1..20");
    if (!size_cap && n > kUncappedPoolMaxAgents)
        throw GuardViolation("uncapped candidate pools support 1..16 agents");
    if (size_cap && (*size_cap < 1 || *size_cap > n))
        throw std::invalid_argument("size cap must be in 1..n");

    CountingOracle counted(oracle);
    CandidatePool pool;
    pool.n = n;
    pool.size_cap = size_cap;
    const int cap = size_cap.value_or(n);
    for (std::uint32_t s = 1; s <= Coalition::full(n).bits; ++s) {
        if (std::popcount(s) > cap) continue;
        pool.candidates.push_back(Coalition{s});
        pool.values.push_back(counted.value(Coalition{s}));
    }
    pool.build_queries = counted.queries();
    return pool;
}

CandidatePool build_pool_prior(const ValueOracle& oracle, const std::vector<Coalition>& priors,
                               std::uint64_t seed, int distractors_per_agent) {
    if (distractors_per_agent < 0) throw std::invalid_argument("distractor count must be >= 0");
    const int n = oracle.agent_count();
    CountingOracle counted(oracle);
    CandidatePool pool;
    pool.n = n;

    std::unordered_set<std::uint32_t> seen;
    const auto add = [&](Coalition c) {
        if (c.empty() || !c.within(n)) throw std::invalid_argument("prior outside agent range");
        if (!seen.insert(c.bits).second) return;
        pool.candidates.push_back(c);
        pool.values.push_back(counted.value(c));
    };
    for (const Coalition t : priors) add(t);
    for (int a = 0; a < n; ++a) add(Coalition::of({a}));

    // Decoys are shaped like the priors: same sizes, random membership, and
    // never containing a whole prior — a decoy that swallowed one would carry
    // its full value and stop being a decoy.
    const std::uint64_t target = priors.empty()
                                     ? 0
                                     : static_cast<std::uint64_t>(distractors_per_agent) *
                                           static_cast<std::uint64_t>(n);
    std::uint64_t counter = 0;
    std::uint64_t added = 0;
    std::uint64_t attempts = 0;
    const std::uint64_t max_attempts = 50 * target + 100;
    std::vector<int> order(static_cast<std::size_t>(n));
    while (added < target && attempts < max_attempts) {
        ++attempts;
        const auto draw = [&] { return splitmix64(seed ^ splitmix64(counter++)); };
        const Coalition shape = priors[static_cast<std::size_t>(draw() % priors.size())];
        std::iota(order.begin(), order.end(), 0);
        Coalition decoy;
        for (int i = 0; i < shape.size(); ++i) {
            const int j = i + static_cast<int>(draw() % static_cast<std::uint64_t>(n - i));
            std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
            decoy = decoy | Coalition::single(order[static_cast<std::size_t>(i)]);
        }
        const bool swallows = std::any_of(priors.begin(), priors.end(), [&](Coalition t) {
            return decoy.contains_all(t);
        });
        if (swallows || seen.contains(decoy.bits)) continue;
        add(decoy);
        ++added;
    }
    pool.build_queries = counted.queries();
    return pool;
}

Coalition residual_agents(const SparseSelection& selection, int n) {
    return Coalition::full(n).minus(selection.covered);
}

SparseResult greedy_solve(const ValueOracle& oracle, const CandidatePool& pool,
                          AnytimeTrace& trace) {
    if (pool.size() == 0) throw std::invalid_argument("empty candidate pool");
    const auto start = std::chrono::steady_clock::now();
    trace.solver_id = trace.solver_id.empty() ? "greedy" : trace.solver_id;
    trace.work_unit_kind = "candidate_evals";

    const int n = pool.n;
    const int m = pool.size();
    auto [singles, fresh_queries] = singleton_values(oracle, pool);

    SparseResult result;
    SparseSelection& sel = result.selection;
    sel.incidence.assign(static_cast<std::size_t>(m), 0);

    double chosen_sum = 0.0;
    const auto filled_value = [&] {
        double v = chosen_sum;
        for (int a = 0; a < n; ++a)
            if (!sel.covered.contains(a)) v += singles[static_cast<std::size_t>(a)];
        return v;
    };

    // A positive-value pick can still lower the completed structure's worth
    // when the singletons it displaces were worth more, so the incumbent is
    // the best prefix of the pick sequence, not the latest one.
    double incumbent = filled_value();
    std::size_t incumbent_picks = 0;
    trace.append(0, elapsed_ns(start), incumbent, "baseline",
                 pool.build_queries + fresh_queries);

    const Coalition full = Coalition::full(n);
    while (sel.covered != full) {
        int best = -1;
        for (int i = 0; i < m; ++i) {
            if (sel.incidence[static_cast<std::size_t>(i)]) continue;
            const Coalition c = pool.candidates[static_cast<std::size_t>(i)];
            ++sel.candidate_evals;
            if (!c.disjoint_from(sel.covered)) continue;
            if (best < 0) {
                if (pool.values[static_cast<std::size_t>(i)] > 0.0) best = i;
                continue;
            }
            const double vi = pool.values[static_cast<std::size_t>(i)];
            const double vb = pool.values[static_cast<std::size_t>(best)];
            const Coalition cb = pool.candidates[static_cast<std::size_t>(best)];
            if (vi > vb ||
                (vi == vb && (c.size() < cb.size() || (c.size() == cb.size() && c.bits < cb.bits))))
                best = i;
        }
        if (best < 0) break;  // nothing disjoint with positive value remains
        sel.incidence[static_cast<std::size_t>(best)] = 1;
        sel.chosen.push_back(best);
        sel.covered = sel.covered | pool.candidates[static_cast<std::size_t>(best)];
        chosen_sum += pool.values[static_cast<std::size_t>(best)];
        ++sel.iterations;
        const double filled = filled_value();
        if (filled > incumbent) {
            incumbent = filled;
            incumbent_picks = sel.chosen.size();
        }
        trace.append(sel.candidate_evals, elapsed_ns(start), incumbent,
                     "pick mask=" + std::to_string(pool.candidates[static_cast<std::size_t>(best)].bits),
                     pool.build_queries + fresh_queries);
    }

    if (sel.iterations > n) throw std::logic_error("greedy exceeded n iterations");
    if (sel.candidate_evals > static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(m))
        throw std::logic_error("greedy exceeded its n*M evaluation bound");

    // Roll the selection back to the incumbent prefix so the reported blocks
    // and bookkeeping describe the structure actually returned.
    sel.chosen.resize(incumbent_picks);
    sel.incidence.assign(static_cast<std::size_t>(m), 0);
    sel.covered = Coalition{};
    for (const int i : sel.chosen) {
        sel.incidence[static_cast<std::size_t>(i)] = 1;
        sel.covered = sel.covered | pool.candidates[static_cast<std::size_t>(i)];
    }

    for (const int i : sel.chosen)
        result.structure.blocks.push_back(pool.candidates[static_cast<std::size_t>(i)]);
    for (int a = 0; a < n; ++a)
        if (!sel.covered.contains(a)) result.structure.blocks.push_back(Coalition::of({a}));
    result.structure = canonicalize(result.structure);
    result.value = incumbent;
    return result;
}

SparseResult l1_solve(const ValueOracle& oracle, const CandidatePool& pool, double lambda,
                      AnytimeTrace& trace) {
    if (pool.size() == 0) throw std::invalid_argument("empty candidate pool");
    if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be nonnegative");
    const auto start = std::chrono::steady_clock::now();
    trace.solver_id = trace.solver_id.empty() ? "l1" : trace.solver_id;
    trace.work_unit_kind = "lp_pivots";

    const int n = pool.n;
    const int m = pool.size();

    LpProblem lp;
    lp.c.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
        lp.c[static_cast<std::size_t>(i)] = pool.values[static_cast<std::size_t>(i)] - lambda;
    lp.lower.assign(static_cast<std::size_t>(m), 0.0);
    lp.upper.assign(static_cast<std::size_t>(m), 1.0);
    lp.rows.assign(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(m), 0.0));
    lp.relations.assign(static_cast<std::size_t>(n), Relation::Le);
    lp.rhs.assign(static_cast<std::size_t>(n), 1.0);
    for (int i = 0; i < m; ++i)
        for (int a = 0; a < n; ++a)
            if (pool.candidates[static_cast<std::size_t>(i)].contains(a))
                lp.rows[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)] = 1.0;

    const LpSolution sol = lp_solve(lp);
    if (sol.status != LpStatus::Optimal) {
        const char* status = sol.status == LpStatus::Infeasible     ? "infeasible"
                             : sol.status == LpStatus::Unbounded    ? "unbounded"
                             : sol.status == LpStatus::IterationLimit ? "pivot budget exhausted"
                                                                      : "numerically singular";
        throw std::runtime_error(std::string("l1 relaxation failed: ") + status);
    }

    std::vector<int> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double xa = sol.x[static_cast<std::size_t>(a)], xb = sol.x[static_cast<std::size_t>(b)];
        if (xa != xb) return xa > xb;
        const double va = pool.values[static_cast<std::size_t>(a)], vb = pool.values[static_cast<std::size_t>(b)];
        if (va != vb) return va > vb;
        return a < b;
    });

    SparseResult result;
    SparseSelection& sel = result.selection;
    sel.incidence.assign(static_cast<std::size_t>(m), 0);
    double chosen_sum = 0.0;
    for (const int i : order) {
        if (sol.x[static_cast<std::size_t>(i)] < 0.5) break;
        const Coalition c = pool.candidates[static_cast<std::size_t>(i)];
        if (!c.disjoint_from(sel.covered)) continue;
        sel.incidence[static_cast<std::size_t>(i)] = 1;
        sel.chosen.push_back(i);
        sel.covered = sel.covered | c;
        chosen_sum += pool.values[static_cast<std::size_t>(i)];
    }
    sel.iterations = static_cast<int>(sel.chosen.size());
    sel.candidate_evals = static_cast<std::uint64_t>(m);

    auto [singles, fresh_queries] = singleton_values(oracle, pool);
    double value = chosen_sum;
    for (int a = 0; a < n; ++a)
        if (!sel.covered.contains(a)) value += singles[static_cast<std::size_t>(a)];

    for (const int i : sel.chosen)
        result.structure.blocks.push_back(pool.candidates[static_cast<std::size_t>(i)]);
    for (int a = 0; a < n; ++a)
        if (!sel.covered.contains(a)) result.structure.blocks.push_back(Coalition::of({a}));
    result.structure = canonicalize(result.structure);
    result.value = value;
    trace.append(sol.pivots, elapsed_ns(start), value, "rounded",
                 pool.build_queries + fresh_queries);
    return result;
}

double default_lambda(const SynergyModel& model) {
    return 2.0 * model.sigma() * std::sqrt(std::log(2.0 * model.agent_count()));
}

}  // namespace csg
