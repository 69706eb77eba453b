#include "csg/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "csg/bnb.hpp"
#include "csg/dp.hpp"
#include "csg/sparse.hpp"

namespace csg {
namespace {

constexpr double kThresholdTol = 1e-9;
constexpr int kUniformSweepMaxAgents = 16;
constexpr std::uint64_t kUniformSweepReplicates = 200;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

void fill_crossings(SolverReport& report, const QualityThresholds& thresholds) {
    report.q1_crossing = time_to_threshold(report.trace, thresholds.q1);
    report.q2_crossing = time_to_threshold(report.trace, thresholds.q2);
    if (!report.trace.empty()) {
        report.total_work = report.trace.records().back().work_units;
        report.oracle_queries = report.trace.total_oracle_queries();
    }
}

}  // namespace

std::optional<TraceRecord> time_to_threshold(const AnytimeTrace& trace, double q) {
    return trace.first_at_least(q - kThresholdTol);
}

const SolverReport* RaceReport::find(const std::string& id) const {
    for (const SolverReport& s : solvers)
        if (s.solver_id == id) return &s;
    return nullptr;
}

RaceReport run_race(const SynergyModel& model, const RaceOptions& options) {
    RaceReport report;
    report.n = model.agent_count();
    report.template_count = model.template_count();
    report.sigma = model.sigma();
    report.noise_seed = model.noise_seed();
    report.margin = margin_report(model);

    // Exact optimum and thresholds come from the DP solve; without it there
    // is nothing to race against.
    {
        SolverReport dp;
        dp.solver_id = "dp";
        CountingOracle counted(model);
        const DpResult result = dp_solve(counted, dp.trace);
        dp.ran = true;
        dp.final_value = result.value;
        report.opt = result.value;
        report.thresholds = quality_thresholds(model, report.opt);
        fill_crossings(dp, report.thresholds);
        report.solvers.push_back(std::move(dp));
    }

    {
        SolverReport bnb;
        bnb.solver_id = "bnb";
        try {
            CountingOracle counted(model);
            const SetPartitionModel sp = build_model(counted, options.size_cap);
            const BnbResult result = bnb_solve(sp, bnb.trace, options.node_budget);
            bnb.ran = true;
            bnb.final_value = result.best ? result.best_value
                                          : -std::numeric_limits<double>::infinity();
            fill_crossings(bnb, report.thresholds);
        } catch (const GuardViolation& e) {
            bnb.skip_reason = e.what();
            bnb.work_unit_kind = "nodes_explored";
        }
        report.solvers.push_back(std::move(bnb));
    }

    {
        SolverReport greedy;
        greedy.solver_id = "greedy";
        try {
            CountingOracle counted(model);
            const std::uint64_t pool_seed =
                options.pool_seed != 0 ? options.pool_seed : model.noise_seed();
            const CandidatePool pool =
                options.pool_mode == PoolMode::Prior
                    ? build_pool_prior(counted, model.templates(), pool_seed,
                                       options.distractors_per_agent)
                    : build_pool_all(counted, options.size_cap);
            const SparseResult result = greedy_solve(counted, pool, greedy.trace);
            greedy.ran = true;
            greedy.final_value = result.value;
            fill_crossings(greedy, report.thresholds);
        } catch (const GuardViolation& e) {
            greedy.skip_reason = e.what();
            greedy.work_unit_kind = "candidate_evals";
        }
        report.solvers.push_back(std::move(greedy));
    }

    if (options.include_l1) {
        SolverReport l1;
        l1.solver_id = "l1";
        try {
            CountingOracle counted(model);
            const std::uint64_t pool_seed =
                options.pool_seed != 0 ? options.pool_seed : model.noise_seed();
            const CandidatePool pool =
                options.pool_mode == PoolMode::Prior
                    ? build_pool_prior(counted, model.templates(), pool_seed,
                                       options.distractors_per_agent)
                    : build_pool_all(counted, options.size_cap);
            const double lambda = options.lambda.value_or(default_lambda(model));
            const SparseResult result = l1_solve(counted, pool, lambda, l1.trace);
            l1.ran = true;
            l1.final_value = result.value;
            fill_crossings(l1, report.thresholds);
        } catch (const GuardViolation& e) {
            l1.skip_reason = e.what();
            l1.work_unit_kind = "lp_pivots";
        }
        report.solvers.push_back(std::move(l1));
    }

    for (SolverReport& s : report.solvers) {
        if (s.ran && s.work_unit_kind.empty()) s.work_unit_kind = s.trace.work_unit_kind;
    }

    const SolverReport* dp = report.find("dp");
    const SolverReport* bnb = report.find("bnb");
    const SolverReport* greedy = report.find("greedy");
    const auto q1_queries = [](const SolverReport* s) -> std::uint64_t {
        if (!s || !s->ran || !s->q1_crossing)
            return std::numeric_limits<std::uint64_t>::max();
        return s->q1_crossing->oracle_queries;
    };
    report.separated = greedy && greedy->ran && greedy->q2_crossing &&
                       greedy->q2_crossing->oracle_queries < q1_queries(dp) &&
                       greedy->q2_crossing->oracle_queries < q1_queries(bnb);
    return report;
}

TailReport concentration_check(double sigma, int n, const std::vector<double>& t_grid,
                               std::uint64_t replicates, std::uint64_t seed) {
    if (replicates < 100) throw std::invalid_argument("at least 100 replicates required");
    if (n < 1 || n > kUniformSweepMaxAgents)
        throw GuardViolation("concentration sweep supports 1..16 agents");
    if (!(sigma >= 0.0)) throw std::invalid_argument("sigma must be nonnegative");
    for (const double t : t_grid)
        if (!(t >= 0.0)) throw std::invalid_argument("grid thresholds must be nonnegative");

    TailReport report;
    report.sigma = sigma;
    report.n = n;
    report.replicates = replicates;
    report.uniform_threshold = 2.0 * sigma * std::sqrt(std::log(2.0 * n));

    const std::uint64_t lattice = (std::uint64_t{1} << n) - 1;

    // One |noise| sample per (seed, coalition) pair, shared across the grid.
    std::vector<double> magnitudes;
    magnitudes.reserve(replicates);
    for (std::uint64_t r = 0; r < replicates; ++r) {
        const std::uint64_t sample_seed = splitmix64(seed ^ splitmix64(2 * r));
        const std::uint32_t bits =
            static_cast<std::uint32_t>(splitmix64(seed ^ splitmix64(2 * r + 1)) % lattice) + 1;
        magnitudes.push_back(std::abs(noise(sample_seed, Coalition{bits}, sigma)));
    }

    for (const double t : t_grid) {
        TailEntry entry;
        entry.t = t;
        std::uint64_t exceed = 0;
        for (const double mag : magnitudes)
            if (mag > t) ++exceed;
        entry.frequency = static_cast<double>(exceed) / static_cast<double>(replicates);
        entry.bound = sigma == 0.0 ? (t > 0.0 ? 0.0 : 2.0)
                                   : 2.0 * std::exp(-t * t / (2.0 * sigma * sigma));
        const double p = entry.frequency;
        entry.standard_error = std::sqrt(p * (1.0 - p) / static_cast<double>(replicates));
        entry.satisfied = entry.frequency <= entry.bound + 3.0 * entry.standard_error;
        report.entries.push_back(entry);
    }

    // Uniform event: max over every nonempty coalition, per replicate seed.
    report.uniform_replicates = std::min(replicates, kUniformSweepReplicates);
    std::uint64_t held = 0;
    for (std::uint64_t r = 0; r < report.uniform_replicates; ++r) {
        const std::uint64_t sweep_seed = splitmix64(seed ^ splitmix64(0x5eedULL + r));
        bool ok = true;
        for (std::uint64_t bits = 1; bits <= lattice && ok; ++bits)
            ok = std::abs(noise(sweep_seed, Coalition{static_cast<std::uint32_t>(bits)}, sigma)) <=
                 report.uniform_threshold;
        if (ok) ++held;
    }
    report.uniform_fraction =
        static_cast<double>(held) / static_cast<double>(report.uniform_replicates);
    return report;
}

GrowthFit growth_estimate(const std::vector<std::pair<int, std::uint64_t>>& points) {
    if (points.size() < 3) throw std::invalid_argument("at least three points required");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double count = static_cast<double>(points.size());
    for (const auto& [n, work] : points) {
        if (work == 0) throw std::invalid_argument("work units must be positive");
        const double x = n;
        const double y = std::log2(static_cast<double>(work));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = count * sxx - sx * sx;
    if (denom <= 0.0) throw std::invalid_argument("need at least two distinct n values");

    GrowthFit fit;
    fit.slope = (count * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / count;
    double rss = 0.0;
    for (const auto& [n, work] : points) {
        const double predicted = fit.slope * n + fit.intercept;
        const double resid = std::log2(static_cast<double>(work)) - predicted;
        rss += resid * resid;
    }
    fit.rmse = std::sqrt(rss / count);
    return fit;
}

}  // namespace csg
