#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "csg/core.hpp"
#include "csg/genmodel.hpp"
#include "csg/trace.hpp"

namespace csg {

/// Earliest trace record whose incumbent reaches q (within 1e-9), if any.
std::optional<TraceRecord> time_to_threshold(const AnytimeTrace& trace, double q);

enum class PoolMode { Prior, All };

struct RaceOptions {
    std::uint64_t node_budget = 1u << 20;
    PoolMode pool_mode = PoolMode::Prior;
    std::optional<int> size_cap;          // applied in All mode
    int distractors_per_agent = 4;
    std::uint64_t pool_seed = 0;          // 0 means reuse the instance's noise seed
    bool include_l1 = false;
    std::optional<double> lambda;         // default: the noise ceiling
};

struct SolverReport {
    std::string solver_id;
    std::string work_unit_kind;
    bool ran = false;
    std::string skip_reason;              // set when a guard rejected this solver
    double final_value = 0.0;
    std::uint64_t total_work = 0;
    std::uint64_t oracle_queries = 0;
    std::optional<TraceRecord> q1_crossing;
    std::optional<TraceRecord> q2_crossing;
    AnytimeTrace trace;
};

struct RaceReport {
    int n = 0;
    int template_count = 0;
    double sigma = 0.0;
    std::uint64_t noise_seed = 0;
    double opt = 0.0;
    QualityThresholds thresholds;
    MarginReport margin;
    std::vector<SolverReport> solvers;
    bool separated = false;

    const SolverReport* find(const std::string& id) const;
};

/// Runs the exact solvers and the sparse solver on one instance with a
/// fresh counting oracle each, derives Q1/Q2 from the DP optimum, and
/// issues the separation verdict: the sparse solver reached Q2 at an
/// oracle-query count at which neither exact solver had reached Q1.
/// The DP solve is mandatory (it supplies OPT); other solvers whose guards
/// reject the instance are reported as skipped and the race continues.
RaceReport run_race(const SynergyModel& model, const RaceOptions& options = {});

struct TailEntry {
    double t = 0.0;
    double frequency = 0.0;
    double bound = 0.0;           // 2 exp(-t^2 / 2 sigma^2)
    double standard_error = 0.0;  // binomial, from the observed frequency
    bool satisfied = false;       // frequency <= bound + 3 * standard_error
};

struct TailReport {
    double sigma = 0.0;
    int n = 0;
    std::uint64_t replicates = 0;
    std::uint64_t uniform_replicates = 0;
    double uniform_threshold = 0.0;  // 2 sigma sqrt(log 2n)
    double uniform_fraction = 0.0;   // fraction of replicates with max |noise| <= threshold
    std::vector<TailEntry> entries;
};

/// Monte-Carlo check of the noise tail against its sub-Gaussian bound.
/// Frequencies use `replicates` independent (seed, coalition) samples; the
/// uniform event sweeps every nonempty coalition for up to 200 replicate
/// seeds. Requires replicates >= 100 and n <= 16.
TailReport concentration_check(double sigma, int n, const std::vector<double>& t_grid,
                               std::uint64_t replicates, std::uint64_t seed = 0);

struct GrowthFit {
    double slope = 0.0;      // bits of work per agent
    double intercept = 0.0;
    double rmse = 0.0;
};

/// Least-squares fit of log2(work) against n. Requires at least three
/// points, positive work, and at least two distinct n values.
GrowthFit growth_estimate(const std::vector<std::pair<int, std::uint64_t>>& points);

}  // namespace csg
