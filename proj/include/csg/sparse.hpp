#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "csg/core.hpp"
#include "csg/genmodel.hpp"
#include "csg/trace.hpp"

namespace csg {

/// Candidate coalitions with their cached oracle values. Solvers in this
/// module only ever look at the pool (plus singletons for fill), which is
/// what keeps their work polynomial.
struct CandidatePool {
    int n = 0;
    std::vector<Coalition> candidates;
    std::vector<double> values;
    std::optional<int> size_cap;
    std::uint64_t build_queries = 0;

    int size() const { return static_cast<int>(candidates.size()); }
};

/// Every nonempty coalition of size <= size_cap (all, when absent; guarded
/// to n <= 16 in that case).
CandidatePool build_pool_all(const ValueOracle& oracle, std::optional<int> size_cap = {});

/// Small prior pool: the given prior coalitions (typically an instance's
/// templates), every singleton, and `distractors_per_agent * n` pseudorandom
/// extra coalitions drawn deterministically from `seed`. Models the
/// candidate-set reading where a sparse method starts from a proposal list
/// rather than the full lattice. Values are fetched through `oracle` so a
/// counting wrapper sees the build cost.
CandidatePool build_pool_prior(const ValueOracle& oracle, const std::vector<Coalition>& priors,
                               std::uint64_t seed, int distractors_per_agent = 4);

struct SparseSelection {
    std::vector<int> chosen;              // candidate indices, in pick order
    std::vector<std::uint8_t> incidence;  // 1 exactly at chosen indices
    Coalition covered;                    // union of chosen candidates
    int iterations = 0;                   // picks attempted, including rolled-back ones
    std::uint64_t candidate_evals = 0;    // total pool scans, bounded by n * M
};

/// Agents not covered by any chosen candidate.
Coalition residual_agents(const SparseSelection& selection, int n);

struct SparseResult {
    CoalitionStructure structure;
    SparseSelection selection;
    double value = 0.0;
};

/// Greedy maximal-value selection: repeatedly take the highest-value
/// candidate disjoint from everything chosen so far (ties to smaller size,
/// then smaller bitmask); stop when nothing disjoint has positive value or
/// all agents are covered; fill the rest with singletons. One trace record
/// per pick, work = cumulative candidate evaluations. The incumbent is the
/// best singleton-completed prefix of the pick sequence (a pick that covers
/// singletons worth more than itself would otherwise lower it), and the
/// returned structure and selection describe that prefix.
SparseResult greedy_solve(const ValueOracle& oracle, const CandidatePool& pool,
                          AnytimeTrace& trace);

/// One-shot l1-penalized relaxation: maximize sum x_i (v_i - lambda) under
/// per-agent load <= 1, x in [0,1]^M; round by descending x_i (ties to
/// larger value, then lower index) accepting disjoint candidates with
/// x_i >= 0.5; fill with singletons. LP failures raise with context.
SparseResult l1_solve(const ValueOracle& oracle, const CandidatePool& pool, double lambda,
                      AnytimeTrace& trace);

/// The noise ceiling 2*sigma*sqrt(log(2n)): the default l1 penalty, sized so
/// pure-noise candidates price out under the uniform noise event.
double default_lambda(const SynergyModel& model);

}  // namespace csg
