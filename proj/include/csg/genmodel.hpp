#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "csg/core.hpp"

namespace csg {

/// Sparse-synergy instance: disjoint template coalitions with positive
/// weights plus independent Gaussian noise on every nonempty coalition.
/// The whole instance, noise included, is a pure function of its fields,
/// so models serialize as parameters only and are safe to share.
class SynergyModel final : public ValueOracle {
public:
    SynergyModel(int n, std::vector<Coalition> templates, std::vector<double> weights,
                 double sigma, std::uint64_t noise_seed);

    int agent_count() const override { return n_; }

    /// v(S): sum of weights of templates fully contained in S, plus noise.
    /// The empty coalition maps to exactly 0 with no noise term.
    double value(Coalition coalition) const override;

    /// Noiseless part of v(S): the template-indicator sum alone.
    double template_mass(Coalition coalition) const;

    const std::vector<Coalition>& templates() const { return templates_; }
    const std::vector<double>& weights() const { return weights_; }
    double sigma() const { return sigma_; }
    std::uint64_t noise_seed() const { return noise_seed_; }
    int template_count() const { return static_cast<int>(templates_.size()); }
    int max_template_size() const;

    bool operator==(const SynergyModel& o) const {
        return n_ == o.n_ && templates_ == o.templates_ && weights_ == o.weights_ &&
               sigma_ == o.sigma_ && noise_seed_ == o.noise_seed_;
    }

private:
    int n_;
    std::vector<Coalition> templates_;
    std::vector<double> weights_;
    double sigma_;
    std::uint64_t noise_seed_;
};

/// Stateless Gaussian noise draw keyed on (seed, coalition bitmask).
/// Repeated calls with the same key return the identical value; sigma = 0
/// returns exactly 0.
double noise(std::uint64_t seed, Coalition coalition, double sigma);

/// Margin quantities for a model's weight family. `rhs` is the noise scale
/// the weights must clear: 4*sigma*sqrt(log(2n)).
struct MarginReport {
    double gamma_gap = 0.0;   // minimal positive gap between distinct weights; +inf if none
    double gamma_min = 0.0;   // minimal weight
    double w_max = 0.0;       // maximal weight
    double rhs = 0.0;
    bool satisfied_gap = false;  // gamma_gap > rhs
    bool satisfied_min = false;  // gamma_min > rhs
};

MarginReport margin_report(const SynergyModel& model);

/// Quality thresholds used by the anytime experiments. Q1 is the near-optimal
/// band an exact method must enter; Q2 is the relative band the sparse
/// guarantee targets, with epsilon = 2*sigma*sqrt(log(2n))/gamma_min.
struct QualityThresholds {
    double q1 = 0.0;
    double q2 = 0.0;
    double epsilon = 0.0;
};

QualityThresholds quality_thresholds(const SynergyModel& model, double opt);

enum class Placement { Contiguous, Random, DisjointHalves };

/// Parameters for the random instance generator. With DisjointHalves
/// placement the template family is forced to k = 2 with the two templates
/// equal to the two halves of the agent set.
struct GeneratorParams {
    int n = 0;
    int k = 2;
    int template_size = 2;
    double w_lo = 2.0;
    double w_hi = 3.0;
    std::optional<std::vector<double>> explicit_weights;  // overrides the range draw
    double sigma = 0.0;
    Placement placement = Placement::Contiguous;
    std::uint64_t seed = 0;
    bool require_margin = false;  // redraw weights (bounded) until gamma_min clears rhs
};

/// Deterministic-in-seed instance generation. Throws std::invalid_argument
/// on infeasible placements (k * template_size > n, etc.).
SynergyModel generate(const GeneratorParams& params);

}  // namespace csg
