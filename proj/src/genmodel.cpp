#include "csg/genmodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace csg {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Counter-based stream: value i of the stream keyed by `seed`. Stateless,
// so any draw can be reproduced in isolation.
std::uint64_t stream(std::uint64_t seed, std::uint64_t counter) {
    return splitmix64(splitmix64(seed) ^ splitmix64(counter ^ 0x6a09e667f3bcc909ULL));
}

// Uniform in (0,1]: the +1 keeps log() finite.
double to_unit(std::uint64_t h) { return static_cast<double>((h >> 11) + 1) * 0x1.0p-53; }

double sqrt_log_2n(int n) { return std::sqrt(std::log(2.0 * n)); }

}  // namespace

SynergyModel::SynergyModel(int n, std::vector<Coalition> templates, std::vector<double> weights,
                           double sigma, std::uint64_t noise_seed)
    : n_(n),
      templates_(std::move(templates)),
      weights_(std::move(weights)),
      sigma_(sigma),
      noise_seed_(noise_seed) {
    if (n_ < 1 || n_ > kMaxAgents)
        throw std::invalid_argument("agent count must be in 1..20");
    if (templates_.size() != weights_.size())
        throw std::invalid_argument("one weight per template required");
    if (!(sigma_ >= 0.0) || !std::isfinite(sigma_))
        throw std::invalid_argument("sigma must be finite and nonnegative");
    Coalition seen;
    for (std::size_t j = 0; j < templates_.size(); ++j) {
        const Coalition t = templates_[j];
        if (t.size() == 0) throw std::invalid_argument("templates must be nonempty");
        if (!t.within(n_)) throw std::invalid_argument("template outside agent range");
        if (!t.disjoint_from(seen)) throw std::invalid_argument("templates must be pairwise disjoint");
        seen = seen | t;
        if (!(weights_[j] > 0.0) || !std::isfinite(weights_[j]))
            throw std::invalid_argument("weights must be finite and positive");
    }
}

double SynergyModel::template_mass(Coalition coalition) const {
    double mass = 0.0;
    for (std::size_t j = 0; j < templates_.size(); ++j)
        if (coalition.contains_all(templates_[j])) mass += weights_[j];
    return mass;
}

double SynergyModel::value(Coalition coalition) const {
    if (!coalition.within(n_)) throw std::out_of_range("coalition outside agent range");
    if (coalition.size() == 0) return 0.0;
    return template_mass(coalition) + noise(noise_seed_, coalition, sigma_);
}

int SynergyModel::max_template_size() const {
    int m = 0;
    for (const Coalition t : templates_) m = std::max(m, t.size());
    return m;
}

double noise(std::uint64_t seed, Coalition coalition, double sigma) {
    if (sigma == 0.0) return 0.0;
    const std::uint64_t key = static_cast<std::uint64_t>(coalition.bits);
    const double u1 = to_unit(stream(seed, key * 2));
    const double u2 = to_unit(stream(seed, key * 2 + 1));
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    return sigma * z;
}

MarginReport margin_report(const SynergyModel& model) {
    MarginReport report;
    const std::vector<double>& w = model.weights();
    report.rhs = 4.0 * model.sigma() * sqrt_log_2n(model.agent_count());
    report.gamma_min = w.empty() ? kInf : *std::min_element(w.begin(), w.end());
    report.w_max = w.empty() ? 0.0 : *std::max_element(w.begin(), w.end());
    report.gamma_gap = kInf;
    for (std::size_t i = 0; i < w.size(); ++i)
        for (std::size_t j = i + 1; j < w.size(); ++j) {
            const double gap = std::abs(w[i] - w[j]);
            if (gap > 0.0) report.gamma_gap = std::min(report.gamma_gap, gap);
        }
    report.satisfied_gap = report.gamma_gap > report.rhs;
    report.satisfied_min = report.gamma_min > report.rhs;
    return report;
}

QualityThresholds quality_thresholds(const SynergyModel& model, double opt) {
    QualityThresholds t;
    const double scale = model.sigma() * sqrt_log_2n(model.agent_count());
    t.q1 = opt - scale;
    const MarginReport m = margin_report(model);
    t.epsilon = std::isinf(m.gamma_min) ? 0.0 : 2.0 * scale / m.gamma_min;
    t.q2 = (1.0 - t.epsilon) * opt;
    return t;
}

SynergyModel generate(const GeneratorParams& p) {
    if (p.n < 1 || p.n > kMaxAgents) throw std::invalid_argument("agent count must be in 1..20");
    if (p.k < 0) throw std::invalid_argument("template count must be nonnegative");
    if (!(p.sigma >= 0.0)) throw std::invalid_argument("sigma must be nonnegative");

    // Template placement.
    std::vector<Coalition> templates;
    std::uint64_t counter = 0;  // shared counter for every RNG use below
    if (p.placement == Placement::DisjointHalves) {
        if (p.k != 2) throw std::invalid_argument("halves placement requires exactly two templates");
        const int half = p.n / 2;
        if (half == 0) throw std::invalid_argument("halves placement needs at least two agents");
        Coalition lo, hi;
        for (int a = 0; a < half; ++a) lo = lo | Coalition::single(a);
        for (int a = half; a < p.n; ++a) hi = hi | Coalition::single(a);
        templates = {lo, hi};
    } else {
        if (p.k > 0 && p.template_size < 1)
            throw std::invalid_argument("template size must be positive");
        if (p.k * p.template_size > p.n)
            throw std::invalid_argument("templates do not fit disjointly");
        std::vector<int> order(static_cast<std::size_t>(p.n));
        for (int a = 0; a < p.n; ++a) order[static_cast<std::size_t>(a)] = a;
        if (p.placement == Placement::Random) {
            // Fisher-Yates on our own stream: identical output on every platform.
            for (int i = p.n - 1; i > 0; --i) {
                const std::uint64_t r = stream(p.seed, counter++);
                const int j = static_cast<int>(r % static_cast<std::uint64_t>(i + 1));
                std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
            }
        }
        for (int j = 0; j < p.k; ++j) {
            Coalition t;
            for (int s = 0; s < p.template_size; ++s)
                t = t | Coalition::single(order[static_cast<std::size_t>(j * p.template_size + s)]);
            templates.push_back(t);
        }
    }
    const int k = static_cast<int>(templates.size());

    // Weight draw, optionally redrawn until the margin condition holds.
    const double rhs = 4.0 * p.sigma * sqrt_log_2n(p.n);
    std::vector<double> weights;
    if (p.explicit_weights) {
        weights = *p.explicit_weights;
        if (static_cast<int>(weights.size()) != k)
            throw std::invalid_argument("explicit weights must match template count");
    } else {
        if (!(p.w_lo <= p.w_hi) || !(p.w_lo > 0.0))
            throw std::invalid_argument("weight range must be positive with w_lo <= w_hi");
        constexpr int kMaxAttempts = 100;
        for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
            weights.clear();
            for (int j = 0; j < k; ++j) {
                const double u = static_cast<double>(stream(p.seed, counter++) >> 11) * 0x1.0p-53;
                weights.push_back(p.w_lo + u * (p.w_hi - p.w_lo));
            }
            if (!p.require_margin) break;
            const double w_min = weights.empty() ? kInf : *std::min_element(weights.begin(), weights.end());
            if (w_min > rhs) break;
            if (attempt == kMaxAttempts - 1)
                throw std::runtime_error("margin condition not met within redraw budget");
        }
    }
    if (p.require_margin) {
        const double w_min = weights.empty() ? kInf : *std::min_element(weights.begin(), weights.end());
        if (!(w_min > rhs)) throw std::runtime_error("margin condition not met within redraw budget");
    }

    return SynergyModel(p.n, std::move(templates), std::move(weights), p.sigma, p.seed);
}

}  // namespace csg
