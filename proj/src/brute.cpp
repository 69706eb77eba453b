#include "csg/brute.hpp"

#include <limits>
#include <stdexcept>
#include <vector>

namespace csg {
namespace {

constexpr int kBruteMaxAgents = 12;

CoalitionStructure from_labels(const std::vector<int>& label, int blocks) {
    CoalitionStructure cs;
    cs.blocks.assign(static_cast<std::size_t>(blocks), Coalition{});
    for (int a = 0; a < static_cast<int>(label.size()); ++a) {
        Coalition& block = cs.blocks[static_cast<std::size_t>(label[static_cast<std::size_t>(a)])];
        block = block | Coalition::single(a);
    }
    return cs;
}

}  // namespace

void for_each_partition(int n, const std::function<void(const CoalitionStructure&)>& visit) {
    if (n < 1) throw std::invalid_argument("agent count must be positive");
    if (n > kBruteMaxAgents)
        throw GuardViolation("exhaustive enumeration supports 1..12 agents");
    // Restricted growth strings: label[0] = 0 and label[i] <= max(label[<i]) + 1.
    std::vector<int> label(static_cast<std::size_t>(n), 0);
    std::vector<int> prefix_max(static_cast<std::size_t>(n), 0);
    for (;;) {
        visit(from_labels(label, prefix_max[static_cast<std::size_t>(n - 1)] + 1));
        int i = n - 1;
        while (i > 0 && label[static_cast<std::size_t>(i)] > prefix_max[static_cast<std::size_t>(i - 1)]) --i;
        if (i == 0) return;
        ++label[static_cast<std::size_t>(i)];
        prefix_max[static_cast<std::size_t>(i)] =
            std::max(prefix_max[static_cast<std::size_t>(i - 1)], label[static_cast<std::size_t>(i)]);
        for (int j = i + 1; j < n; ++j) {
            label[static_cast<std::size_t>(j)] = 0;
            prefix_max[static_cast<std::size_t>(j)] = prefix_max[static_cast<std::size_t>(i)];
        }
    }
}

std::uint64_t partition_count(int n) {
    if (n < 0 || n > kMaxAgents) throw std::invalid_argument("agent count must be in 0..20");
    // Bell triangle.
    std::vector<std::uint64_t> row{1};
    for (int i = 0; i < n; ++i) {
        std::vector<std::uint64_t> next;
        next.reserve(row.size() + 1);
        next.push_back(row.back());
        for (std::uint64_t cell : row) next.push_back(next.back() + cell);
        row = std::move(next);
    }
    return row.front();
}

BruteResult brute_opt(const ValueOracle& oracle) {
    BruteResult result;
    result.value = -std::numeric_limits<double>::infinity();
    CoalitionStructure best_canonical;
    for_each_partition(oracle.agent_count(), [&](const CoalitionStructure& cs) {
        ++result.partitions;
        double total = 0.0;
        for (const Coalition block : cs.blocks) total += oracle.value(block);
        if (total < result.value) return;
        CoalitionStructure canonical = canonicalize(cs);
        const bool improves = total > result.value;
        const bool tie_breaks = total == result.value && canonical.blocks < best_canonical.blocks;
        if (improves || tie_breaks) {
            result.value = total;
            best_canonical = std::move(canonical);
        }
    });
    result.best = best_canonical;
    return result;
}

}  // namespace csg
