#include "csg/dp.hpp"

#include <bit>
#include <chrono>
#include <limits>
#include <stdexcept>
#include <string>

namespace csg {
namespace {

constexpr int kDpMaxAgents = 16;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::int64_t elapsed_ns(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(
               std::chrono::steady_clock::now() - start)
        .count();
}

}  // namespace

CoalitionStructure reconstruct(const DpTable& table, Coalition subset) {
    if (subset.size() > table.max_size)
        throw std::invalid_argument("subset larger than the processed table range");
    CoalitionStructure cs;
    std::uint32_t rest = subset.bits;
    while (rest != 0) {
        const std::uint32_t block = table.split[rest];
        if (block == 0 || (block & rest) != block)
            throw std::logic_error("corrupt split chain");
        cs.blocks.push_back(Coalition{block});
        rest ^= block;
    }
    return canonicalize(cs);
}

std::pair<CoalitionStructure, double> dp_incumbent(const DpTable& table, int max_size) {
    if (max_size < 1 || max_size > table.max_size)
        throw std::invalid_argument("requested size level not processed");
    const Coalition full = Coalition::full(table.n);
    if (max_size >= table.n) return {reconstruct(table, full), table.f[full.bits]};

    // Greedy disjoint cover by the best stored subset optima. Singletons are
    // always stored, so the cover is total; f(S) dominates S's singleton sum,
    // so this can only improve on the all-singletons baseline.
    CoalitionStructure cs;
    double total = 0.0;
    std::uint32_t covered = 0;
    while (covered != full.bits) {
        const std::uint32_t remaining = full.bits & ~covered;
        double best = kNegInf;
        std::uint32_t best_subset = 0;
        for (std::uint32_t s = remaining; s != 0; s = (s - 1) & remaining) {
            if (std::popcount(s) > max_size) continue;
            const double fs = table.f[s];
            const bool better =
                fs > best ||
                (fs == best && (std::popcount(s) < std::popcount(best_subset) ||
                                (std::popcount(s) == std::popcount(best_subset) && s < best_subset)));
            if (better) {
                best = fs;
                best_subset = s;
            }
        }
        for (const Coalition block : reconstruct(table, Coalition{best_subset}).blocks)
            cs.blocks.push_back(block);
        total += best;
        covered |= best_subset;
    }
    return {canonicalize(cs), total};
}

DpResult dp_solve(const ValueOracle& oracle, AnytimeTrace& trace, const DpOptions& options) {
    const int n = oracle.agent_count();
    if (n < 1 || n > kDpMaxAgents)
        throw GuardViolation("subset table supports 1..16 agents");
    const int max_size = options.max_size == 0 ? n : options.max_size;
    if (max_size < 1 || max_size > n)
        throw std::invalid_argument("max subset size must be in 1..n");

    const auto start = std::chrono::steady_clock::now();
    CountingOracle counted(oracle);
    const std::size_t table_size = std::size_t{1} << n;

    trace.solver_id = trace.solver_id.empty() ? "dp" : trace.solver_id;
    trace.work_unit_kind = "subsets_processed";

    DpResult result;
    DpTable& table = result.table;
    table.n = n;
    table.value_of.assign(table_size, 0.0);
    table.f.assign(table_size, kNegInf);
    table.split.assign(table_size, 0);
    table.f[0] = 0.0;

    std::vector<std::vector<std::uint32_t>> by_size(static_cast<std::size_t>(n) + 1);
    for (std::uint32_t s = 1; s < table_size; ++s)
        by_size[static_cast<std::size_t>(std::popcount(s))].push_back(s);

    for (int level = 1; level <= max_size; ++level) {
        for (const std::uint32_t s : by_size[static_cast<std::size_t>(level)]) {
            table.value_of[s] = counted.value(Coalition{s});
            // Split off the block containing the lowest agent; enumerating
            // only those blocks visits each partition of s exactly once.
            // Keeping s whole is tried first so it wins ties; after that,
            // ascending block order makes the smallest bitmask win.
            const std::uint32_t low = s & (~s + 1);
            const std::uint32_t rest = s ^ low;
            double best = table.value_of[s];  // block = s, remainder empty
            std::uint32_t best_block = s;
            for (std::uint32_t t = 0; t != rest; t = (t - rest) & rest) {
                const std::uint32_t block = t | low;
                const double candidate = table.value_of[block] + table.f[s ^ block];
                if (candidate > best) {
                    best = candidate;
                    best_block = block;
                }
            }
            table.f[s] = best;
            table.split[s] = best_block;
            ++table.processed;
        }
        table.max_size = level;
        const auto [cs, value] = dp_incumbent(table, level);
        trace.append(table.processed + 1, elapsed_ns(start), value,
                     "level " + std::to_string(level), counted.queries());
        (void)cs;
    }

    auto [best_cs, best_value] = dp_incumbent(table, table.max_size);
    result.best = std::move(best_cs);
    result.value = best_value;
    return result;
}

}  // namespace csg
