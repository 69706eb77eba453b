#pragma once

#include <cstdint>
#include <functional>

#include "csg/core.hpp"

namespace csg {

/// Visits every partition of {0..n-1} exactly once, in restricted-growth-
/// string order. Guarded to n <= 12 (Bell(12) ~ 4.2M); GuardViolation beyond.
void for_each_partition(int n, const std::function<void(const CoalitionStructure&)>& visit);

/// Number of partitions visited by for_each_partition (Bell number).
std::uint64_t partition_count(int n);

struct BruteResult {
    CoalitionStructure best;
    double value = 0.0;
    std::uint64_t partitions = 0;  // partitions examined
};

/// Exhaustive optimum. Ties resolve to the canonically smaller structure
/// (blocks sorted ascending, then lexicographic comparison), so the result
/// is unique and reproducible.
BruteResult brute_opt(const ValueOracle& oracle);

}  // namespace csg
