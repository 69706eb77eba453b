#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "csg/core.hpp"
#include "csg/trace.hpp"

namespace csg {

/// Subset dynamic program state. Filled level by level (subset size 1, 2,
/// ...), so a table cut off early still answers optimally for every
/// coalition of at most the processed size.
struct DpTable {
    int n = 0;
    int max_size = 0;                 // highest subset size fully processed
    std::vector<double> value_of;     // cached oracle values, indexed by bitmask
    std::vector<double> f;            // optimal partition value of each subset
    std::vector<std::uint32_t> split;  // chosen block containing the subset's lowest agent
    std::uint64_t processed = 0;      // nonempty subsets finalized so far
};

struct DpOptions {
    int max_size = 0;  // 0 means all levels up to n
};

struct DpResult {
    DpTable table;
    CoalitionStructure best;
    double value = 0.0;
};

/// Unwinds the chosen-block chain for a subset whose size is within the
/// processed range, yielding a partition of that subset worth exactly f.
CoalitionStructure reconstruct(const DpTable& table, Coalition subset);

/// Best full structure assemblable from levels 1..max_size: exact once
/// max_size reaches n, otherwise a greedy disjoint cover by stored subset
/// optima (max f; ties to smaller size, then smaller bitmask) with singleton
/// fill. Never queries the oracle.
std::pair<CoalitionStructure, double> dp_incumbent(const DpTable& table, int max_size);

/// Exhaustive subset DP over all 2^n coalitions (3^n transitions), querying
/// each coalition's value exactly once. Guarded to n <= 16. One trace record
/// per completed size level; work_units counts subsets processed, including
/// the empty base case.
DpResult dp_solve(const ValueOracle& oracle, AnytimeTrace& trace, const DpOptions& options = {});

}  // namespace csg
