#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace csg {

/// One anytime progress sample. `work_units` is the solver's own progress
/// meter (deterministic); `wall_ns` is elapsed wall clock (informational
/// only, never used in comparisons); `oracle_queries` snapshots the value-
/// oracle counter so different solvers can be compared on equal footing.
struct TraceRecord {
    std::uint64_t work_units = 0;
    std::int64_t wall_ns = 0;
    double incumbent = 0.0;
    std::string event;
    std::uint64_t oracle_queries = 0;
};

/// Append-only anytime log. The incumbent column is forced monotone
/// nondecreasing at append time: a sample below the running best is recorded
/// at the running best, since an anytime reader always keeps the best
/// solution seen so far.
class AnytimeTrace {
public:
    std::string solver_id;        // e.g. "dp", "bnb", "greedy", "l1"
    std::string work_unit_kind;   // e.g. "subsets_processed", "nodes_explored"

    void append(std::uint64_t work_units, std::int64_t wall_ns, double value,
                std::string event, std::uint64_t oracle_queries = 0);

    const std::vector<TraceRecord>& records() const { return records_; }
    bool empty() const { return records_.empty(); }
    std::size_t size() const { return records_.size(); }

    /// Best incumbent so far; meaningful only when not empty.
    double best() const;

    /// Earliest record whose incumbent reaches `threshold`, if any.
    std::optional<TraceRecord> first_at_least(double threshold) const;

    /// Total value-oracle queries charged to this run so far.
    std::uint64_t total_oracle_queries() const {
        return records_.empty() ? 0 : records_.back().oracle_queries;
    }

private:
    std::vector<TraceRecord> records_;
};

}  // namespace csg
