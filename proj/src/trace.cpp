#include "csg/trace.hpp"

#include <algorithm>
#include <stdexcept>

namespace csg {

void AnytimeTrace::append(std::uint64_t work_units, std::int64_t wall_ns, double value,
                          std::string event, std::uint64_t oracle_queries) {
    if (!records_.empty()) {
        const TraceRecord& last = records_.back();
        if (work_units < last.work_units)
            throw std::logic_error("trace work_units must be nondecreasing");
        value = std::max(value, last.incumbent);
        oracle_queries = std::max(oracle_queries, last.oracle_queries);
    }
    records_.push_back(TraceRecord{work_units, wall_ns, value, std::move(event), oracle_queries});
}

double AnytimeTrace::best() const {
    if (records_.empty()) throw std::logic_error("empty trace has no incumbent");
    return records_.back().incumbent;
}

std::optional<TraceRecord> AnytimeTrace::first_at_least(double threshold) const {
    for (const TraceRecord& r : records_)
        if (r.incumbent >= threshold) return r;
    return std::nullopt;
}

}  // namespace csg
