#include "csg/core.hpp"

#include <algorithm>
#include <bit>
#include <sstream>
#include <stdexcept>

namespace csg {

Coalition Coalition::of(std::initializer_list<int> agents) {
    return of(std::vector<int>(agents));
}

Coalition Coalition::of(const std::vector<int>& agents) {
    std::uint32_t bits = 0;
    for (int a : agents) {
        if (a < 0 || a >= kMaxAgents) {
            throw std::out_of_range("agent index " + std::to_string(a) + " outside 0.." +
                                    std::to_string(kMaxAgents - 1));
        }
        bits |= std::uint32_t{1} << a;
    }
    return Coalition(bits);
}

Coalition Coalition::single(int agent) { return of({agent}); }

int Coalition::size() const { return std::popcount(bits); }

std::vector<int> Coalition::agents() const {
    std::vector<int> out;
    for (int a = 0; a < kMaxAgents; ++a) {
        if (contains(a)) out.push_back(a);
    }
    return out;
}

std::string Coalition::to_string() const {
    std::ostringstream os;
    os << '{';
    bool first = true;
    for (int a : agents()) {
        if (!first) os << ',';
        os << a;
        first = false;
    }
    os << '}';
    return os.str();
}

std::string CoalitionStructure::to_string() const {
    std::ostringstream os;
    os << '{';
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (i) os << ',';
        os << blocks[i].to_string();
    }
    os << '}';
    return os.str();
}

TableOracle::TableOracle(int n, std::vector<double> values) : n_(n), values_(std::move(values)) {
    if (n < 0 || n > kMaxAgents) throw std::invalid_argument("agent count outside 0..20");
    if (values_.size() != (std::size_t{1} << n)) {
        throw std::invalid_argument("value table must have exactly 2^n entries");
    }
}

double TableOracle::value(Coalition coalition) const {
    if (!coalition.within(n_)) throw std::out_of_range("coalition has bits outside the agent set");
    return values_[coalition.bits];
}

ValidationResult validate_structure(const CoalitionStructure& structure, int n) {
    if (n < 1 || n > kMaxAgents) return {false, "agent count outside 1..20"};
    Coalition seen;
    for (const Coalition& block : structure.blocks) {
        if (block.empty()) return {false, "empty block"};
        if (!block.within(n)) {
            return {false, "block " + block.to_string() + " has agents outside 0.." +
                               std::to_string(n - 1)};
        }
        Coalition overlap = block & seen;
        if (!overlap.empty()) {
            return {false, "overlap on agent " + std::to_string(overlap.agents().front())};
        }
        seen = seen | block;
    }
    Coalition missing = Coalition::full(n).minus(seen);
    if (!missing.empty()) {
        return {false, "agent " + std::to_string(missing.agents().front()) + " uncovered"};
    }
    return {};
}

CoalitionStructure canonicalize(const CoalitionStructure& structure) {
    CoalitionStructure out = structure;
    std::sort(out.blocks.begin(), out.blocks.end());
    return out;
}

double structure_value(const CoalitionStructure& structure, const ValueOracle& oracle) {
    ValidationResult check = validate_structure(structure, oracle.agent_count());
    if (!check.ok()) throw std::invalid_argument("invalid partition: " + check.message);
    double total = 0.0;
    for (const Coalition& block : structure.blocks) total += oracle.value(block);
    return total;
}

}  // namespace csg
