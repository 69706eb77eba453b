#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace csg {

/// Thrown when a problem size exceeds a solver's documented operating range
/// (as opposed to malformed input, which raises std::invalid_argument).
/// The CLI maps this to its own exit code so scripts can tell the two apart.
class GuardViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Maximum number of agents an instance may carry. Keeps every subset
/// representable in one machine word and all 2^n / 3^n sweeps desk-sized.
inline constexpr int kMaxAgents = 20;

/// A set of agents encoded as a bitmask over indices 0..n-1.
/// The empty coalition is representable but only valid as the value-oracle
/// identity (v of the empty set is 0); blocks of a structure are nonempty.
struct Coalition {
    std::uint32_t bits = 0;

    constexpr Coalition() = default;
    constexpr explicit Coalition(std::uint32_t mask) : bits(mask) {}

    static Coalition of(std::initializer_list<int> agents);
    static Coalition of(const std::vector<int>& agents);
    static Coalition single(int agent);
    static constexpr Coalition full(int n) {
        return Coalition((n >= 32) ? ~std::uint32_t{0} : ((std::uint32_t{1} << n) - 1));
    }

    constexpr bool empty() const { return bits == 0; }
    int size() const;
    constexpr bool contains(int agent) const { return (bits >> agent) & 1u; }
    constexpr bool contains_all(Coalition other) const { return (bits & other.bits) == other.bits; }
    constexpr bool disjoint_from(Coalition other) const { return (bits & other.bits) == 0; }
    constexpr bool within(int n) const { return (bits & ~full(n).bits) == 0; }

    constexpr Coalition operator|(Coalition o) const { return Coalition(bits | o.bits); }
    constexpr Coalition operator&(Coalition o) const { return Coalition(bits & o.bits); }
    constexpr Coalition minus(Coalition o) const { return Coalition(bits & ~o.bits); }

    constexpr bool operator==(const Coalition&) const = default;
    constexpr auto operator<=>(const Coalition&) const = default;

    std::vector<int> agents() const;
    std::string to_string() const;
};

/// A partition of the agent set into disjoint nonempty coalitions.
/// Canonical form orders blocks ascending by bitmask value so that equality
/// is plain field equality.
struct CoalitionStructure {
    std::vector<Coalition> blocks;

    CoalitionStructure() = default;
    explicit CoalitionStructure(std::vector<Coalition> b) : blocks(std::move(b)) {}

    bool operator==(const CoalitionStructure&) const = default;
    std::string to_string() const;
};

/// One coalition-value pair, as returned by a characteristic-function query.
struct ValueQuery {
    Coalition coalition;
    double value = 0.0;
};

/// Characteristic-function interface. Implementations must be pure: the same
/// coalition always maps to the same value, so oracles are safe to share
/// across concurrent solver runs.
class ValueOracle {
public:
    virtual ~ValueOracle() = default;
    virtual int agent_count() const = 0;
    virtual double value(Coalition coalition) const = 0;
};

/// Oracle adapter that counts every value query made through it.
/// Used by the anytime harness to charge solvers in a machine-independent
/// work currency.
class CountingOracle final : public ValueOracle {
public:
    explicit CountingOracle(const ValueOracle& inner) : inner_(inner) {}
    int agent_count() const override { return inner_.agent_count(); }
    double value(Coalition coalition) const override {
        ++queries_;
        return inner_.value(coalition);
    }
    std::uint64_t queries() const { return queries_; }

private:
    const ValueOracle& inner_;
    mutable std::uint64_t queries_ = 0;
};

/// Table-backed oracle for tests and for callers that already hold a dense
/// value vector indexed by bitmask.
class TableOracle final : public ValueOracle {
public:
    TableOracle(int n, std::vector<double> values);
    int agent_count() const override { return n_; }
    double value(Coalition coalition) const override;

private:
    int n_;
    std::vector<double> values_;
};

/// Result of a structure validity check. `ok()` is true iff disjointness,
/// coverage and nonemptiness all hold; otherwise `message` names the first
/// violated invariant.
struct ValidationResult {
    bool valid = true;
    std::string message;
    bool ok() const { return valid; }
};

ValidationResult validate_structure(const CoalitionStructure& structure, int n);

/// Returns the structure with blocks sorted ascending by bitmask value.
/// Idempotent; preserves the block set and hence the structure value.
CoalitionStructure canonicalize(const CoalitionStructure& structure);

/// Exact welfare of a structure: the sum of oracle values over its blocks.
/// Throws std::invalid_argument naming the violated invariant if the blocks
/// do not form a partition of the oracle's agent set.
double structure_value(const CoalitionStructure& structure, const ValueOracle& oracle);

}  // namespace csg
