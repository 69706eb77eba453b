#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "csg/core.hpp"
#include "csg/dp.hpp"
#include "csg/genmodel.hpp"
#include "csg/harness.hpp"
#include "csg/sparse.hpp"
#include "csg/trace.hpp"

using namespace csg;

namespace {

SynergyModel halves_model(int n, double sigma, std::uint64_t seed) {
    GeneratorParams params;
    params.n = n;
    params.placement = Placement::DisjointHalves;
    params.sigma = sigma;
    params.seed = seed;
    return generate(params);
}

}  // namespace

TEST_CASE("time_to_threshold finds the earliest qualifying record") {
    AnytimeTrace trace;
    trace.append(1, 10, 1.0, "a", 5);
    trace.append(2, 20, 3.0, "b", 6);
    trace.append(3, 30, 2.5, "c", 7);
    trace.append(4, 40, 3.0, "d", 8);

    const auto hit = time_to_threshold(trace, 3.0);
    REQUIRE(hit.has_value());
    CHECK(hit->work_units == 2);
    CHECK(hit->event == "b");

    // Tolerance lets a value a hair under the threshold qualify.
    const auto close = time_to_threshold(trace, 3.0 + 5e-10);
    REQUIRE(close.has_value());
    CHECK(close->work_units == 2);

    CHECK_FALSE(time_to_threshold(trace, 3.1).has_value());
    const auto first = time_to_threshold(trace, -100.0);
    REQUIRE(first.has_value());
    CHECK(first->work_units == 1);

    const AnytimeTrace empty;
    CHECK_FALSE(time_to_threshold(empty, 0.0).has_value());
}

TEST_CASE("race on a noiseless instance separates the paradigms") {
    const SynergyModel m = halves_model(10, 0.0, 42);
    const RaceReport report = run_race(m);

    CHECK(report.n == 10);
    CHECK(report.template_count == 2);
    CHECK(report.sigma == 0.0);
    CHECK(report.opt > 0.0);
    // Noiseless thresholds collapse onto the optimum.
    CHECK(report.thresholds.q1 == doctest::Approx(report.opt));
    CHECK(report.thresholds.q2 == doctest::Approx(report.opt));
    CHECK(report.thresholds.epsilon == doctest::Approx(0.0));

    const SolverReport* dp = report.find("dp");
    REQUIRE(dp != nullptr);
    CHECK(dp->ran);
    CHECK(dp->final_value == doctest::Approx(report.opt));
    REQUIRE(dp->q1_crossing.has_value());

    const SolverReport* greedy = report.find("greedy");
    REQUIRE(greedy != nullptr);
    CHECK(greedy->ran);
    REQUIRE(greedy->q2_crossing.has_value());

    // The sparse lane reads far fewer values than the exact lanes.
    CHECK(greedy->q2_crossing->oracle_queries < dp->q1_crossing->oracle_queries);
    CHECK(report.separated);

    CHECK(report.find("l1") == nullptr);  // not requested
    CHECK(report.find("nonesuch") == nullptr);
}

TEST_CASE("race skips guarded solvers but keeps the verdict machinery") {
    // n = 15 rejects the uncapped set-partition build (limit 14) while dp
    // (limit 16) and the prior-pool greedy still run.
    const SynergyModel m = halves_model(15, 0.0, 7);
    RaceOptions options;
    const RaceReport report = run_race(m, options);

    const SolverReport* bnb = report.find("bnb");
    REQUIRE(bnb != nullptr);
    CHECK_FALSE(bnb->ran);
    CHECK(!bnb->skip_reason.empty());
    CHECK(bnb->work_unit_kind == "nodes_explored");

    const SolverReport* dp = report.find("dp");
    REQUIRE(dp != nullptr);
    CHECK(dp->ran);
    const SolverReport* greedy = report.find("greedy");
    REQUIRE(greedy != nullptr);
    CHECK(greedy->ran);
    CHECK(report.separated);  // greedy beats dp; the skipped lane cannot object
}

TEST_CASE("race reports are deterministic apart from wall time") {
    const SynergyModel m = halves_model(8, 0.05, 21);
    RaceOptions options;
    options.include_l1 = true;
    const RaceReport a = run_race(m, options);
    const RaceReport b = run_race(m, options);

    REQUIRE(a.solvers.size() == b.solvers.size());
    CHECK(a.opt == b.opt);
    CHECK(a.separated == b.separated);
    for (std::size_t i = 0; i < a.solvers.size(); ++i) {
        const SolverReport& x = a.solvers[i];
        const SolverReport& y = b.solvers[i];
        CHECK(x.solver_id == y.solver_id);
        CHECK(x.ran == y.ran);
        CHECK(x.final_value == y.final_value);
        CHECK(x.total_work == y.total_work);
        CHECK(x.oracle_queries == y.oracle_queries);
        REQUIRE(x.trace.records().size() == y.trace.records().size());
        for (std::size_t r = 0; r < x.trace.records().size(); ++r) {
            CHECK(x.trace.records()[r].work_units == y.trace.records()[r].work_units);
            CHECK(x.trace.records()[r].incumbent == y.trace.records()[r].incumbent);
            CHECK(x.trace.records()[r].event == y.trace.records()[r].event);
            CHECK(x.trace.records()[r].oracle_queries == y.trace.records()[r].oracle_queries);
        }
    }
}

TEST_CASE("race instrumentation matches an external query count") {
    const SynergyModel m = halves_model(8, 0.0, 13);
    const RaceReport report = run_race(m);

    // dp reads the whole lattice exactly once per subset.
    const SolverReport* dp = report.find("dp");
    REQUIRE(dp != nullptr);
    CHECK(dp->oracle_queries == (1u << 8) - 1);

    // The greedy lane pays the pool build plus nothing extra (the pool holds
    // every singleton already).
    const SolverReport* greedy = report.find("greedy");
    REQUIRE(greedy != nullptr);
    CountingOracle counted(m);
    const CandidatePool pool = build_pool_prior(counted, m.templates(), m.noise_seed(), 4);
    CHECK(greedy->oracle_queries == counted.queries());
    CHECK(greedy->oracle_queries == pool.build_queries);
}

TEST_CASE("race separation fails honestly when the pool cannot help") {
    // A singleton-only pool (no templates offered as priors) caps the greedy
    // value at the singleton floor, far below Q2 on a template instance.
    const SynergyModel m = halves_model(8, 0.0, 99);
    RaceOptions options;
    options.distractors_per_agent = 0;
    const RaceReport withPriors = run_race(m, options);
    CHECK(withPriors.separated);  // priors alone still carry the mass

    // Strip the priors by racing a flat model: no templates, opt is the
    // singleton floor, greedy crosses instantly — and so does dp's first
    // incumbent, so no separation is possible.
    const SynergyModel flat(6, {}, {}, 0.0, 5);
    const RaceReport flatReport = run_race(flat);
    CHECK(flatReport.opt == doctest::Approx(0.0));
    CHECK_FALSE(flatReport.separated);
}

TEST_CASE("include_l1 adds a fourth lane with its own crossing") {
    const SynergyModel m = halves_model(10, 0.0, 314);
    RaceOptions options;
    options.include_l1 = true;
    const RaceReport report = run_race(m, options);
    const SolverReport* l1 = report.find("l1");
    REQUIRE(l1 != nullptr);
    CHECK(l1->ran);
    CHECK(l1->work_unit_kind == "lp_pivots");
    CHECK(l1->final_value == doctest::Approx(report.opt));
    REQUIRE(l1->q2_crossing.has_value());
}

TEST_CASE("concentration check verifies the sub-Gaussian tail") {
    const TailReport report = concentration_check(0.1, 8, {0.0, 0.1, 0.2, 0.4}, 2000, 17);
    CHECK(report.sigma == 0.1);
    CHECK(report.n == 8);
    CHECK(report.replicates == 2000);
    CHECK(report.uniform_replicates == 200);
    CHECK(report.uniform_threshold == doctest::Approx(0.2 * std::sqrt(std::log(16.0))));
    REQUIRE(report.entries.size() == 4);
    for (const TailEntry& e : report.entries) {
        CHECK(e.frequency >= 0.0);
        CHECK(e.frequency <= 1.0);
        CHECK(e.satisfied);  // Gaussian tails sit well under 2exp(-t^2/2s^2)
    }
    // t = 0: every magnitude exceeds zero (absent exact zeros), bound = 2.
    CHECK(report.entries[0].bound == doctest::Approx(2.0));
    CHECK(report.entries[0].frequency == doctest::Approx(1.0));
    // Frequencies decay along the grid.
    for (std::size_t i = 1; i < report.entries.size(); ++i)
        CHECK(report.entries[i].frequency <= report.entries[i - 1].frequency + 1e-12);
    // The uniform event sweeps all 255 coalitions; at threshold z = 3.33
    // standard deviations each survives with p around 0.99913, so the sweep
    // holds about 80% of the time. Anything above 0.7 is within three
    // binomial standard errors of that.
    CHECK(report.uniform_fraction >= 0.7);
}

TEST_CASE("concentration check degenerates cleanly at sigma zero") {
    const TailReport report = concentration_check(0.0, 6, {0.0, 0.5}, 500, 3);
    REQUIRE(report.entries.size() == 2);
    // All noise is exactly zero: nothing exceeds t = 0.
    CHECK(report.entries[0].frequency == doctest::Approx(0.0));
    CHECK(report.entries[0].satisfied);
    CHECK(report.entries[1].frequency == doctest::Approx(0.0));
    CHECK(report.entries[1].bound == doctest::Approx(0.0));
    CHECK(report.entries[1].satisfied);
    CHECK(report.uniform_fraction == doctest::Approx(1.0));
}

TEST_CASE("concentration check rejects bad arguments") {
    CHECK_THROWS_AS(concentration_check(0.1, 8, {0.1}, 99), std::invalid_argument);
    CHECK_THROWS_AS(concentration_check(-0.1, 8, {0.1}, 500), std::invalid_argument);
    CHECK_THROWS_AS(concentration_check(0.1, 8, {-0.1}, 500), std::invalid_argument);
    CHECK_THROWS_AS(concentration_check(0.1, 17, {0.1}, 500), GuardViolation);
    CHECK_THROWS_AS(concentration_check(0.1, 0, {0.1}, 500), GuardViolation);
}

TEST_CASE("growth fit recovers an exact exponential") {
    // work = 2^n exactly: slope 1, intercept 0, zero residual.
    const GrowthFit fit = growth_estimate({{8, 256}, {10, 1024}, {12, 4096}});
    CHECK(fit.slope == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(fit.rmse == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("growth fit sees constant work as flat") {
    const GrowthFit fit = growth_estimate({{8, 640}, {10, 640}, {12, 640}, {14, 640}});
    CHECK(fit.slope == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(std::log2(640.0)).epsilon(1e-9));
}

TEST_CASE("growth fit rejects degenerate inputs") {
    CHECK_THROWS_AS(growth_estimate({{8, 256}, {10, 1024}}), std::invalid_argument);
    CHECK_THROWS_AS(growth_estimate({{8, 256}, {8, 256}, {8, 256}}), std::invalid_argument);
    CHECK_THROWS_AS(growth_estimate({{8, 256}, {10, 0}, {12, 4096}}), std::invalid_argument);
}

TEST_CASE("dp race work grows like the half-lattice while greedy stays flat") {
    std::vector<std::pair<int, std::uint64_t>> dp_work;
    std::vector<std::pair<int, std::uint64_t>> greedy_work;
    for (const int n : {8, 10, 12}) {
        const SynergyModel m = halves_model(n, 0.0, 1000 + static_cast<std::uint64_t>(n));
        const RaceReport report = run_race(m);
        const SolverReport* dp = report.find("dp");
        const SolverReport* greedy = report.find("greedy");
        REQUIRE(dp != nullptr);
        REQUIRE(greedy != nullptr);
        REQUIRE(dp->q1_crossing.has_value());
        REQUIRE(greedy->q2_crossing.has_value());
        dp_work.push_back({n, dp->q1_crossing->oracle_queries});
        greedy_work.push_back({n, greedy->q2_crossing->oracle_queries});
    }
    const GrowthFit dp_fit = growth_estimate(dp_work);
    const GrowthFit greedy_fit = growth_estimate(greedy_work);
    // The exact lane's crossing cost roughly doubles per agent; the sparse
    // lane's pool is linear in n, so its fitted slope stays a fraction of a
    // bit per agent.
    CHECK(dp_fit.slope > 0.8);
    CHECK(greedy_fit.slope < 0.4);
    CHECK(dp_fit.slope - greedy_fit.slope > 0.5);
}
