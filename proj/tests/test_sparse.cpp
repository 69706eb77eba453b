#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "csg/core.hpp"
#include "csg/genmodel.hpp"
#include "csg/sparse.hpp"
#include "csg/trace.hpp"

using namespace csg;

namespace {

SynergyModel two_template_model() {
    // Agents 0..5, templates {0,1,2} worth 2 and {3,4,5} worth 3, no noise.
    return SynergyModel(6, {Coalition::of({0, 1, 2}), Coalition::of({3, 4, 5})}, {2.0, 3.0}, 0.0,
                        99);
}

}  // namespace

TEST_CASE("build_pool_all enumerates the lattice under the cap") {
    const TableOracle oracle(4, std::vector<double>(16, 1.0));
    const CandidatePool all = build_pool_all(oracle);
    CHECK(all.size() == 15);
    CHECK(all.build_queries == 15);
    CHECK_FALSE(all.size_cap.has_value());

    const CandidatePool capped = build_pool_all(oracle, 2);
    CHECK(capped.size() == 10);
    for (const Coalition c : capped.candidates) CHECK(c.size() <= 2);
    CHECK(*capped.size_cap == 2);

    CHECK_THROWS_AS(build_pool_all(oracle, 0), std::invalid_argument);
    CHECK_THROWS_AS(build_pool_all(oracle, 5), std::invalid_argument);

    const TableOracle wide(17, std::vector<double>(1u << 17, 0.0));
    CHECK_THROWS_AS(build_pool_all(wide), GuardViolation);
    CHECK_NOTHROW(build_pool_all(wide, 1));
}

TEST_CASE("prior pool carries priors, singletons and shaped decoys") {
    const SynergyModel m = two_template_model();
    const CandidatePool pool = build_pool_prior(m, m.templates(), 2024, 4);

    CHECK(pool.n == 6);
    // Only C(6,3) - 2 = 18 distinct size-3 non-priors exist, fewer than the
    // 4*6 requested, so the builder saturates: 2 priors + 6 singletons + 18.
    CHECK(pool.size() == 2 + 6 + 18);
    CHECK(pool.build_queries == static_cast<std::uint64_t>(pool.size()));

    // When the request fits, it is met exactly.
    const CandidatePool modest = build_pool_prior(m, m.templates(), 2024, 2);
    CHECK(modest.size() == 2 + 6 + 2 * 6);

    std::set<std::uint32_t> masks;
    for (const Coalition c : pool.candidates) CHECK(masks.insert(c.bits).second);
    for (const Coalition t : m.templates()) CHECK(masks.count(t.bits) == 1);
    for (int a = 0; a < 6; ++a) CHECK(masks.count(Coalition::of({a}).bits) == 1);

    // Decoys mimic a prior's size but never contain a whole prior.
    for (int i = 0; i < pool.size(); ++i) {
        const Coalition c = pool.candidates[static_cast<std::size_t>(i)];
        const bool is_prior = std::any_of(m.templates().begin(), m.templates().end(),
                                          [&](Coalition t) { return t == c; });
        if (is_prior || c.size() == 1) continue;
        CHECK(c.size() == 3);  // both priors have size 3
        for (const Coalition t : m.templates()) CHECK_FALSE(c.contains_all(t));
        // A decoy therefore carries no template mass at all here.
        CHECK(pool.values[static_cast<std::size_t>(i)] == 0.0);
    }
}

TEST_CASE("prior pool is deterministic in the seed") {
    const SynergyModel m = two_template_model();
    const CandidatePool a = build_pool_prior(m, m.templates(), 7);
    const CandidatePool b = build_pool_prior(m, m.templates(), 7);
    CHECK(a.candidates == b.candidates);
    CHECK(a.values == b.values);

    const CandidatePool c = build_pool_prior(m, m.templates(), 8);
    CHECK(a.candidates != c.candidates);  // decoys move with the seed
}

TEST_CASE("prior pool edge cases") {
    const SynergyModel m = two_template_model();

    // No priors: just the singletons, no decoys to shape.
    const CandidatePool bare = build_pool_prior(m, {}, 1);
    CHECK(bare.size() == 6);
    for (const Coalition c : bare.candidates) CHECK(c.size() == 1);

    // Duplicated priors collapse.
    const CandidatePool dup =
        build_pool_prior(m, {m.templates()[0], m.templates()[0]}, 1, 0);
    CHECK(dup.size() == 1 + 6);

    // Zero distractors keeps only priors and singletons.
    const CandidatePool lean = build_pool_prior(m, m.templates(), 1, 0);
    CHECK(lean.size() == 2 + 6);

    CHECK_THROWS_AS(build_pool_prior(m, {Coalition{}}, 1), std::invalid_argument);
    CHECK_THROWS_AS(build_pool_prior(m, {Coalition::of({6})}, 1), std::invalid_argument);
    CHECK_THROWS_AS(build_pool_prior(m, m.templates(), 1, -1), std::invalid_argument);
}

TEST_CASE("greedy on the full lattice takes the grand superset in one pick") {
    // Both templates live inside the grand coalition, so its value (5) tops
    // every candidate and the first pick swallows everything. Superset
    // selection is deliberate: the chosen block carries the full mass.
    const SynergyModel m = two_template_model();
    const CandidatePool pool = build_pool_all(m);
    AnytimeTrace trace;
    const SparseResult r = greedy_solve(m, pool, trace);

    CHECK(r.value == doctest::Approx(5.0));
    CHECK(validate_structure(r.structure, 6).ok());
    CHECK(structure_value(r.structure, m) == doctest::Approx(r.value));
    CHECK(r.selection.iterations == 1);
    REQUIRE(r.selection.chosen.size() == 1);
    CHECK(pool.candidates[static_cast<std::size_t>(r.selection.chosen[0])] == Coalition::full(6));
    CHECK(residual_agents(r.selection, 6).empty());
}

TEST_CASE("greedy recovers noiseless templates from a prior pool") {
    // The prior pool has no superset of a template (decoys are built not to
    // swallow one), so the picks are exactly the templates, best first.
    const SynergyModel m = two_template_model();
    const CandidatePool pool = build_pool_prior(m, m.templates(), 2024);
    AnytimeTrace trace;
    const SparseResult r = greedy_solve(m, pool, trace);

    CHECK(r.value == doctest::Approx(5.0));
    CHECK(validate_structure(r.structure, 6).ok());
    CHECK(structure_value(r.structure, m) == doctest::Approx(r.value));
    CHECK(r.selection.iterations == 2);
    CHECK(residual_agents(r.selection, 6).empty());
    REQUIRE(r.selection.chosen.size() == 2);
    CHECK(pool.candidates[static_cast<std::size_t>(r.selection.chosen[0])] == m.templates()[1]);
    CHECK(pool.candidates[static_cast<std::size_t>(r.selection.chosen[1])] == m.templates()[0]);
}

TEST_CASE("greedy on a flat instance keeps everyone single") {
    const SynergyModel flat(5, {}, {}, 0.0, 3);
    const CandidatePool pool = build_pool_all(flat);
    AnytimeTrace trace;
    const SparseResult r = greedy_solve(flat, pool, trace);
    CHECK(r.value == doctest::Approx(0.0));
    CHECK(r.selection.iterations == 0);
    CHECK(r.structure.blocks.size() == 5);
    CHECK(residual_agents(r.selection, 5) == Coalition::full(5));
}

TEST_CASE("greedy never chooses nonpositive candidates but still fills") {
    std::vector<double> t(8, -1.0);
    t[0] = 0.0;
    const TableOracle oracle(3, t);
    const CandidatePool pool = build_pool_all(oracle);
    AnytimeTrace trace;
    const SparseResult r = greedy_solve(oracle, pool, trace);
    CHECK(r.selection.iterations == 0);
    CHECK(r.structure.blocks.size() == 3);      // singleton fill regardless
    CHECK(r.value == doctest::Approx(-3.0));    // three singletons at -1
}

TEST_CASE("greedy tie-breaks by size then mask") {
    // Equal values: the smaller candidate wins; equal sizes: the smaller mask.
    CandidatePool pool;
    pool.n = 3;
    pool.candidates = {Coalition::of({0, 1}), Coalition::of({2})};
    pool.values = {5.0, 5.0};
    const TableOracle oracle(3, std::vector<double>(8, 0.0));
    AnytimeTrace t1;
    const SparseResult r1 = greedy_solve(oracle, pool, t1);
    REQUIRE(r1.selection.chosen.size() == 2);
    CHECK(r1.selection.chosen[0] == 1);  // {2} is smaller
    CHECK(r1.selection.chosen[1] == 0);

    CandidatePool same_size;
    same_size.n = 4;
    same_size.candidates = {Coalition::of({1, 2}), Coalition::of({0, 1})};
    same_size.values = {5.0, 5.0};
    const TableOracle oracle4(4, std::vector<double>(16, 0.0));
    AnytimeTrace t2;
    const SparseResult r2 = greedy_solve(oracle4, same_size, t2);
    REQUIRE(!r2.selection.chosen.empty());
    CHECK(r2.selection.chosen[0] == 1);  // mask {0,1} = 3 < {1,2} = 6
}

TEST_CASE("greedy stays within its evaluation budget and traces each pick") {
    GeneratorParams params;
    params.n = 9;
    params.k = 2;
    params.template_size = 3;
    params.sigma = 0.1;
    params.seed = 606;
    const SynergyModel m = generate(params);
    const CandidatePool pool = build_pool_all(m);
    AnytimeTrace trace;
    const SparseResult r = greedy_solve(m, pool, trace);

    CHECK(r.selection.candidate_evals <=
          static_cast<std::uint64_t>(pool.n) * static_cast<std::uint64_t>(pool.size()));
    CHECK(r.selection.iterations <= pool.n);

    const auto& recs = trace.records();
    REQUIRE(recs.size() == static_cast<std::size_t>(r.selection.iterations) + 1);
    CHECK(recs.front().event == "baseline");
    CHECK(recs.front().work_units == 0);
    for (std::size_t i = 1; i < recs.size(); ++i) {
        CHECK(recs[i].event.substr(0, 4) == "pick");
        CHECK(recs[i].work_units > recs[i - 1].work_units);
        // The full pool already contains every singleton, so the query count
        // is exactly the build cost.
        CHECK(recs[i].oracle_queries == pool.build_queries);
    }
    CHECK(trace.work_unit_kind == "candidate_evals");
    CHECK(recs.back().incumbent == doctest::Approx(r.value));

    // Selection bookkeeping agrees with itself.
    Coalition covered;
    for (const int i : r.selection.chosen) {
        CHECK(r.selection.incidence[static_cast<std::size_t>(i)] == 1);
        covered = covered | pool.candidates[static_cast<std::size_t>(i)];
    }
    CHECK(covered == r.selection.covered);
    const auto ones = static_cast<std::size_t>(
        std::count(r.selection.incidence.begin(), r.selection.incidence.end(), 1));
    CHECK(ones == r.selection.chosen.size());
}

TEST_CASE("greedy incumbents never regress on a noiseless instance") {
    const SynergyModel m = two_template_model();
    const CandidatePool pool = build_pool_prior(m, m.templates(), 11);
    AnytimeTrace trace;
    greedy_solve(m, pool, trace);
    const auto& recs = trace.records();
    for (std::size_t i = 1; i < recs.size(); ++i)
        CHECK(recs[i].incumbent >= recs[i - 1].incumbent - 1e-12);
}

TEST_CASE("greedy keeps the singleton baseline when a positive pick would lower it") {
    // v({0}) = v({1}) = 2 but v({0,1}) = 3: the pair is the max-value pick,
    // yet merging loses the 4 the two singletons were worth together.
    const TableOracle oracle(2, {0.0, 2.0, 2.0, 3.0});
    CandidatePool pool;
    pool.n = 2;
    pool.candidates = {Coalition::of({0, 1}), Coalition::of({0}), Coalition::of({1})};
    pool.values = {3.0, 2.0, 2.0};
    AnytimeTrace trace;
    const SparseResult r = greedy_solve(oracle, pool, trace);
    CHECK(r.value == doctest::Approx(4.0));
    REQUIRE(r.structure.blocks.size() == 2);
    CHECK(r.structure.blocks[0] == Coalition::of({0}));
    CHECK(r.structure.blocks[1] == Coalition::of({1}));
    // The losing pick still happened and was traced, but the incumbent held
    // and the selection was rolled back to the empty prefix.
    CHECK(r.selection.iterations == 1);
    CHECK(r.selection.chosen.empty());
    CHECK(std::count(r.selection.incidence.begin(), r.selection.incidence.end(), 1) == 0);
    CHECK(residual_agents(r.selection, 2) == Coalition::full(2));
    const auto& recs = trace.records();
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].incumbent == doctest::Approx(4.0));
    CHECK(recs[1].incumbent == doctest::Approx(4.0));
}

TEST_CASE("greedy pays fresh queries only for singletons the pool lacks") {
    const TableOracle oracle(2, {0.0, 0.25, 0.75, 3.0});
    CountingOracle counted(oracle);
    CandidatePool pool;
    pool.n = 2;
    pool.candidates = {Coalition::of({0, 1})};
    pool.values = {3.0};
    pool.build_queries = 0;  // hand-built: nothing was queried
    AnytimeTrace trace;
    const SparseResult r = greedy_solve(counted, pool, trace);
    CHECK(counted.queries() == 2);  // the two singletons
    CHECK(r.value == doctest::Approx(3.0));
    CHECK(trace.records().back().oracle_queries == 2);
}

TEST_CASE("l1 with zero penalty reaches the full template mass") {
    // On the full lattice the relaxation may land on the template pair or on
    // the grand superset; both carry the whole mass, so pin the value and the
    // partition's validity rather than the blocks.
    const SynergyModel m = two_template_model();
    const CandidatePool pool = build_pool_all(m);
    AnytimeTrace trace;
    const SparseResult r = l1_solve(m, pool, 0.0, trace);
    CHECK(r.value == doctest::Approx(5.0));
    CHECK(validate_structure(r.structure, 6).ok());
    CHECK(structure_value(r.structure, m) == doctest::Approx(r.value));

    const auto& recs = trace.records();
    REQUIRE(recs.size() == 1);
    CHECK(recs.front().event == "rounded");
    CHECK(recs.front().oracle_queries == pool.build_queries);
    CHECK(trace.work_unit_kind == "lp_pivots");
}

TEST_CASE("l1 with zero penalty keeps exactly the templates on a prior pool") {
    const SynergyModel m = two_template_model();
    const CandidatePool pool = build_pool_prior(m, m.templates(), 2024);
    AnytimeTrace trace;
    const SparseResult r = l1_solve(m, pool, 0.0, trace);
    CHECK(r.value == doctest::Approx(5.0));
    CHECK(r.selection.iterations == 2);
    std::set<std::uint32_t> picked;
    for (const int i : r.selection.chosen)
        picked.insert(pool.candidates[static_cast<std::size_t>(i)].bits);
    CHECK(picked == std::set<std::uint32_t>{m.templates()[0].bits, m.templates()[1].bits});
}

TEST_CASE("raising the penalty prices templates out one by one") {
    const SynergyModel m = two_template_model();  // weights 2 and 3
    const CandidatePool pool = build_pool_prior(m, m.templates(), 5);
    const auto value_at = [&](double lambda) {
        AnytimeTrace trace;
        return l1_solve(m, pool, lambda, trace).value;
    };
    CHECK(value_at(0.0) == doctest::Approx(5.0));
    CHECK(value_at(1.0) == doctest::Approx(5.0));   // both still profitable
    CHECK(value_at(2.5) == doctest::Approx(3.0));   // the weight-2 template drops
    CHECK(value_at(4.0) == doctest::Approx(0.0));   // nothing survives
    CHECK_THROWS_AS(value_at(-0.1), std::invalid_argument);
}

TEST_CASE("l1 rounding only accepts disjoint half-or-more variables") {
    // Two overlapping high-value pairs: the LP splits fractionally or picks
    // one; either way the rounded structure must be a valid partition.
    const TableOracle oracle(3, {0, 0, 0, 4.0, 0, 4.0, 0, 0});
    const CandidatePool pool = build_pool_all(oracle);
    AnytimeTrace trace;
    const SparseResult r = l1_solve(oracle, pool, 0.0, trace);
    CHECK(validate_structure(r.structure, 3).ok());
    CHECK(r.value == doctest::Approx(4.0));
    CHECK(r.selection.iterations == 1);
}

TEST_CASE("default penalty follows the noise ceiling") {
    const SynergyModel quiet(4, {}, {}, 0.0, 1);
    CHECK(default_lambda(quiet) == doctest::Approx(0.0));

    const SynergyModel noisy(12, {}, {}, 0.1, 1);
    CHECK(default_lambda(noisy) ==
          doctest::Approx(2.0 * 0.1 * std::sqrt(std::log(24.0))).epsilon(1e-12));
}

TEST_CASE("solvers reject empty pools") {
    const TableOracle oracle(2, {0, 0, 0, 0});
    CandidatePool empty;
    empty.n = 2;
    AnytimeTrace trace;
    CHECK_THROWS_AS(greedy_solve(oracle, empty, trace), std::invalid_argument);
    CHECK_THROWS_AS(l1_solve(oracle, empty, 0.0, trace), std::invalid_argument);
}

TEST_CASE("residual agents are the uncovered complement") {
    SparseSelection sel;
    sel.covered = Coalition::of({0, 1});
    CHECK(residual_agents(sel, 4) == Coalition::of({2, 3}));
    sel.covered = Coalition::full(4);
    CHECK(residual_agents(sel, 4).empty());
    sel.covered = Coalition{};
    CHECK(residual_agents(sel, 4) == Coalition::full(4));
}

TEST_CASE("both solvers produce honest values on noisy instances") {
    for (int rep = 0; rep < 6; ++rep) {
        GeneratorParams params;
        params.n = 8 + (rep % 2) * 2;
        params.k = 2;
        params.template_size = 3;
        params.sigma = 0.15;
        params.placement = (rep % 2) ? Placement::Random : Placement::Contiguous;
        params.seed = 7000 + static_cast<std::uint64_t>(rep);
        const SynergyModel m = generate(params);
        const CandidatePool pool = build_pool_prior(m, m.templates(), params.seed);

        AnytimeTrace tg;
        const SparseResult g = greedy_solve(m, pool, tg);
        CHECK(validate_structure(g.structure, params.n).ok());
        CHECK(structure_value(g.structure, m) == doctest::Approx(g.value).epsilon(1e-9));

        AnytimeTrace tl;
        const SparseResult l = l1_solve(m, pool, default_lambda(m), tl);
        CHECK(validate_structure(l.structure, params.n).ok());
        CHECK(structure_value(l.structure, m) == doctest::Approx(l.value).epsilon(1e-9));
    }
}
