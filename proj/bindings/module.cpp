// Python bindings. Everything crosses the boundary as plain dicts, lists,
// and scalars so the module has no wrapper classes to keep alive; an
// instance dict round-trips through generate_instance / the solvers
// unchanged.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "csg/bnb.hpp"
#include "csg/core.hpp"
#include "csg/dp.hpp"
#include "csg/genmodel.hpp"
#include "csg/harness.hpp"
#include "csg/sparse.hpp"
#include "csg/trace.hpp"

namespace py = pybind11;
using namespace csg;

namespace {

std::vector<int> coalition_to_agents(Coalition c) {
    std::vector<int> agents;
    for (int a = 0; a < 32; ++a)
        if (c.contains(a)) agents.push_back(a);
    return agents;
}

Coalition agents_to_coalition(const std::vector<int>& agents, int n) {
    Coalition c;
    for (const int a : agents) {
        if (a < 0 || a >= n) throw std::invalid_argument("agent id out of range");
        c = c | Coalition::single(a);
    }
    return c;
}

py::list structure_to_py(const CoalitionStructure& s) {
    py::list blocks;
    for (const Coalition& b : s.blocks) blocks.append(coalition_to_agents(b));
    return blocks;
}

py::dict record_to_py(const TraceRecord& r) {
    py::dict d;
    d["work_units"] = r.work_units;
    d["wall_ns"] = r.wall_ns;
    d["incumbent"] = r.incumbent;
    d["event"] = r.event;
    d["oracle_queries"] = r.oracle_queries;
    return d;
}

py::dict trace_to_py(const AnytimeTrace& t) {
    py::dict d;
    d["solver"] = t.solver_id;
    d["work_unit_kind"] = t.work_unit_kind;
    py::list records;
    for (const TraceRecord& r : t.records()) records.append(record_to_py(r));
    d["records"] = records;
    return d;
}

Placement parse_placement(const std::string& name) {
    if (name == "contiguous") return Placement::Contiguous;
    if (name == "random") return Placement::Random;
    if (name == "disjoint-halves") return Placement::DisjointHalves;
    throw std::invalid_argument("placement must be contiguous, random, or disjoint-halves");
}

py::dict model_to_py(const SynergyModel& m) {
    py::dict d;
    d["n"] = m.agent_count();
    py::list templates;
    for (const Coalition& t : m.templates()) templates.append(coalition_to_agents(t));
    d["templates"] = templates;
    d["weights"] = m.weights();
    d["sigma"] = m.sigma();
    d["noise_seed"] = m.noise_seed();
    const MarginReport margin = margin_report(m);
    py::dict mj;
    mj["gamma_min"] = margin.gamma_min;
    mj["gamma_gap"] = margin.gamma_gap;
    mj["rhs"] = margin.rhs;
    mj["satisfied_min"] = margin.satisfied_min;
    mj["satisfied_gap"] = margin.satisfied_gap;
    d["margin"] = mj;
    return d;
}

SynergyModel model_from_py(const py::dict& instance) {
    const int n = instance["n"].cast<int>();
    std::vector<Coalition> templates;
    for (const auto& t : instance["templates"])
        templates.push_back(agents_to_coalition(t.cast<std::vector<int>>(), n));
    return SynergyModel(n, std::move(templates), instance["weights"].cast<std::vector<double>>(),
                        instance["sigma"].cast<double>(),
                        instance["noise_seed"].cast<std::uint64_t>());
}

CandidatePool make_pool(const SynergyModel& model, const std::string& pool,
                        std::optional<int> size_cap, int distractors, std::uint64_t pool_seed) {
    if (pool == "all") return build_pool_all(model, size_cap);
    if (pool == "prior") {
        const std::uint64_t seed = pool_seed != 0 ? pool_seed : model.noise_seed();
        return build_pool_prior(model, model.templates(), seed, distractors);
    }
    throw std::invalid_argument("pool must be all or prior");
}

py::dict generate_instance(int n, int k, int template_size, double w_lo, double w_hi,
                           std::optional<std::vector<double>> weights, double sigma,
                           const std::string& placement, std::uint64_t seed,
                           bool require_margin) {
    GeneratorParams p;
    p.n = n;
    p.k = k;
    p.template_size = template_size;
    p.w_lo = w_lo;
    p.w_hi = w_hi;
    p.explicit_weights = std::move(weights);
    p.sigma = sigma;
    p.placement = parse_placement(placement);
    p.seed = seed;
    p.require_margin = require_margin;
    return model_to_py(generate(p));
}

py::dict solve_instance(const py::dict& instance, const std::string& solver,
                        std::optional<int> size_cap, std::uint64_t node_budget,
                        const std::string& pool, std::optional<double> lambda, int distractors,
                        std::uint64_t pool_seed) {
    const SynergyModel model = model_from_py(instance);
    AnytimeTrace trace;
    py::dict out;
    out["solver"] = solver;
    out["n"] = model.agent_count();

    if (solver == "dp") {
        const DpResult r = dp_solve(model, trace);
        out["value"] = r.value;
        out["structure"] = structure_to_py(r.best);
    } else if (solver == "bnb") {
        const SetPartitionModel spm = build_model(model, size_cap);
        const BnbResult r = bnb_solve(spm, trace, node_budget);
        out["value"] = r.best_value;
        out["structure"] = r.best ? py::object(structure_to_py(*r.best)) : py::none();
        out["nodes_explored"] = r.stats.nodes_explored;
        out["nodes_pruned"] = r.stats.nodes_pruned;
        out["budget_exhausted"] = r.stats.budget_exhausted;
        if (r.stats.root_bound) out["root_bound"] = *r.stats.root_bound;
        if (r.stats.root_gap) out["root_gap"] = *r.stats.root_gap;
    } else if (solver == "greedy" || solver == "l1") {
        const CandidatePool cands = make_pool(model, pool, size_cap, distractors, pool_seed);
        const SparseResult r =
            solver == "greedy"
                ? greedy_solve(model, cands, trace)
                : l1_solve(model, cands, lambda.value_or(default_lambda(model)), trace);
        out["value"] = r.value;
        out["structure"] = structure_to_py(r.structure);
        out["pool_size"] = cands.size();
        out["iterations"] = r.selection.iterations;
        out["candidate_evals"] = r.selection.candidate_evals;
        if (solver == "l1") out["lambda"] = lambda.value_or(default_lambda(model));
    } else {
        throw std::invalid_argument("solver must be dp, bnb, greedy, or l1");
    }

    out["work_unit_kind"] = trace.work_unit_kind;
    out["oracle_queries"] = trace.total_oracle_queries();
    out["trace"] = trace_to_py(trace);
    return out;
}

py::object crossing_to_py(const std::optional<TraceRecord>& rec) {
    if (!rec) return py::none();
    return py::object(record_to_py(*rec));
}

py::dict race(const py::dict& instance, bool include_l1, const std::string& pool,
              std::optional<int> size_cap, std::uint64_t node_budget, int distractors,
              std::uint64_t pool_seed, std::optional<double> lambda) {
    const SynergyModel model = model_from_py(instance);
    RaceOptions options;
    options.node_budget = node_budget;
    options.pool_mode = pool == "all" ? PoolMode::All : PoolMode::Prior;
    if (pool != "all" && pool != "prior")
        throw std::invalid_argument("pool must be all or prior");
    options.size_cap = size_cap;
    options.distractors_per_agent = distractors;
    options.pool_seed = pool_seed;
    options.include_l1 = include_l1;
    options.lambda = lambda;
    const RaceReport report = run_race(model, options);

    py::dict out;
    out["n"] = report.n;
    out["sigma"] = report.sigma;
    out["opt"] = report.opt;
    py::dict thresholds;
    thresholds["q1"] = report.thresholds.q1;
    thresholds["q2"] = report.thresholds.q2;
    thresholds["epsilon"] = report.thresholds.epsilon;
    out["thresholds"] = thresholds;
    out["separated"] = report.separated;
    out["verdict"] = report.separated ? "separated" : "not separated";
    py::list solvers;
    for (const SolverReport& s : report.solvers) {
        py::dict sj;
        sj["solver"] = s.solver_id;
        sj["work_unit_kind"] = s.work_unit_kind;
        sj["ran"] = s.ran;
        sj["skip_reason"] = s.skip_reason.empty() ? py::object(py::none())
                                                  : py::object(py::str(s.skip_reason));
        sj["final_value"] = s.final_value;
        sj["total_work"] = s.total_work;
        sj["oracle_queries"] = s.oracle_queries;
        sj["q1_crossing"] = crossing_to_py(s.q1_crossing);
        sj["q2_crossing"] = crossing_to_py(s.q2_crossing);
        sj["trace"] = trace_to_py(s.trace);
        solvers.append(sj);
    }
    out["solvers"] = solvers;
    return out;
}

py::dict tail_check(double sigma, int n, std::uint64_t replicates, std::uint64_t seed,
                    std::optional<std::vector<double>> t_grid) {
    std::vector<double> grid = t_grid.value_or(std::vector<double>{});
    if (grid.empty())
        for (const double factor : {0.5, 1.0, 1.5, 2.0, 2.5, 3.0}) grid.push_back(factor * sigma);
    grid.push_back(2.0 * sigma * std::sqrt(std::log(2.0 * n)));
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    const TailReport report = concentration_check(sigma, n, grid, replicates, seed);
    py::dict out;
    out["sigma"] = report.sigma;
    out["n"] = report.n;
    out["replicates"] = report.replicates;
    out["uniform_threshold"] = report.uniform_threshold;
    out["uniform_fraction"] = report.uniform_fraction;
    bool all_ok = true;
    py::list entries;
    for (const TailEntry& e : report.entries) {
        py::dict ej;
        ej["t"] = e.t;
        ej["frequency"] = e.frequency;
        ej["bound"] = e.bound;
        ej["standard_error"] = e.standard_error;
        ej["satisfied"] = e.satisfied;
        entries.append(ej);
        all_ok = all_ok && e.satisfied;
    }
    out["entries"] = entries;
    out["all_satisfied"] = all_ok;
    return out;
}

double py_coalition_value(const py::dict& instance, const std::vector<int>& agents) {
    const SynergyModel model = model_from_py(instance);
    return model.value(agents_to_coalition(agents, model.agent_count()));
}

double py_structure_value(const py::dict& instance,
                          const std::vector<std::vector<int>>& blocks) {
    const SynergyModel model = model_from_py(instance);
    CoalitionStructure s;
    for (const auto& b : blocks) s.blocks.push_back(agents_to_coalition(b, model.agent_count()));
    const ValidationResult check = validate_structure(s, model.agent_count());
    if (!check.ok()) throw std::invalid_argument(check.message);
    return structure_value(s, model);
}

}  // namespace

PYBIND11_MODULE(_csglab, m) {
    m.doc() = "Coalition structure solvers: instance generation, exact and sparse "
              "optimization, anytime races, and noise-tail checks.";

    py::register_exception<GuardViolation>(m, "GuardViolation");

    m.def("generate_instance", &generate_instance, py::arg("n"), py::arg("k") = 2,
          py::arg("template_size") = 2, py::arg("w_lo") = 2.0, py::arg("w_hi") = 3.0,
          py::arg("weights") = py::none(), py::arg("sigma") = 0.0,
          py::arg("placement") = "contiguous", py::arg("seed") = 0,
          py::arg("require_margin") = false,
          "Draw a random synergy instance; returns a plain-dict instance.");

    m.def("solve_instance", &solve_instance, py::arg("instance"), py::arg("solver"),
          py::arg("size_cap") = py::none(), py::arg("node_budget") = kDefaultNodeBudget,
          py::arg("pool") = "prior", py::arg("lambda_") = py::none(),
          py::arg("distractors") = 4, py::arg("pool_seed") = 0,
          "Run one solver (dp, bnb, greedy, or l1) on an instance dict.");

    m.def("race", &race, py::arg("instance"), py::arg("include_l1") = false,
          py::arg("pool") = "prior", py::arg("size_cap") = py::none(),
          py::arg("node_budget") = kDefaultNodeBudget, py::arg("distractors") = 4,
          py::arg("pool_seed") = 0, py::arg("lambda_") = py::none(),
          "Race every solver on one instance and report threshold crossings.");

    m.def("tail_check", &tail_check, py::arg("sigma"), py::arg("n"),
          py::arg("replicates") = 100000, py::arg("seed") = 0, py::arg("t_grid") = py::none(),
          "Monte-Carlo check of the noise tail against its sub-Gaussian bound.");

    m.def("coalition_value", &py_coalition_value, py::arg("instance"), py::arg("agents"),
          "Value of one coalition under an instance's characteristic function.");

    m.def("structure_value", &py_structure_value, py::arg("instance"), py::arg("blocks"),
          "Total value of a full partition (validates coverage first).");
}
