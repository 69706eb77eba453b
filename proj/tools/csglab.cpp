#include <cstdint>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "csg/bnb.hpp"
#include "csg/brute.hpp"
#include "csg/core.hpp"
#include "csg/dp.hpp"
#include "csg/genmodel.hpp"
#include "csg/harness.hpp"
#include "csg/io.hpp"
#include "csg/sparse.hpp"
#include "csg/trace.hpp"

namespace fs = std::filesystem;
using namespace csg;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitGuard = 2;
constexpr int kExitVerification = 3;

Placement parse_placement(const std::string& name) {
    if (name == "contiguous") return Placement::Contiguous;
    if (name == "random") return Placement::Random;
    if (name == "disjoint-halves") return Placement::DisjointHalves;
    throw std::invalid_argument("unknown placement: " + name);
}

PoolMode parse_pool(const std::string& name) {
    if (name == "prior") return PoolMode::Prior;
    if (name == "all") return PoolMode::All;
    throw std::invalid_argument("unknown pool mode: " + name);
}

struct GenArgs {
    int n = 0;
    int k = 2;
    int template_size = 2;
    double w_lo = 2.0;
    double w_hi = 3.0;
    std::vector<double> weights;
    double sigma = 0.0;
    std::string placement = "contiguous";
    std::uint64_t seed = 0;
    bool require_margin = false;
    std::string out;
};

int run_gen(const GenArgs& args) {
    GeneratorParams params;
    params.n = args.n;
    params.k = args.k;
    params.template_size = args.template_size;
    params.w_lo = args.w_lo;
    params.w_hi = args.w_hi;
    if (!args.weights.empty()) params.explicit_weights = args.weights;
    params.sigma = args.sigma;
    params.placement = parse_placement(args.placement);
    params.seed = args.seed;
    params.require_margin = args.require_margin;
    const SynergyModel model = generate(params);
    io::save_instance(args.out, model, params);
    std::cout << "wrote " << args.out << "\n";
    return kExitOk;
}

struct SolveArgs {
    std::string instance;
    std::string solver;
    std::string out = ".";
    std::uint64_t node_budget = kDefaultNodeBudget;
    std::string pool = "all";
    std::optional<int> size_cap;
    std::optional<double> lambda;
    int distractors = 4;
    std::uint64_t seed = 0;
};

CandidatePool make_pool(const SynergyModel& model, const ValueOracle& oracle,
                        const std::string& mode, std::optional<int> size_cap,
                        std::uint64_t seed, int distractors) {
    if (parse_pool(mode) == PoolMode::Prior) {
        const std::uint64_t pool_seed = seed != 0 ? seed : model.noise_seed();
        return build_pool_prior(oracle, model.templates(), pool_seed, distractors);
    }
    return build_pool_all(oracle, size_cap);
}

int run_solve(const SolveArgs& args) {
    const SynergyModel model = io::load_instance(args.instance);
    CountingOracle counted(model);
    AnytimeTrace trace;
    io::SolveSummary summary;
    summary.solver = args.solver;
    summary.n = model.agent_count();

    if (args.solver == "dp") {
        const DpResult result = dp_solve(counted, trace);
        summary.value = result.value;
        summary.structure = result.best;
    } else if (args.solver == "bnb") {
        const SetPartitionModel sp = build_model(counted, args.size_cap);
        const BnbResult result = bnb_solve(sp, trace, args.node_budget);
        summary.value =
            result.best ? result.best_value : -std::numeric_limits<double>::infinity();
        if (result.best) summary.structure = *result.best;
        summary.budget_exhausted = result.stats.budget_exhausted;
    } else if (args.solver == "greedy") {
        const CandidatePool pool =
            make_pool(model, counted, args.pool, args.size_cap, args.seed, args.distractors);
        const SparseResult result = greedy_solve(counted, pool, trace);
        summary.value = result.value;
        summary.structure = result.structure;
        summary.iterations = result.selection.iterations;
    } else if (args.solver == "l1") {
        const CandidatePool pool =
            make_pool(model, counted, args.pool, args.size_cap, args.seed, args.distractors);
        const double lambda = args.lambda.value_or(default_lambda(model));
        const SparseResult result = l1_solve(counted, pool, lambda, trace);
        summary.value = result.value;
        summary.structure = result.structure;
        summary.iterations = result.selection.iterations;
    } else {
        throw std::invalid_argument("unknown solver: " + args.solver);
    }

    summary.work_unit_kind = trace.work_unit_kind;
    summary.work_units = trace.empty() ? 0 : trace.records().back().work_units;
    summary.oracle_queries = counted.queries();

    fs::create_directories(args.out);
    io::write_trace_csv(fs::path(args.out) / (args.solver + "_trace.csv"), trace);
    io::write_json(fs::path(args.out) / (args.solver + "_summary.json"),
                   io::solve_summary_to_json(summary));
    std::cout << args.solver << " value "
              << (std::isfinite(summary.value) ? std::to_string(summary.value) : "none") << "\n";
    return kExitOk;
}

struct RaceArgs {
    std::string instance;
    std::string out = ".";
    std::uint64_t node_budget = kDefaultNodeBudget;
    std::string pool = "prior";
    std::optional<int> size_cap;
    bool include_l1 = false;
    std::optional<double> lambda;
    int distractors = 4;
    std::uint64_t seed = 0;
};

int run_race_cmd(const RaceArgs& args) {
    const SynergyModel model = io::load_instance(args.instance);
    RaceOptions options;
    options.node_budget = args.node_budget;
    options.pool_mode = parse_pool(args.pool);
    options.size_cap = args.size_cap;
    options.distractors_per_agent = args.distractors;
    options.pool_seed = args.seed;
    options.include_l1 = args.include_l1;
    options.lambda = args.lambda;
    const RaceReport report = run_race(model, options);

    fs::create_directories(args.out);
    io::write_json(fs::path(args.out) / "race_report.json", io::race_report_to_json(report));
    std::vector<const AnytimeTrace*> traces;
    for (const SolverReport& s : report.solvers) {
        if (!s.ran) continue;
        io::write_trace_csv(fs::path(args.out) / (s.solver_id + "_trace.csv"), s.trace);
        traces.push_back(&s.trace);
    }
    io::write_plot_csv(fs::path(args.out) / "plot.csv", traces);
    std::cout << "verdict: " << (report.separated ? "separated" : "not separated") << "\n";
    return kExitOk;
}

struct VerifyArgs {
    int n_min = 4;
    int n_max = 8;
    int replicates = 50;
    std::uint64_t seed = 0;
    std::string out;
    bool inject_fault = false;
};

int run_verify(const VerifyArgs& args) {
    if (args.n_min < 1 || args.n_max < args.n_min)
        throw std::invalid_argument("need 1 <= n-min <= n-max");
    if (args.n_max > 12) throw GuardViolation("exhaustive verification supports n <= 12");
    if (args.replicates < 1) throw std::invalid_argument("replicates must be positive");

    const double sigmas[] = {0.0, 0.05, 0.2};
    io::ordered_json disagreements = io::ordered_json::array();
    std::uint64_t cases = 0;

    for (int n = args.n_min; n <= args.n_max; ++n) {
        for (int rep = 0; rep < args.replicates; ++rep) {
            GeneratorParams params;
            params.n = n;
            params.template_size = 2;
            params.k = 1 + rep % std::max(1, n / 2);
            params.sigma = sigmas[rep % 3];
            params.placement = rep % 2 == 0 ? Placement::Contiguous : Placement::Random;
            params.seed = args.seed + 7919ull * static_cast<std::uint64_t>(n) +
                          131ull * static_cast<std::uint64_t>(rep) + 1;
            const SynergyModel model = generate(params);
            ++cases;

            const BruteResult brute = brute_opt(model);

            // The fault hook corrupts one cached value the dp solver sees,
            // exercising the disagreement path end to end.
            std::vector<double> table(std::size_t{1} << n);
            for (std::uint32_t s = 0; s < table.size(); ++s)
                table[s] = s == 0 ? 0.0 : model.value(Coalition{s});
            if (args.inject_fault && n == args.n_min && rep == 0)
                table.back() += 1.0;
            const TableOracle dp_oracle(n, table);

            AnytimeTrace dp_trace;
            const DpResult dp = dp_solve(dp_oracle, dp_trace, {});

            AnytimeTrace bnb_trace;
            const SetPartitionModel sp = build_model(model);
            const BnbResult bnb = bnb_solve(sp, bnb_trace);
            const double bnb_value =
                bnb.best ? bnb.best_value : -std::numeric_limits<double>::infinity();

            const bool dp_ok = std::abs(dp.value - brute.value) <= 1e-9;
            const bool bnb_ok = std::abs(bnb_value - brute.value) <= 1e-9;
            if (dp_ok && bnb_ok) continue;

            const std::string dump = "verify_failure_n" + std::to_string(n) + "_rep" +
                                     std::to_string(rep) + ".json";
            const fs::path dump_path =
                args.out.empty() ? fs::path(dump) : fs::path(args.out).parent_path() / dump;
            io::save_instance(dump_path, model, params);
            io::ordered_json d;
            d["n"] = n;
            d["replicate"] = rep;
            d["seed"] = params.seed;
            d["brute"] = brute.value;
            d["dp"] = dp.value;
            d["bnb"] = bnb_value;
            d["instance_dump"] = dump_path.string();
            disagreements.push_back(d);
            std::cerr << "disagreement at n=" << n << " rep=" << rep << " seed=" << params.seed
                      << " (instance dumped to " << dump_path.string() << ")\n";
        }
    }

    if (!args.out.empty()) {
        io::ordered_json report;
        report["format_version"] = io::kFormatVersion;
        report["n_min"] = args.n_min;
        report["n_max"] = args.n_max;
        report["replicates_per_n"] = args.replicates;
        report["seed"] = args.seed;
        report["cases"] = cases;
        report["disagreements"] = disagreements;
        io::write_json(args.out, report);
    }
    if (!disagreements.empty()) {
        std::cerr << disagreements.size() << " disagreement(s) across " << cases << " cases\n";
        return kExitVerification;
    }
    std::cout << "verified " << cases << " cases\n";
    return kExitOk;
}

struct TailArgs {
    double sigma = 1.0;
    int n = 10;
    std::uint64_t replicates = 100000;
    std::uint64_t seed = 0;
    std::vector<double> t_grid;
    std::string out;
};

int run_tail(const TailArgs& args) {
    std::vector<double> grid = args.t_grid;
    if (grid.empty()) {
        for (const double factor : {0.5, 1.0, 1.5, 2.0, 2.5, 3.0})
            grid.push_back(factor * args.sigma);
    }
    grid.push_back(2.0 * args.sigma * std::sqrt(std::log(2.0 * args.n)));
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    const TailReport report = concentration_check(args.sigma, args.n, grid, args.replicates,
                                                  args.seed);
    const io::ordered_json j = io::tail_report_to_json(report);
    if (args.out.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        io::write_json(args.out, j);
        std::cout << "wrote " << args.out << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sparse-synergy coalition structure toolkit"};
    app.require_subcommand(1);

    GenArgs gen;
    CLI::App* cmd_gen = app.add_subcommand("gen", "generate a random instance");
    cmd_gen->add_option("--n", gen.n, "agent count")->required();
    cmd_gen->add_option("--k", gen.k, "template count");
    cmd_gen->add_option("--template-size", gen.template_size, "agents per template");
    cmd_gen->add_option("--w-lo", gen.w_lo, "weight range low");
    cmd_gen->add_option("--w-hi", gen.w_hi, "weight range high");
    cmd_gen->add_option("--weights", gen.weights, "explicit weights (overrides the range)");
    cmd_gen->add_option("--sigma", gen.sigma, "noise scale");
    cmd_gen->add_option("--placement", gen.placement,
                        "template placement: contiguous|random|disjoint-halves");
    cmd_gen->add_option("--seed", gen.seed, "generator seed");
    cmd_gen->add_flag("--require-margin", gen.require_margin,
                      "redraw weights until the margin condition holds");
    cmd_gen->add_option("--out", gen.out, "output instance file")->required();

    SolveArgs solve;
    CLI::App* cmd_solve = app.add_subcommand("solve", "run one solver on an instance");
    cmd_solve->add_option("--instance", solve.instance, "instance file")->required();
    cmd_solve->add_option("--solver", solve.solver, "dp|bnb|greedy|l1")->required();
    cmd_solve->add_option("--out", solve.out, "output directory");
    cmd_solve->add_option("--node-budget", solve.node_budget, "branch-and-bound node budget");
    cmd_solve->add_option("--pool", solve.pool, "candidate pool: all|prior");
    cmd_solve->add_option("--size-cap", solve.size_cap, "candidate size cap");
    cmd_solve->add_option("--lambda", solve.lambda, "l1 penalty (default: noise ceiling)");
    cmd_solve->add_option("--distractors", solve.distractors, "prior-pool distractors per agent");
    cmd_solve->add_option("--seed", solve.seed, "prior-pool seed (0: instance noise seed)");

    RaceArgs race;
    CLI::App* cmd_race = app.add_subcommand("race", "race all solvers on one instance");
    cmd_race->add_option("--instance", race.instance, "instance file")->required();
    cmd_race->add_option("--out", race.out, "output directory");
    cmd_race->add_option("--node-budget", race.node_budget, "branch-and-bound node budget");
    cmd_race->add_option("--pool", race.pool, "sparse candidate pool: prior|all");
    cmd_race->add_option("--size-cap", race.size_cap, "candidate size cap (all mode)");
    cmd_race->add_flag("--include-l1", race.include_l1, "also run the l1 solver");
    cmd_race->add_option("--lambda", race.lambda, "l1 penalty (default: noise ceiling)");
    cmd_race->add_option("--distractors", race.distractors, "prior-pool distractors per agent");
    cmd_race->add_option("--seed", race.seed, "prior-pool seed (0: instance noise seed)");

    VerifyArgs verify;
    CLI::App* cmd_verify = app.add_subcommand("verify", "cross-check the exact solvers");
    cmd_verify->add_option("--n-min", verify.n_min, "smallest agent count");
    cmd_verify->add_option("--n-max", verify.n_max, "largest agent count");
    cmd_verify->add_option("--replicates", verify.replicates, "instances per agent count");
    cmd_verify->add_option("--seed", verify.seed, "base seed");
    cmd_verify->add_option("--out", verify.out, "verification report file");
    cmd_verify
        ->add_flag("--inject-fault", verify.inject_fault,
                   "corrupt one cached value to exercise the failure path")
        ->group("");  // hidden test hook

    TailArgs tail;
    CLI::App* cmd_tail = app.add_subcommand("tail", "noise concentration check");
    cmd_tail->add_option("--sigma", tail.sigma, "noise scale")->required();
    cmd_tail->add_option("--n", tail.n, "agent count")->required();
    cmd_tail->add_option("--replicates", tail.replicates, "sample count (>= 100)");
    cmd_tail->add_option("--seed", tail.seed, "sampling seed");
    cmd_tail->add_option("--t", tail.t_grid, "tail threshold (repeatable; default grid)");
    cmd_tail->add_option("--out", tail.out, "report file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (cmd_gen->parsed()) return run_gen(gen);
        if (cmd_solve->parsed()) return run_solve(solve);
        if (cmd_race->parsed()) return run_race_cmd(race);
        if (cmd_verify->parsed()) return run_verify(verify);
        if (cmd_tail->parsed()) return run_tail(tail);
    } catch (const GuardViolation& e) {
        std::cerr << "guard violation: " << e.what() << "\n";
        return kExitGuard;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
