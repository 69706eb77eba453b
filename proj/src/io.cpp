#include "csg/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace csg::io {
namespace {

ordered_json finite(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

std::string placement_name(Placement p) {
    switch (p) {
        case Placement::Contiguous: return "contiguous";
        case Placement::Random: return "random";
        case Placement::DisjointHalves: return "disjoint-halves";
    }
    throw std::logic_error("unknown placement");
}

Placement placement_from(const std::string& name) {
    if (name == "contiguous") return Placement::Contiguous;
    if (name == "random") return Placement::Random;
    if (name == "disjoint-halves") return Placement::DisjointHalves;
    throw std::invalid_argument("unknown placement: " + name);
}

ordered_json structure_to_json(const CoalitionStructure& cs) {
    ordered_json blocks = ordered_json::array();
    for (const Coalition block : cs.blocks) blocks.push_back(block.agents());
    return blocks;
}

std::string sanitized(std::string text) {
    for (char& c : text)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return text;
}

ordered_json crossing_to_json(const std::optional<TraceRecord>& record) {
    if (!record) return nullptr;
    ordered_json j;
    j["work_units"] = record->work_units;
    j["oracle_queries"] = record->oracle_queries;
    j["incumbent"] = record->incumbent;
    return j;
}

std::string format_double(double v) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return buffer;
}

}  // namespace

ordered_json instance_to_json(const SynergyModel& model,
                              const std::optional<GeneratorParams>& provenance) {
    ordered_json j;
    j["format_version"] = kFormatVersion;
    j["n"] = model.agent_count();
    ordered_json templates = ordered_json::array();
    for (const Coalition t : model.templates()) templates.push_back(t.agents());
    j["templates"] = templates;
    j["weights"] = model.weights();
    j["sigma"] = model.sigma();
    j["noise_seed"] = model.noise_seed();
    if (provenance) {
        ordered_json p;
        p["k"] = provenance->k;
        p["template_size"] = provenance->template_size;
        p["w_lo"] = provenance->w_lo;
        p["w_hi"] = provenance->w_hi;
        if (provenance->explicit_weights) p["explicit_weights"] = *provenance->explicit_weights;
        p["sigma"] = provenance->sigma;
        p["placement"] = placement_name(provenance->placement);
        p["seed"] = provenance->seed;
        p["require_margin"] = provenance->require_margin;
        j["generator_params"] = p;
    }
    return j;
}

SynergyModel instance_from_json(const ordered_json& j) {
    if (!j.contains("format_version") || !j["format_version"].is_number_integer())
        throw std::invalid_argument("instance file lacks format_version");
    if (j["format_version"].get<int>() != kFormatVersion)
        throw std::invalid_argument("unsupported instance format_version");
    const int n = j.at("n").get<int>();
    std::vector<Coalition> templates;
    for (const auto& agents : j.at("templates"))
        templates.push_back(Coalition::of(agents.get<std::vector<int>>()));
    auto weights = j.at("weights").get<std::vector<double>>();
    const double sigma = j.at("sigma").get<double>();
    const auto noise_seed = j.at("noise_seed").get<std::uint64_t>();
    return SynergyModel(n, std::move(templates), std::move(weights), sigma, noise_seed);
}

std::optional<GeneratorParams> provenance_from_json(const ordered_json& j) {
    if (!j.contains("generator_params")) return std::nullopt;
    const ordered_json& p = j.at("generator_params");
    GeneratorParams params;
    params.n = j.at("n").get<int>();
    params.k = p.at("k").get<int>();
    params.template_size = p.at("template_size").get<int>();
    params.w_lo = p.at("w_lo").get<double>();
    params.w_hi = p.at("w_hi").get<double>();
    if (p.contains("explicit_weights"))
        params.explicit_weights = p.at("explicit_weights").get<std::vector<double>>();
    params.sigma = p.at("sigma").get<double>();
    params.placement = placement_from(p.at("placement").get<std::string>());
    params.seed = p.at("seed").get<std::uint64_t>();
    params.require_margin = p.at("require_margin").get<bool>();
    return params;
}

void save_instance(const std::filesystem::path& path, const SynergyModel& model,
                   const std::optional<GeneratorParams>& provenance) {
    write_json(path, instance_to_json(model, provenance));
}

SynergyModel load_instance(const std::filesystem::path& path) {
    return instance_from_json(read_json(path));
}

void write_trace_csv(const std::filesystem::path& path, const AnytimeTrace& trace) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "work_units,wall_ns,incumbent,event\n";
    for (const TraceRecord& r : trace.records())
        out << r.work_units << ',' << r.wall_ns << ',' << format_double(r.incumbent) << ','
            << sanitized(r.event) << '\n';
}

void write_plot_csv(const std::filesystem::path& path,
                    const std::vector<const AnytimeTrace*>& traces) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "solver,oracle_queries,incumbent\n";
    for (const AnytimeTrace* trace : traces) {
        if (!trace) continue;
        for (const TraceRecord& r : trace->records())
            out << sanitized(trace->solver_id) << ',' << r.oracle_queries << ','
                << format_double(r.incumbent) << '\n';
    }
}

ordered_json race_report_to_json(const RaceReport& report) {
    ordered_json j;
    j["format_version"] = kFormatVersion;
    ordered_json inst;
    inst["n"] = report.n;
    inst["template_count"] = report.template_count;
    inst["sigma"] = report.sigma;
    inst["noise_seed"] = report.noise_seed;
    j["instance"] = inst;
    j["opt"] = report.opt;
    ordered_json thresholds;
    thresholds["q1"] = report.thresholds.q1;
    thresholds["q2"] = report.thresholds.q2;
    thresholds["epsilon"] = report.thresholds.epsilon;
    j["thresholds"] = thresholds;
    ordered_json margin;
    margin["gamma_min"] = finite(report.margin.gamma_min);
    margin["gamma_gap"] = finite(report.margin.gamma_gap);
    margin["w_max"] = report.margin.w_max;
    margin["rhs"] = report.margin.rhs;
    margin["satisfied_min"] = report.margin.satisfied_min;
    margin["satisfied_gap"] = report.margin.satisfied_gap;
    j["margin"] = margin;
    ordered_json solvers = ordered_json::array();
    for (const SolverReport& s : report.solvers) {
        ordered_json e;
        e["solver"] = s.solver_id;
        e["work_unit_kind"] = s.work_unit_kind;
        e["ran"] = s.ran;
        e["skip_reason"] = s.ran ? ordered_json(nullptr) : ordered_json(s.skip_reason);
        e["final_value"] = finite(s.final_value);
        e["total_work"] = s.total_work;
        e["oracle_queries"] = s.oracle_queries;
        e["q1"] = crossing_to_json(s.q1_crossing);
        e["q2"] = crossing_to_json(s.q2_crossing);
        solvers.push_back(e);
    }
    j["solvers"] = solvers;
    j["verdict"] = report.separated ? "separated" : "not separated";
    return j;
}

ordered_json tail_report_to_json(const TailReport& report) {
    ordered_json j;
    j["format_version"] = kFormatVersion;
    j["sigma"] = report.sigma;
    j["n"] = report.n;
    j["replicates"] = report.replicates;
    j["uniform_replicates"] = report.uniform_replicates;
    j["uniform_threshold"] = report.uniform_threshold;
    j["uniform_fraction"] = report.uniform_fraction;
    ordered_json entries = ordered_json::array();
    for (const TailEntry& e : report.entries) {
        ordered_json entry;
        entry["t"] = e.t;
        entry["frequency"] = e.frequency;
        entry["bound"] = e.bound;
        entry["standard_error"] = e.standard_error;
        entry["satisfied"] = e.satisfied;
        entries.push_back(entry);
    }
    j["entries"] = entries;
    return j;
}

ordered_json solve_summary_to_json(const SolveSummary& summary) {
    ordered_json j;
    j["format_version"] = kFormatVersion;
    j["solver"] = summary.solver;
    j["n"] = summary.n;
    j["value"] = finite(summary.value);
    j["structure"] = structure_to_json(summary.structure);
    j["work_unit_kind"] = summary.work_unit_kind;
    j["work_units"] = summary.work_units;
    j["oracle_queries"] = summary.oracle_queries;
    if (summary.budget_exhausted) j["budget_exhausted"] = *summary.budget_exhausted;
    if (summary.iterations) j["iterations"] = *summary.iterations;
    return j;
}

void write_json(const std::filesystem::path& path, const ordered_json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

ordered_json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    ordered_json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument("malformed JSON in " + path.string() + ": " + e.what());
    }
    return j;
}

}  // namespace csg::io
