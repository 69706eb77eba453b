#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "csg/bnb.hpp"
#include "csg/core.hpp"
#include "csg/genmodel.hpp"
#include "csg/harness.hpp"
#include "csg/sparse.hpp"
#include "csg/trace.hpp"

namespace csg::io {

using ordered_json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

/// Instance serialization. Round-trips every SynergyModel field exactly
/// (weights and sigma as IEEE doubles); generator provenance rides along
/// when available but is not needed to reconstruct the oracle.
ordered_json instance_to_json(const SynergyModel& model,
                              const std::optional<GeneratorParams>& provenance = {});
SynergyModel instance_from_json(const ordered_json& j);
std::optional<GeneratorParams> provenance_from_json(const ordered_json& j);
void save_instance(const std::filesystem::path& path, const SynergyModel& model,
                   const std::optional<GeneratorParams>& provenance = {});
SynergyModel load_instance(const std::filesystem::path& path);

/// Anytime trace as CSV, header `work_units,wall_ns,incumbent,event`.
/// Event text is sanitized so rows stay four columns wide.
void write_trace_csv(const std::filesystem::path& path, const AnytimeTrace& trace);

/// Long-format plot data, header `solver,oracle_queries,incumbent`: one row
/// per trace record per solver.
void write_plot_csv(const std::filesystem::path& path,
                    const std::vector<const AnytimeTrace*>& traces);

ordered_json race_report_to_json(const RaceReport& report);
ordered_json tail_report_to_json(const TailReport& report);

/// Per-solver run summary for the solve command.
struct SolveSummary {
    std::string solver;
    int n = 0;
    double value = 0.0;
    CoalitionStructure structure;
    std::string work_unit_kind;
    std::uint64_t work_units = 0;
    std::uint64_t oracle_queries = 0;
    std::optional<bool> budget_exhausted;  // bnb only
    std::optional<int> iterations;         // greedy / l1 picks
};

ordered_json solve_summary_to_json(const SolveSummary& summary);

void write_json(const std::filesystem::path& path, const ordered_json& j);
ordered_json read_json(const std::filesystem::path& path);

}  // namespace csg::io
