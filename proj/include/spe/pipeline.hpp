#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spe/collaboration.hpp"
#include "spe/execgraph.hpp"
#include "spe/model.hpp"
#include "spe/simqnet.hpp"
#include "spe/softmodel.hpp"
#include "spe/sysmodel.hpp"

namespace spe {

enum class OutputFormat { text, structured, dot };

/// Exit codes shared by the pipeline and the command line front end.
enum ExitCode : int {
    exit_proceed = 0,
    exit_objectives_failed = 1,
    exit_input_error = 2,
};

struct PipelineConfig {
    std::string model_path;
    std::optional<std::string> scenario; // root scenario; defaults to the first
    std::vector<Objective> objectives;
    std::optional<Workload> workload;
    bool simulate = false;
    std::optional<SimConfig> sim_config; // present iff simulate
    OutputFormat output_format = OutputFormat::text;
    CombineRules combine;
    bool uniform_probs = false;
    bool weighted_collaboration = false;
};

struct StepStatus {
    int number = 0;
    std::string name;
    std::string status; // "done" or "skipped: <reason>"
};

struct ObjectiveVerdict {
    Objective objective;
    double value = 0.0;
    Verdict verdict;
};

struct AssessmentReport {
    std::string model_path;
    std::string scenario;
    std::vector<StepStatus> steps;
    ExecutionGraph graph; // derived, unflattened (for rendering)
    std::vector<RankedComponent> collaboration;
    PathMetrics path_metrics;
    std::optional<DemandVector> demands;
    std::optional<SystemMetrics> system;
    std::optional<SimMetrics> sim;
    std::optional<SimConfig> sim_config; // echoed for reproducibility
    std::optional<AgreementReport> agreement;
    std::vector<ObjectiveVerdict> verdicts;
    bool proceed = false; // true iff every verdict passes
};

/// Runs the whole assessment in order: parse and validate the model, derive
/// the execution graph, rank the collaboration, solve the software model,
/// incorporate deployment and overheads into the system model, optionally
/// simulate, and judge the objectives. Steps whose inputs are absent from
/// the model are recorded as skipped. Deterministic for fixed inputs and
/// seed. Throws ModelError/ParseError on invalid input; an empty objective
/// list is an error.
AssessmentReport run_pipeline(const PipelineConfig& cfg);

struct ComparisonReport {
    std::vector<AssessmentReport> reports; // input order
    std::vector<std::size_t> ranking;      // indices, best first
};

/// Assesses each alternative (in parallel when OpenMP is enabled; results
/// stay in input order) and ranks them by objectives passed, then average
/// path time, then input order. All configurations must share one objective
/// list and there must be at least two.
ComparisonReport compare_alternatives(const std::vector<PipelineConfig>& cfgs);

std::string render_report(const AssessmentReport& r, OutputFormat format);
std::string render_comparison(const ComparisonReport& r, OutputFormat format);

/// `open:RATE` or `closed:N,Z`.
Workload parse_workload_spec(const std::string& spec);

} // namespace spe
