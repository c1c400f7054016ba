#pragma once

#include <map>
#include <string>

#include "spe/execgraph.hpp"
#include "spe/model.hpp"

namespace spe {

/// Elapsed-time summary of a solved software execution model, in the same
/// abstract time units as the annotation.
struct PathMetrics {
    double shortest = 0.0;
    double longest = 0.0;
    double average = 0.0;

    bool operator==(const PathMetrics&) const = default;
};

/// Total device service demand generated by one scenario execution.
struct DemandVector {
    std::map<std::string, double> per_device;

    bool operator==(const DemandVector&) const = default;
};

enum class MetricKind { shortest, average, longest };

struct Objective {
    MetricKind metric = MetricKind::longest;
    double threshold = 0.0; // metric must be <= threshold

    bool operator==(const Objective&) const = default;
};

struct Verdict {
    bool pass = false;
    double margin = 0.0; // threshold - metric, signed

    bool operator==(const Verdict&) const = default;
};

/// Static solution of the software execution model.
///
/// Reduction rules, applied bottom-up over the structured graph:
///   basic          t(name) for all three metrics
///   sequence       member-wise sum
///   repetition(n)  n * metric(body)
///   case           shortest = min of branch shortests, longest = max of
///                  branch longests (probability-free so that zero-probability
///                  branches still bound the worst case), average = sum of
///                  p_i * branch average
///   pardo          per-metric max over branches (fork-join completion)
///   split          0 elapsed time (spawned work is off the response path)
///   expanded       metric of the sub-graph
///
/// Throws ModelError when the graph is invalid or a basic node has no time
/// binding in `ann`.
PathMetrics solve_static(const ExecutionGraph& g, const PerformanceAnnotation& ann);

/// Total device demands: every basic node's resource requests, scaled by its
/// execution weight (repetition counts and case probabilities along the
/// path; pardo and split branches count fully), mapped through the overhead
/// matrix. Nodes without request entries contribute nothing. Throws
/// ModelError when a request names a software resource missing from `ov`.
DemandVector device_demands(const ExecutionGraph& g, const PerformanceAnnotation& ann,
                            const OverheadMatrix& ov);

Verdict check_objective(const PathMetrics& m, const Objective& o);

double metric_value(const PathMetrics& m, MetricKind kind);
const char* metric_name(MetricKind kind);

} // namespace spe
