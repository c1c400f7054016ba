#pragma once

#include <string>
#include <variant>
#include <vector>

#include "spe/model.hpp"

namespace spe {

// An execution graph is a structured tree: a sequence of nodes, where
// control nodes (repetition, case, pardo, split) carry nested sequences.
// Every graph the source diagrams produce reduces to this form; the DOT
// exporter re-introduces explicit arcs for drawing.

struct ExecNode;

struct ExecutionGraph {
    std::string name;
    std::vector<ExecNode> body; // sequential composition, non-empty when valid

    bool operator==(const ExecutionGraph&) const = default;
};

/// Leaf unit of work. The name binds it to annotation times and resource
/// requests at solve time.
struct BasicNode {
    std::string name;

    bool operator==(const BasicNode&) const = default;
};

/// Summary node whose details live in a separate sub-graph.
struct ExpandedNode {
    std::string name;
    ExecutionGraph sub;

    bool operator==(const ExpandedNode&) const = default;
};

/// Body executed `count` times in sequence.
struct RepetitionNode {
    RepCount count = 0;
    std::vector<ExecNode> body;

    bool operator==(const RepetitionNode&) const = default;
};

struct CaseBranch {
    double probability = 0.0;
    std::vector<ExecNode> body;

    bool operator==(const CaseBranch&) const = default;
};

/// Probabilistic branch; probabilities sum to 1 (1e-9).
struct CaseNode {
    std::vector<CaseBranch> branches;

    bool operator==(const CaseNode&) const = default;
};

/// Fork-join: all branches execute concurrently, flow resumes when every
/// branch completes. Elapsed time is the per-metric max over branches.
struct PardoNode {
    std::vector<std::vector<ExecNode>> branches;

    bool operator==(const PardoNode&) const = default;
};

/// Asynchronous fire-and-forget spawn. Spawned work contributes device
/// demand but not elapsed time.
struct SplitNode {
    std::vector<std::vector<ExecNode>> spawned;

    bool operator==(const SplitNode&) const = default;
};

struct ExecNode {
    std::variant<BasicNode, ExpandedNode, RepetitionNode, CaseNode, PardoNode, SplitNode> node;

    bool operator==(const ExecNode&) const = default;
};

// ---------------------------------------------------------------------------
// Derivation from scenario models
// ---------------------------------------------------------------------------

/// One merge rule: the listed actions, when they appear as consecutive basic
/// nodes in declaration order, collapse into a single basic node called
/// `name`. Annotations must then bind `name` directly.
struct CombineGroup {
    std::string name;
    std::vector<std::string> actions;

    bool operator==(const CombineGroup&) const = default;
};

struct CombineRules {
    std::vector<CombineGroup> groups;

    bool empty() const { return groups.empty(); }

    bool operator==(const CombineRules&) const = default;
};

/// Derives the execution graph of one scenario. Sync messages become basic
/// nodes named by their action; self-calls become repetitions; loops, alts
/// and pars map to repetition/case/pardo; refs become expanded nodes holding
/// the referenced scenario's graph. An async message becomes a split whose
/// spawned branch holds the receiver's own follow-up steps (its self-calls
/// and further async sends) up to the next synchronization.
ExecutionGraph from_sequence(const DesignModel& model, const std::string& scenario,
                             const CombineRules& combine = {});

/// Derives the graph of an activity model by walking the edge relation from
/// the initial node. Decisions with a back-edge outcome become repetitions
/// (the outcome must carry a repetition count); decisions with only forward
/// outcomes become cases; declared fork/join pairs become pardo regions.
ExecutionGraph from_activity(const ActivityModel& a);

/// Derives the graph of a statechart by walking transitions from the initial
/// state. Sequential composites become expanded nodes, concurrent composites
/// become pardos with one branch per region. The transition structure must be
/// acyclic; loops must be re-expressed as repetition counts upstream.
ExecutionGraph from_statechart(const StateChartModel& sc);

// ---------------------------------------------------------------------------
// Graph operations
// ---------------------------------------------------------------------------

/// Replaces every expanded node, at any depth, by its sub-graph body.
/// Idempotent; preserves all solved metrics.
ExecutionGraph flatten(const ExecutionGraph& g);

/// Structural validation: probability sums, repetition counts, branch
/// arities, name uniqueness per graph level. When `ann` is given, also
/// checks that every basic node has a time binding.
std::vector<Diagnostic> validate_graph(const ExecutionGraph& g,
                                       const PerformanceAnnotation* ann = nullptr);

/// Deterministic DOT rendering (stable node ids, sorted attributes).
std::string to_dot(const ExecutionGraph& g);

/// Canonical text form of a graph, parseable by parse_graph.
std::string serialize_graph(const ExecutionGraph& g);
ExecutionGraph parse_graph(const std::string& text);

} // namespace spe
