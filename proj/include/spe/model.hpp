#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "spe/diagnostics.hpp"

namespace spe {

using RepCount = std::int64_t;

// ---------------------------------------------------------------------------
// Sequence scenarios
// ---------------------------------------------------------------------------

enum class MessageKind { sync, async };

struct Step;

/// A message between two participants. `action` names the work the receiver
/// performs; it is also the execution-graph node name, so actions must be
/// unique within a scenario if the graph is to validate.
struct MessageStep {
    std::string from;
    std::string to;
    MessageKind kind = MessageKind::sync;
    std::string action;

    bool operator==(const MessageStep&) const = default;
};

/// Self-delegation: a participant invoking its own action, optionally
/// repeated (a self-loop with a repetition count).
struct SelfCallStep {
    std::string on;
    std::string action;
    RepCount repetitions = 1;

    bool operator==(const SelfCallStep&) const = default;
};

struct LoopStep {
    RepCount count = 0;
    std::vector<Step> body;

    bool operator==(const LoopStep&) const = default;
};

struct AltBranch {
    double probability = 0.0;
    std::vector<Step> body;

    bool operator==(const AltBranch&) const = default;
};

/// Probabilistic alternative. Branch probabilities must sum to 1 (1e-9).
struct AltStep {
    std::vector<AltBranch> branches;

    bool operator==(const AltStep&) const = default;
};

/// Fork-join parallelism: all branches run concurrently and all complete.
struct ParStep {
    std::vector<std::vector<Step>> branches;

    bool operator==(const ParStep&) const = default;
};

/// Reference to another scenario in the same model (expanded on derivation).
struct RefStep {
    std::string scenario;

    bool operator==(const RefStep&) const = default;
};

struct Step {
    std::variant<MessageStep, SelfCallStep, LoopStep, AltStep, ParStep, RefStep> node;

    bool operator==(const Step&) const = default;
};

struct SequenceScenario {
    std::string name;
    std::vector<std::string> participants; // declaration order is significant
    std::vector<Step> body;

    bool operator==(const SequenceScenario&) const = default;
};

// ---------------------------------------------------------------------------
// Activity models
// ---------------------------------------------------------------------------

struct DecisionOutcome {
    double probability = 0.0;
    std::string target;
    std::optional<RepCount> repetitions; // required when the outcome is a back-edge

    bool operator==(const DecisionOutcome&) const = default;
};

struct Decision {
    std::string at; // node after which the choice is taken
    std::vector<DecisionOutcome> outcomes;

    bool operator==(const Decision&) const = default;
};

struct ForkJoin {
    std::string fork;
    std::string join;

    bool operator==(const ForkJoin&) const = default;
};

struct ActivityModel {
    std::string name;
    std::vector<std::string> actions; // sorted; includes fork/join bar nodes
    std::string initial;
    std::vector<std::string> finals;  // sorted
    std::vector<std::pair<std::string, std::string>> edges; // sorted
    std::vector<Decision> decisions;  // sorted by `at`
    std::vector<ForkJoin> fork_joins; // sorted by fork node

    bool operator==(const ActivityModel&) const = default;
};

// ---------------------------------------------------------------------------
// Statechart models
// ---------------------------------------------------------------------------

enum class CompositeMode { sequential, concurrent };

struct Transition {
    std::string from;
    std::string to;
    std::optional<std::string> event;
    std::optional<double> probability; // required when `from` has several exits

    bool operator==(const Transition&) const = default;
};

struct CompositeState {
    std::string state;
    CompositeMode mode = CompositeMode::sequential;
    std::vector<std::vector<std::string>> regions; // each region is a sub-state sequence

    bool operator==(const CompositeState&) const = default;
};

struct StateChartModel {
    std::string name;
    std::vector<std::string> states; // sorted
    std::vector<Transition> transitions; // sorted by (from, to)
    std::vector<CompositeState> composites; // sorted by state
    std::string initial;
    std::vector<std::string> finals; // sorted

    bool operator==(const StateChartModel&) const = default;
};

// ---------------------------------------------------------------------------
// Deployment
// ---------------------------------------------------------------------------

enum class DeviceKind { cpu, disk, network, delay };
enum class SchedulingPolicy { fcfs, ps, delay };

struct Device {
    std::string name;
    DeviceKind kind = DeviceKind::cpu;
    SchedulingPolicy scheduling = SchedulingPolicy::fcfs;
    double speed_factor = 1.0; // service-time divisor, > 0

    bool operator==(const Device&) const = default;
};

struct ProcNode {
    std::string name;
    std::vector<Device> devices; // sorted by name

    bool operator==(const ProcNode&) const = default;
};

struct DeploymentModel {
    std::vector<ProcNode> nodes; // sorted by name
    std::map<std::string, std::string> allocation; // component -> node

    bool operator==(const DeploymentModel&) const = default;
};

// ---------------------------------------------------------------------------
// Performance annotations and overheads
// ---------------------------------------------------------------------------

struct PerformanceAnnotation {
    std::map<std::string, double> node_times; // action -> time units
    std::map<std::string, std::map<std::string, double>> resource_requests;

    bool empty() const { return node_times.empty() && resource_requests.empty(); }

    bool operator==(const PerformanceAnnotation&) const = default;
};

/// Software-resource-to-device translation table: per_request[k][j] is the
/// device-j demand generated by one request of software resource k.
struct OverheadMatrix {
    std::vector<std::string> software_resources; // sorted
    std::vector<std::string> devices;            // sorted
    std::vector<std::vector<double>> per_request; // [resource][device]

    bool operator==(const OverheadMatrix&) const = default;
};

// ---------------------------------------------------------------------------
// Collaboration view
// ---------------------------------------------------------------------------

/// Structural interaction counts of one scenario: arrows received/sent per
/// component. Self-loops count once on each side.
struct InteractionMatrix {
    std::vector<std::string> components; // participant order
    std::map<std::string, std::int64_t> in_count;
    std::map<std::string, std::int64_t> out_count;

    bool operator==(const InteractionMatrix&) const = default;
};

// ---------------------------------------------------------------------------
// The design model: everything one document declares
// ---------------------------------------------------------------------------

struct DesignModel {
    std::map<std::string, SequenceScenario> scenarios;
    std::map<std::string, ActivityModel> activities;
    std::map<std::string, StateChartModel> statecharts;
    std::optional<DeploymentModel> deployment;
    PerformanceAnnotation annotations;
    std::optional<OverheadMatrix> overhead;

    bool operator==(const DesignModel&) const = default;
};

/// Checks every structural invariant of the model. Returns an empty list iff
/// the model is valid; never throws.
std::vector<Diagnostic> validate_model(const DesignModel& m);

} // namespace spe
