#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "spe/model.hpp"
#include "spe/softmodel.hpp"

namespace spe {

enum class CenterKind { queueing, delay };

/// One service center of the system execution model. `demand` is the total
/// service time a job requires at this center per pass through the system
/// (visit counts folded in).
struct ServiceCenter {
    std::string name;
    CenterKind kind = CenterKind::queueing;
    SchedulingPolicy scheduling = SchedulingPolicy::fcfs;
    double demand = 0.0;

    bool operator==(const ServiceCenter&) const = default;
};

struct QueueingNetwork {
    std::vector<ServiceCenter> centers; // sorted by name

    bool operator==(const QueueingNetwork&) const = default;
};

struct OpenWorkload {
    double arrival_rate = 0.0; // jobs per time unit, > 0

    bool operator==(const OpenWorkload&) const = default;
};

struct ClosedWorkload {
    std::int64_t population = 1;
    double think_time = 0.0;

    bool operator==(const ClosedWorkload&) const = default;
};

using Workload = std::variant<OpenWorkload, ClosedWorkload>;

struct CenterMetrics {
    double utilization = 0.0;
    double residence_time = 0.0;
    double queue_length = 0.0;

    bool operator==(const CenterMetrics&) const = default;
};

struct SystemMetrics {
    std::map<std::string, CenterMetrics> per_center;
    double throughput = 0.0;
    double response_time = 0.0;
    std::string bottleneck;
    // Closed-model throughput bounds: 1/D_max and N/(sum D + Z).
    std::optional<double> bound_demand;
    std::optional<double> bound_population;

    bool operator==(const SystemMetrics&) const = default;
};

/// One step of the exact MVA recursion, kept so invariants (Little's law,
/// monotone throughput) can be checked at every population size.
struct MvaStep {
    std::int64_t population = 0;
    std::map<std::string, double> residence_time;
    std::map<std::string, double> queue_length;
    double throughput = 0.0;
    double response_time = 0.0;
};

struct BottleneckReport {
    std::string center;
    double max_demand = 0.0;
    double bound_demand = 0.0;                  // X <= 1/D_max
    std::optional<double> bound_population;     // X <= N/(sum D + Z), closed only
    std::optional<double> crossover_population; // N* = (sum D + Z)/D_max, closed only
};

struct ScaleDemand {
    std::string center;
    double factor = 1.0;
};
struct SetScheduling {
    std::string center;
    SchedulingPolicy scheduling = SchedulingPolicy::fcfs;
};
struct AddCenter {
    ServiceCenter center;
};
struct RemoveCenter {
    std::string center;
};
using Change = std::variant<ScaleDemand, SetScheduling, AddCenter, RemoveCenter>;

/// Builds the queueing network from solved software-model demands plus the
/// deployment. Each demanded device must match exactly one deployed device;
/// its demand is divided by the device speed factor. Throws ModelError on
/// missing or ambiguous device mappings.
QueueingNetwork build_network(const DemandVector& demands, const DeploymentModel& dep);

/// Open single-class product-form solution: U_i = lambda*D_i, queueing
/// R_i = D_i/(1-U_i), delay R_i = D_i. Throws ModelError naming the saturated
/// center and the maximum stable rate when lambda*D_i >= 1 anywhere.
SystemMetrics solve_open(const QueueingNetwork& net, double arrival_rate);

/// Exact single-class MVA for the closed model; returns metrics at the full
/// population and the two throughput bounds.
SystemMetrics solve_closed(const QueueingNetwork& net, std::int64_t population,
                           double think_time);

/// The MVA recursion itself, one entry per population 1..N.
std::vector<MvaStep> mva_trace(const QueueingNetwork& net, std::int64_t population,
                               double think_time);

/// Dispatches to solve_open or solve_closed.
SystemMetrics solve(const QueueingNetwork& net, const Workload& w);

BottleneckReport bottleneck_report(const QueueingNetwork& net, const Workload& w);

/// Applies one change to a copy of the network and re-solves it under the
/// given workload. The original network is untouched.
SystemMetrics what_if(const QueueingNetwork& net, const Change& change, const Workload& w);

QueueingNetwork apply_change(const QueueingNetwork& net, const Change& change);

} // namespace spe
