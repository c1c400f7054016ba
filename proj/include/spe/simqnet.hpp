#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "spe/sysmodel.hpp"

namespace spe {

struct SimConfig {
    double horizon = 0.0;      // simulated time per replication, > 0
    double warmup = 0.0;       // statistics discarded before this time
    std::uint64_t seed = 0;
    int replications = 1;

    bool operator==(const SimConfig&) const = default;
};

/// Default warmup when the caller gives none: 10% of the horizon.
inline double default_warmup(double horizon) { return 0.1 * horizon; }

struct Estimate {
    double mean = 0.0;
    double half_width = 0.0; // 95% CI half width over replication means

    bool operator==(const Estimate&) const = default;
};

struct SimCenterMetrics {
    Estimate utilization;
    Estimate residence_time;
    Estimate queue_length;

    bool operator==(const SimCenterMetrics&) const = default;
};

struct SimMetrics {
    std::map<std::string, SimCenterMetrics> per_center;
    Estimate throughput;
    Estimate response_time;
    std::int64_t completed_jobs = 0;
    // Service completions attributed to counted jobs, per center; equals
    // completed_jobs at every center since each job visits each center once.
    std::map<std::string, std::int64_t> center_completions;

    bool operator==(const SimMetrics&) const = default;
};

/// Discrete-event simulation of the network: Poisson arrivals (open) or N
/// circulating jobs with exponential think time (closed); every job visits
/// the centers once, in network order, with exponential service times of
/// mean D_i. FCFS centers queue in arrival order, PS centers share the
/// server equally, delay centers never queue.
///
/// Deterministic: identical (net, w, cfg) produce bit-identical metrics.
/// Replications run in parallel when OpenMP is enabled and are reduced in
/// replication-index order, so thread count does not affect the result.
/// Confidence intervals are Student-t over the replication means.
SimMetrics simulate(const QueueingNetwork& net, const Workload& w, const SimConfig& cfg);

/// Reference implementation: the same per-replication kernel run strictly
/// sequentially. Kept for the parallel-equivalence tests and the benchmark.
SimMetrics simulate_serial(const QueueingNetwork& net, const Workload& w,
                           const SimConfig& cfg);

struct MetricAgreement {
    std::string metric;
    double analytic = 0.0;
    double simulated = 0.0;
    double half_width = 0.0;
    bool pass = false;
};

struct AgreementReport {
    std::vector<MetricAgreement> metrics;
    bool pass = false;
};

/// Per-metric comparison of analytic and simulated results. A metric agrees
/// when |analytic - sim.mean| <= max(rel_tol * |analytic|, sim half width).
/// Throws ModelError when the center sets differ.
AgreementReport cross_validate(const SystemMetrics& analytic, const SimMetrics& sim,
                               double rel_tol);

/// Two-sided 95% Student-t quantile for the given degrees of freedom.
double student_t_975(int degrees_of_freedom);

} // namespace spe
