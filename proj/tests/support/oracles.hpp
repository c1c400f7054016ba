#pragma once

// Independent oracles for the analytic solvers. These deliberately share no
// code with the implementations they check: path metrics come from explicit
// enumeration of every execution path, and closed-network metrics come from
// the steady state of the underlying continuous-time Markov chain.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "spe/execgraph.hpp"
#include "spe/softmodel.hpp"
#include "spe/sysmodel.hpp"

namespace spe::test {

struct PathSample {
    double duration = 0.0;
    double probability = 1.0;
};

struct PathLimitExceeded : std::runtime_error {
    PathLimitExceeded() : std::runtime_error("path enumeration limit exceeded") {}
};

/// Every execution path with its duration and probability. Repetitions
/// expand into sequential copies, pardo takes the max over the branch cross
/// product, split contributes zero time. Throws PathLimitExceeded when more
/// than `limit` paths would be produced.
std::vector<PathSample> enumerate_paths(const ExecutionGraph& g,
                                        const PerformanceAnnotation& ann,
                                        std::size_t limit);

/// min / max / expectation over an enumerated path set.
PathMetrics metrics_from_paths(const std::vector<PathSample>& paths);

/// Exact steady-state solution of the closed cyclic network (exponential
/// services, single-server queueing centers, infinite-server think stage)
/// via the global balance equations. Feasible for small N and few centers.
SystemMetrics markov_closed_metrics(const QueueingNetwork& net, std::int64_t population,
                                    double think_time);

} // namespace spe::test
