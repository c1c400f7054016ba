#include "spe/softmodel.hpp"

#include <algorithm>
#include <limits>

namespace spe {

namespace {

PathMetrics solve_nodes(const std::vector<ExecNode>& nodes, const PerformanceAnnotation& ann);

PathMetrics solve_node(const ExecNode& n, const PerformanceAnnotation& ann) {
    if (const auto* basic = std::get_if<BasicNode>(&n.node)) {
        auto it = ann.node_times.find(basic->name);
        if (it == ann.node_times.end())
            throw ModelError("basic node '" + basic->name + "' has no time annotation");
        return {it->second, it->second, it->second};
    }
    if (const auto* ex = std::get_if<ExpandedNode>(&n.node))
        return solve_nodes(ex->sub.body, ann);
    if (const auto* rep = std::get_if<RepetitionNode>(&n.node)) {
        if (rep->count < 0) throw ModelError("repetition count is negative");
        const PathMetrics body = solve_nodes(rep->body, ann);
        const double n_times = static_cast<double>(rep->count);
        return {n_times * body.shortest, n_times * body.longest, n_times * body.average};
    }
    if (const auto* cs = std::get_if<CaseNode>(&n.node)) {
        if (cs->branches.empty()) throw ModelError("case has no branches");
        PathMetrics m;
        m.shortest = std::numeric_limits<double>::infinity();
        m.longest = 0.0;
        m.average = 0.0;
        for (const auto& b : cs->branches) {
            const PathMetrics branch = solve_nodes(b.body, ann);
            // Worst and best case are probability-free: a zero-probability
            // branch still bounds the extremes.
            m.shortest = std::min(m.shortest, branch.shortest);
            m.longest = std::max(m.longest, branch.longest);
            m.average += b.probability * branch.average;
        }
        return m;
    }
    if (const auto* par = std::get_if<PardoNode>(&n.node)) {
        if (par->branches.empty()) throw ModelError("pardo has no branches");
        PathMetrics m{0.0, 0.0, 0.0};
        // Fork-join: the slowest branch gates completion, metric by metric.
        for (const auto& b : par->branches) {
            const PathMetrics branch = solve_nodes(b, ann);
            m.shortest = std::max(m.shortest, branch.shortest);
            m.longest = std::max(m.longest, branch.longest);
            m.average = std::max(m.average, branch.average);
        }
        return m;
    }
    // Split: spawned work never holds up the response path.
    return {0.0, 0.0, 0.0};
}

PathMetrics solve_nodes(const std::vector<ExecNode>& nodes, const PerformanceAnnotation& ann) {
    PathMetrics total{0.0, 0.0, 0.0};
    for (const auto& n : nodes) {
        const PathMetrics m = solve_node(n, ann);
        total.shortest += m.shortest;
        total.longest += m.longest;
        total.average += m.average;
    }
    return total;
}

void accumulate_requests(const std::vector<ExecNode>& nodes, double weight,
                         const PerformanceAnnotation& ann,
                         std::map<std::string, double>& totals) {
    for (const auto& n : nodes) {
        if (const auto* basic = std::get_if<BasicNode>(&n.node)) {
            auto it = ann.resource_requests.find(basic->name);
            if (it == ann.resource_requests.end()) continue;
            for (const auto& [resource, count] : it->second)
                totals[resource] += weight * count;
        } else if (const auto* ex = std::get_if<ExpandedNode>(&n.node)) {
            accumulate_requests(ex->sub.body, weight, ann, totals);
        } else if (const auto* rep = std::get_if<RepetitionNode>(&n.node)) {
            accumulate_requests(rep->body, weight * static_cast<double>(rep->count), ann,
                                totals);
        } else if (const auto* cs = std::get_if<CaseNode>(&n.node)) {
            for (const auto& b : cs->branches)
                accumulate_requests(b.body, weight * b.probability, ann, totals);
        } else if (const auto* par = std::get_if<PardoNode>(&n.node)) {
            for (const auto& b : par->branches) accumulate_requests(b, weight, ann, totals);
        } else if (const auto* split = std::get_if<SplitNode>(&n.node)) {
            // Off the response path, but the devices still do the work.
            for (const auto& b : split->spawned) accumulate_requests(b, weight, ann, totals);
        }
    }
}

} // namespace

PathMetrics solve_static(const ExecutionGraph& g, const PerformanceAnnotation& ann) {
    auto diags = validate_graph(g, &ann);
    if (has_errors(diags))
        throw ModelError("invalid execution graph: " + diags.front().message);
    return solve_nodes(g.body, ann);
}

DemandVector device_demands(const ExecutionGraph& g, const PerformanceAnnotation& ann,
                            const OverheadMatrix& ov) {
    auto diags = validate_graph(g);
    if (has_errors(diags))
        throw ModelError("invalid execution graph: " + diags.front().message);

    std::map<std::string, double> request_totals;
    accumulate_requests(g.body, 1.0, ann, request_totals);

    DemandVector demands;
    for (const auto& device : ov.devices) demands.per_device[device] = 0.0;
    for (const auto& [resource, total] : request_totals) {
        auto it = std::find(ov.software_resources.begin(), ov.software_resources.end(),
                            resource);
        if (it == ov.software_resources.end())
            throw ModelError("unknown software resource '" + resource + "'");
        const std::size_t k =
            static_cast<std::size_t>(it - ov.software_resources.begin());
        for (std::size_t j = 0; j < ov.devices.size(); ++j)
            demands.per_device[ov.devices[j]] += total * ov.per_request[k][j];
    }
    return demands;
}

Verdict check_objective(const PathMetrics& m, const Objective& o) {
    const double value = metric_value(m, o.metric);
    return {value <= o.threshold, o.threshold - value};
}

double metric_value(const PathMetrics& m, MetricKind kind) {
    switch (kind) {
        case MetricKind::shortest: return m.shortest;
        case MetricKind::average: return m.average;
        case MetricKind::longest: return m.longest;
    }
    return m.longest;
}

const char* metric_name(MetricKind kind) {
    switch (kind) {
        case MetricKind::shortest: return "shortest";
        case MetricKind::average: return "average";
        case MetricKind::longest: return "longest";
    }
    return "longest";
}

} // namespace spe
