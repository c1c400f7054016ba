#include "spe/sysmodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "spe/report.hpp"

namespace spe {

namespace {

const ServiceCenter* max_demand_center(const QueueingNetwork& net) {
    const ServiceCenter* best = nullptr;
    for (const auto& c : net.centers) {
        if (!best || c.demand > best->demand ||
            (c.demand == best->demand && c.name < best->name))
            best = &c;
    }
    return best;
}

// Only a single-server (queueing) center caps throughput at 1/D; delay
// centers serve any number of jobs at once.
double max_queueing_demand(const QueueingNetwork& net) {
    double d = 0.0;
    for (const auto& c : net.centers)
        if (c.kind == CenterKind::queueing) d = std::max(d, c.demand);
    return d;
}

double total_demand(const QueueingNetwork& net) {
    double sum = 0.0;
    for (const auto& c : net.centers) sum += c.demand;
    return sum;
}

void require_network(const QueueingNetwork& net) {
    if (net.centers.empty()) throw ModelError("queueing network has no service centers");
    std::set<std::string> names;
    for (const auto& c : net.centers)
        if (!names.insert(c.name).second)
            throw ModelError("duplicate service center '" + c.name + "'");
    for (const auto& c : net.centers) {
        if (c.demand < 0.0)
            throw ModelError("service center '" + c.name + "' has negative demand");
        if (c.kind == CenterKind::delay && c.scheduling != SchedulingPolicy::delay)
            throw ModelError("delay center '" + c.name + "' must use delay scheduling");
    }
}

} // namespace

QueueingNetwork build_network(const DemandVector& demands, const DeploymentModel& dep) {
    QueueingNetwork net;
    for (const auto& [device, demand] : demands.per_device) {
        const Device* found = nullptr;
        for (const auto& node : dep.nodes) {
            for (const auto& dev : node.devices) {
                if (dev.name != device) continue;
                if (found)
                    throw ModelError("device '" + device + "' deployed on multiple nodes");
                found = &dev;
            }
        }
        if (!found)
            throw ModelError("device '" + device + "' has no deployment target");
        ServiceCenter center;
        center.name = device;
        center.kind = found->kind == DeviceKind::delay ? CenterKind::delay
                                                       : CenterKind::queueing;
        center.scheduling = found->scheduling;
        center.demand = demand / found->speed_factor;
        net.centers.push_back(std::move(center));
    }
    std::sort(net.centers.begin(), net.centers.end(),
              [](const ServiceCenter& x, const ServiceCenter& y) { return x.name < y.name; });
    require_network(net);
    return net;
}

SystemMetrics solve_open(const QueueingNetwork& net, double arrival_rate) {
    require_network(net);
    if (!(arrival_rate > 0.0)) throw ModelError("arrival rate must be positive");
    // Stability gate: report the saturated center and the largest stable rate.
    for (const auto& c : net.centers) {
        if (c.kind == CenterKind::queueing && arrival_rate * c.demand >= 1.0) {
            throw ModelError("center '" + c.name + "' saturates at arrival rate " +
                             format_number(arrival_rate) + "; maximum stable rate is " +
                             format_number(1.0 / max_queueing_demand(net)));
        }
    }
    SystemMetrics m;
    m.throughput = arrival_rate;
    m.response_time = 0.0;
    for (const auto& c : net.centers) {
        CenterMetrics cm;
        cm.utilization = arrival_rate * c.demand;
        cm.residence_time = c.kind == CenterKind::delay
                                ? c.demand
                                : c.demand / (1.0 - cm.utilization);
        cm.queue_length = arrival_rate * cm.residence_time;
        m.response_time += cm.residence_time;
        m.per_center[c.name] = cm;
    }
    m.bottleneck = max_demand_center(net)->name;
    return m;
}

std::vector<MvaStep> mva_trace(const QueueingNetwork& net, std::int64_t population,
                               double think_time) {
    require_network(net);
    if (population < 1) throw ModelError("population must be at least 1");
    if (think_time < 0.0) throw ModelError("think time must be non-negative");

    if (total_demand(net) + think_time <= 0.0)
        throw ModelError("closed model needs positive total demand or think time");

    std::vector<MvaStep> steps;
    std::map<std::string, double> queue; // Q_i(n-1), zero at n = 0
    for (const auto& c : net.centers) queue[c.name] = 0.0;

    for (std::int64_t n = 1; n <= population; ++n) {
        MvaStep step;
        step.population = n;
        double response = 0.0;
        for (const auto& c : net.centers) {
            const double r = c.kind == CenterKind::delay
                                 ? c.demand
                                 : c.demand * (1.0 + queue[c.name]);
            step.residence_time[c.name] = r;
            response += r;
        }
        step.response_time = response;
        step.throughput = static_cast<double>(n) / (think_time + response);
        for (const auto& c : net.centers) {
            step.queue_length[c.name] = step.throughput * step.residence_time[c.name];
            queue[c.name] = step.queue_length[c.name];
        }
        steps.push_back(std::move(step));
    }
    return steps;
}

SystemMetrics solve_closed(const QueueingNetwork& net, std::int64_t population,
                           double think_time) {
    const auto steps = mva_trace(net, population, think_time);
    const MvaStep& last = steps.back();

    SystemMetrics m;
    m.throughput = last.throughput;
    m.response_time = last.response_time;
    for (const auto& c : net.centers) {
        CenterMetrics cm;
        cm.utilization = last.throughput * c.demand;
        cm.residence_time = last.residence_time.at(c.name);
        cm.queue_length = last.queue_length.at(c.name);
        m.per_center[c.name] = cm;
    }
    m.bottleneck = max_demand_center(net)->name;
    const double d_max = max_queueing_demand(net);
    if (d_max > 0.0) m.bound_demand = 1.0 / d_max;
    const double denom = total_demand(net) + think_time;
    if (denom > 0.0) m.bound_population = static_cast<double>(population) / denom;
    return m;
}

SystemMetrics solve(const QueueingNetwork& net, const Workload& w) {
    if (const auto* open = std::get_if<OpenWorkload>(&w))
        return solve_open(net, open->arrival_rate);
    const auto& closed = std::get<ClosedWorkload>(w);
    return solve_closed(net, closed.population, closed.think_time);
}

BottleneckReport bottleneck_report(const QueueingNetwork& net, const Workload& w) {
    require_network(net);
    const ServiceCenter* center = max_demand_center(net);
    const double d_max = max_queueing_demand(net);
    BottleneckReport report;
    report.center = center->name;
    report.max_demand = center->demand;
    report.bound_demand =
        d_max > 0.0 ? 1.0 / d_max : std::numeric_limits<double>::infinity();
    if (const auto* closed = std::get_if<ClosedWorkload>(&w)) {
        const double denom = total_demand(net) + closed->think_time;
        report.bound_population = static_cast<double>(closed->population) / denom;
        if (d_max > 0.0) report.crossover_population = denom / d_max;
    }
    return report;
}

QueueingNetwork apply_change(const QueueingNetwork& net, const Change& change) {
    QueueingNetwork modified = net;
    auto find = [&](const std::string& name) -> ServiceCenter& {
        for (auto& c : modified.centers)
            if (c.name == name) return c;
        throw ModelError("change references unknown center '" + name + "'");
    };
    if (const auto* scale = std::get_if<ScaleDemand>(&change)) {
        find(scale->center).demand *= scale->factor;
    } else if (const auto* sched = std::get_if<SetScheduling>(&change)) {
        ServiceCenter& c = find(sched->center);
        c.scheduling = sched->scheduling;
        c.kind = sched->scheduling == SchedulingPolicy::delay ? CenterKind::delay
                                                              : CenterKind::queueing;
    } else if (const auto* add = std::get_if<AddCenter>(&change)) {
        for (const auto& c : modified.centers)
            if (c.name == add->center.name)
                throw ModelError("center '" + c.name + "' already exists");
        modified.centers.push_back(add->center);
        std::sort(modified.centers.begin(), modified.centers.end(),
                  [](const ServiceCenter& x, const ServiceCenter& y) {
                      return x.name < y.name;
                  });
    } else if (const auto* remove = std::get_if<RemoveCenter>(&change)) {
        ServiceCenter& target = find(remove->center); // throws if unknown
        (void)target;
        std::erase_if(modified.centers,
                      [&](const ServiceCenter& c) { return c.name == remove->center; });
        if (modified.centers.empty())
            throw ModelError("cannot remove the only service center");
    }
    return modified;
}

SystemMetrics what_if(const QueueingNetwork& net, const Change& change, const Workload& w) {
    return solve(apply_change(net, change), w);
}

} // namespace spe
