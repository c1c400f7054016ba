#include "support/generators.hpp"

#include <algorithm>
#include <string>

namespace spe::test {

namespace {

std::int64_t pick(Xoshiro256pp& rng, std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(rng.next() %
                                          static_cast<std::uint64_t>(hi - lo + 1));
}

double uniform(Xoshiro256pp& rng, double lo, double hi) {
    return lo + (hi - lo) * rng.uniform01();
}

/// k positive probabilities summing to 1 up to rounding.
std::vector<double> random_probabilities(Xoshiro256pp& rng, int k) {
    std::vector<double> p(static_cast<std::size_t>(k));
    double total = 0.0;
    for (auto& x : p) {
        x = uniform(rng, 0.05, 1.0);
        total += x;
    }
    for (auto& x : p) x /= total;
    return p;
}

struct GraphGen {
    Xoshiro256pp& rng;
    const GraphGenOptions& options;
    PerformanceAnnotation ann;
    int counter = 0;

    std::string fresh_name() { return "node_" + std::to_string(counter++); }

    ExecNode basic() {
        const std::string name = fresh_name();
        const double t = rng.uniform01() < options.zero_time_share
                             ? 0.0
                             : uniform(rng, 0.5, 100.0);
        ann.node_times[name] = t;
        if (rng.uniform01() < 0.4) {
            auto& requests = ann.resource_requests[name];
            requests["res_a"] = uniform(rng, 0.0, 3.0);
            if (rng.uniform01() < 0.5) requests["res_b"] = uniform(rng, 0.0, 2.0);
        }
        return {BasicNode{name}};
    }

    std::vector<ExecNode> sequence(int depth) {
        const std::int64_t n = pick(rng, 1, options.max_sequence);
        std::vector<ExecNode> out;
        for (std::int64_t i = 0; i < n; ++i) out.push_back(node(depth));
        return out;
    }

    ExecNode node(int depth) {
        if (depth >= options.max_depth) return basic();
        const double roll = rng.uniform01();
        if (roll < 0.45) return basic();
        if (roll < 0.6) {
            return {RepetitionNode{pick(rng, 0, 3), sequence(depth + 1)}};
        }
        if (roll < 0.78) {
            CaseNode cs;
            const int k = static_cast<int>(pick(rng, 2, 3));
            const auto probs = random_probabilities(rng, k);
            for (int i = 0; i < k; ++i) cs.branches.push_back({probs[i], sequence(depth + 1)});
            return {std::move(cs)};
        }
        if (roll < 0.9) {
            if (!options.allow_pardo) return basic();
            PardoNode par;
            const int k = static_cast<int>(pick(rng, 2, 3));
            for (int i = 0; i < k; ++i) par.branches.push_back(sequence(depth + 1));
            return {std::move(par)};
        }
        if (options.allow_split && roll < 0.96)
            return {SplitNode{{sequence(depth + 1)}}};
        if (options.allow_expanded) {
            ExpandedNode ex;
            ex.name = fresh_name();
            ex.sub.name = ex.name;
            ex.sub.body = sequence(depth + 1);
            return {std::move(ex)};
        }
        return basic();
    }
};

struct ScenarioGen {
    Xoshiro256pp& rng;
    std::vector<std::string> participants;
    int counter = 0;

    std::string fresh_action() { return "act_" + std::to_string(counter++); }

    const std::string& someone() {
        return participants[static_cast<std::size_t>(
            pick(rng, 0, static_cast<std::int64_t>(participants.size()) - 1))];
    }

    std::vector<Step> steps(int depth, std::int64_t count) {
        std::vector<Step> out;
        for (std::int64_t i = 0; i < count; ++i) out.push_back(step(depth));
        return out;
    }

    Step step(int depth) {
        const double roll = rng.uniform01();
        if (depth >= 2 || roll < 0.55) {
            if (roll < 0.15) {
                SelfCallStep self;
                self.on = someone();
                self.action = fresh_action();
                self.repetitions = pick(rng, 0, 4);
                return {self};
            }
            MessageStep msg;
            msg.from = someone();
            do {
                msg.to = someone();
            } while (participants.size() > 1 && msg.to == msg.from);
            msg.kind = rng.uniform01() < 0.2 ? MessageKind::async : MessageKind::sync;
            msg.action = fresh_action();
            return {msg};
        }
        if (roll < 0.75) return {LoopStep{pick(rng, 0, 3), steps(depth + 1, pick(rng, 1, 3))}};
        if (roll < 0.9) {
            AltStep alt;
            const int k = static_cast<int>(pick(rng, 2, 3));
            const auto probs = random_probabilities(rng, k);
            for (int i = 0; i < k; ++i)
                alt.branches.push_back({probs[i], steps(depth + 1, pick(rng, 1, 2))});
            return {alt};
        }
        ParStep par;
        const int k = static_cast<int>(pick(rng, 2, 3));
        for (int i = 0; i < k; ++i) par.branches.push_back(steps(depth + 1, pick(rng, 1, 2)));
        return {par};
    }
};

} // namespace

GeneratedGraph random_graph(Xoshiro256pp& rng, const GraphGenOptions& options) {
    GraphGen gen{rng, options, {}, 0};
    GeneratedGraph out;
    out.graph.name = "generated";
    out.graph.body = gen.sequence(0);
    out.annotation = std::move(gen.ann);
    return out;
}

QueueingNetwork random_network(Xoshiro256pp& rng, int max_centers, double demand_cap,
                               bool allow_delay) {
    QueueingNetwork net;
    const std::int64_t n = pick(rng, 1, max_centers);
    for (std::int64_t i = 0; i < n; ++i) {
        ServiceCenter c;
        c.name = "center_" + std::to_string(i);
        const bool delay = allow_delay && rng.uniform01() < 0.25;
        c.kind = delay ? CenterKind::delay : CenterKind::queueing;
        c.scheduling = delay ? SchedulingPolicy::delay
                             : (rng.uniform01() < 0.5 ? SchedulingPolicy::ps
                                                      : SchedulingPolicy::fcfs);
        c.demand = uniform(rng, 0.05, demand_cap);
        net.centers.push_back(std::move(c));
    }
    return net;
}

SequenceScenario random_scenario(Xoshiro256pp& rng) {
    SequenceScenario s;
    s.name = "scenario_gen";
    const std::int64_t k = pick(rng, 2, 5);
    for (std::int64_t i = 0; i < k; ++i) s.participants.push_back("P" + std::to_string(i));
    ScenarioGen gen{rng, s.participants, 0};
    s.body = gen.steps(0, pick(rng, 2, 6));
    return s;
}

DesignModel random_model(Xoshiro256pp& rng) {
    DesignModel m;

    const std::int64_t scenario_count = pick(rng, 1, 3);
    for (std::int64_t i = 0; i < scenario_count; ++i) {
        auto s = random_scenario(rng);
        s.name = "scn_" + std::to_string(i);
        m.scenarios.emplace(s.name, std::move(s));
    }
    // Cross-references between scenarios, acyclic by construction (later
    // scenarios reference earlier ones only).
    if (scenario_count > 1 && rng.uniform01() < 0.7)
        m.scenarios.at("scn_1").body.push_back({RefStep{"scn_0"}});

    if (rng.uniform01() < 0.7) {
        ActivityModel a;
        a.name = "activity_gen";
        const std::int64_t n = pick(rng, 2, 5);
        for (std::int64_t i = 0; i < n; ++i) a.actions.push_back("a" + std::to_string(i));
        a.initial = "start";
        a.finals = {"finish"};
        a.edges.emplace_back("start", a.actions.front());
        for (std::int64_t i = 0; i + 1 < n; ++i)
            a.edges.emplace_back(a.actions[static_cast<std::size_t>(i)],
                                 a.actions[static_cast<std::size_t>(i + 1)]);
        a.edges.emplace_back(a.actions.back(), "finish");
        if (rng.uniform01() < 0.5) {
            Decision d;
            d.at = a.actions.back();
            d.outcomes.push_back({0.25, a.actions.back(), pick(rng, 1, 3)});
            d.outcomes.push_back({0.75, "finish", std::nullopt});
            a.decisions.push_back(std::move(d));
        }
        std::sort(a.actions.begin(), a.actions.end());
        std::sort(a.edges.begin(), a.edges.end());
        m.activities.emplace(a.name, std::move(a));
    }

    if (rng.uniform01() < 0.7) {
        StateChartModel sc;
        sc.name = "chart_gen";
        sc.states = {"running", "ready", "stopped"};
        sc.initial = "ready";
        sc.finals = {"stopped"};
        sc.transitions.push_back({"ready", "running", std::string("go"), std::nullopt});
        sc.transitions.push_back({"running", "stopped", std::nullopt, std::nullopt});
        if (rng.uniform01() < 0.5) {
            CompositeState c;
            c.state = "running";
            c.mode = CompositeMode::concurrent;
            c.regions = {{"r0a", "r0b"}, {"r1a"}};
            sc.composites.push_back(std::move(c));
        }
        std::sort(sc.states.begin(), sc.states.end());
        std::sort(sc.transitions.begin(), sc.transitions.end(),
                  [](const Transition& x, const Transition& y) {
                      return std::tie(x.from, x.to) < std::tie(y.from, y.to);
                  });
        m.statecharts.emplace(sc.name, std::move(sc));
    }

    if (rng.uniform01() < 0.7) {
        DeploymentModel dep;
        ProcNode node;
        node.name = "host0";
        node.devices.push_back({"dev_cpu", DeviceKind::cpu, SchedulingPolicy::ps,
                                uniform(rng, 0.5, 2.0)});
        node.devices.push_back({"dev_disk", DeviceKind::disk, SchedulingPolicy::fcfs, 1.0});
        std::sort(node.devices.begin(), node.devices.end(),
                  [](const Device& x, const Device& y) { return x.name < y.name; });
        dep.nodes.push_back(std::move(node));
        dep.allocation["P0"] = "host0";
        m.deployment = std::move(dep);
    }

    const std::int64_t time_count = pick(rng, 0, 5);
    for (std::int64_t i = 0; i < time_count; ++i)
        m.annotations.node_times["act_" + std::to_string(i)] = uniform(rng, 0.0, 200.0);
    if (rng.uniform01() < 0.5)
        m.annotations.resource_requests["act_0"]["res_a"] = uniform(rng, 0.0, 4.0);

    if (rng.uniform01() < 0.6) {
        OverheadMatrix ov;
        ov.software_resources = {"res_a", "res_b"};
        ov.devices = {"dev_cpu", "dev_disk"};
        ov.per_request = {{uniform(rng, 0.0, 10.0), uniform(rng, 0.0, 2.0)},
                          {uniform(rng, 0.0, 5.0), uniform(rng, 0.0, 1.0)}};
        m.overhead = std::move(ov);
    }
    return m;
}

} // namespace spe::test
