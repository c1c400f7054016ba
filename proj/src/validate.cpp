#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <string>

#include "spe/model.hpp"
#include "spe/report.hpp"

namespace spe {

namespace {

constexpr double kProbTolerance = 1e-9;

struct Checker {
    std::vector<Diagnostic> diags;

    void error(const std::string& location, const std::string& message) {
        diags.push_back({Severity::error, location, message});
    }
};

void check_steps(Checker& ck, const DesignModel& m, const std::string& where,
                 const std::set<std::string>& participants,
                 const std::vector<Step>& steps) {
    for (const auto& step : steps) {
        if (const auto* msg = std::get_if<MessageStep>(&step.node)) {
            if (!participants.count(msg->from))
                ck.error(where, "message references undeclared participant '" + msg->from + "'");
            if (!participants.count(msg->to))
                ck.error(where, "message references undeclared participant '" + msg->to + "'");
        } else if (const auto* self = std::get_if<SelfCallStep>(&step.node)) {
            if (!participants.count(self->on))
                ck.error(where, "self-call references undeclared participant '" + self->on + "'");
            if (self->repetitions < 0)
                ck.error(where, "self-call repetition count is negative");
        } else if (const auto* loop = std::get_if<LoopStep>(&step.node)) {
            if (loop->count < 0) ck.error(where, "loop count is negative");
            check_steps(ck, m, where, participants, loop->body);
        } else if (const auto* alt = std::get_if<AltStep>(&step.node)) {
            if (alt->branches.empty()) {
                ck.error(where, "alt has no branches");
            } else {
                double sum = 0.0;
                for (const auto& b : alt->branches) {
                    if (b.probability < 0.0 || b.probability > 1.0)
                        ck.error(where, "branch probability " + format_number(b.probability) +
                                            " outside [0, 1]");
                    sum += b.probability;
                    check_steps(ck, m, where, participants, b.body);
                }
                if (std::abs(sum - 1.0) > kProbTolerance)
                    ck.error(where, "branch probabilities sum to " + format_number(sum));
            }
        } else if (const auto* par = std::get_if<ParStep>(&step.node)) {
            if (par->branches.empty()) ck.error(where, "par has no branches");
            for (const auto& b : par->branches) check_steps(ck, m, where, participants, b);
        } else if (const auto* ref = std::get_if<RefStep>(&step.node)) {
            if (!m.scenarios.count(ref->scenario))
                ck.error(where, "ref targets unknown scenario '" + ref->scenario + "'");
        }
    }
}

void collect_refs(const std::vector<Step>& steps, std::set<std::string>& out) {
    for (const auto& step : steps) {
        if (const auto* loop = std::get_if<LoopStep>(&step.node)) {
            collect_refs(loop->body, out);
        } else if (const auto* alt = std::get_if<AltStep>(&step.node)) {
            for (const auto& b : alt->branches) collect_refs(b.body, out);
        } else if (const auto* par = std::get_if<ParStep>(&step.node)) {
            for (const auto& b : par->branches) collect_refs(b, out);
        } else if (const auto* ref = std::get_if<RefStep>(&step.node)) {
            out.insert(ref->scenario);
        }
    }
}

void check_scenario(Checker& ck, const DesignModel& m, const SequenceScenario& s) {
    const std::string where = "scenario " + s.name;
    std::set<std::string> participants;
    for (const auto& p : s.participants)
        if (!participants.insert(p).second)
            ck.error(where, "duplicate participant '" + p + "'");
    if (s.participants.empty()) ck.error(where, "scenario has no participants");
    if (s.body.empty()) ck.error(where, "scenario body is empty");
    check_steps(ck, m, where, participants, s.body);
}

void check_ref_cycles(Checker& ck, const DesignModel& m) {
    // Color-marking DFS over the scenario reference relation.
    std::map<std::string, int> color; // 0 new, 1 active, 2 done
    std::function<bool(const std::string&)> visit = [&](const std::string& name) {
        auto it = m.scenarios.find(name);
        if (it == m.scenarios.end()) return false;
        int& c = color[name];
        if (c == 1) return true;
        if (c == 2) return false;
        c = 1;
        std::set<std::string> refs;
        collect_refs(it->second.body, refs);
        for (const auto& r : refs)
            if (visit(r)) {
                c = 2;
                return true;
            }
        c = 2;
        return false;
    };
    for (const auto& [name, s] : m.scenarios) {
        if (color[name] == 0 && visit(name))
            ck.error("scenario " + name, "cyclic scenario reference involving '" + name + "'");
    }
}

void check_activity(Checker& ck, const ActivityModel& a) {
    const std::string where = "activity " + a.name;
    std::set<std::string> nodes;
    for (const auto& n : a.actions)
        if (!nodes.insert(n).second) ck.error(where, "duplicate action '" + n + "'");
    if (a.initial.empty()) {
        ck.error(where, "activity has no initial node");
    } else if (!nodes.insert(a.initial).second) {
        ck.error(where, "initial node '" + a.initial + "' also declared as action");
    }
    if (a.finals.empty()) ck.error(where, "activity has no final node");
    for (const auto& f : a.finals)
        if (!nodes.insert(f).second)
            ck.error(where, "final node '" + f + "' duplicated or declared as action");

    for (const auto& [from, to] : a.edges) {
        if (!nodes.count(from)) ck.error(where, "edge from undeclared node '" + from + "'");
        if (!nodes.count(to)) ck.error(where, "edge to undeclared node '" + to + "'");
    }

    std::set<std::string> forks, joins;
    for (const auto& fj : a.fork_joins) {
        if (!nodes.count(fj.fork)) ck.error(where, "fork references undeclared node '" + fj.fork + "'");
        if (fj.join.empty()) {
            ck.error(where, "fork '" + fj.fork + "' has no matching join");
        } else if (!nodes.count(fj.join)) {
            ck.error(where, "join references undeclared node '" + fj.join + "'");
        }
        forks.insert(fj.fork);
        if (!fj.join.empty()) joins.insert(fj.join);
    }

    std::set<std::string> decided;
    for (const auto& d : a.decisions) {
        if (!nodes.count(d.at)) ck.error(where, "decision at undeclared node '" + d.at + "'");
        if (!decided.insert(d.at).second)
            ck.error(where, "multiple decisions at node '" + d.at + "'");
        double sum = 0.0;
        for (const auto& o : d.outcomes) {
            sum += o.probability;
            if (!nodes.count(o.target))
                ck.error(where, "decision outcome targets undeclared node '" + o.target + "'");
            if (o.repetitions && *o.repetitions < 0)
                ck.error(where, "decision repetition count is negative");
        }
        if (std::abs(sum - 1.0) > kProbTolerance)
            ck.error(where, "decision probabilities at '" + d.at + "' sum to " +
                                format_number(sum));
    }

    // A node that branches without a decision is a fork; it needs a declared join.
    std::map<std::string, int> out_degree;
    for (const auto& [from, to] : a.edges) ++out_degree[from];
    for (const auto& [node, degree] : out_degree) {
        if (degree > 1 && !decided.count(node) && !forks.count(node))
            ck.error(where, "fork '" + node + "' has no matching join");
    }
}

void check_statechart(Checker& ck, const StateChartModel& sc) {
    const std::string where = "statechart " + sc.name;
    std::set<std::string> states;
    for (const auto& s : sc.states)
        if (!states.insert(s).second) ck.error(where, "duplicate state '" + s + "'");
    if (sc.initial.empty()) {
        ck.error(where, "statechart has no initial state");
    } else if (!states.count(sc.initial)) {
        ck.error(where, "initial state '" + sc.initial + "' is not declared");
    }
    if (sc.finals.empty()) ck.error(where, "statechart has no final state");
    for (const auto& f : sc.finals)
        if (!states.count(f)) ck.error(where, "final state '" + f + "' is not declared");
    for (const auto& t : sc.transitions) {
        if (!states.count(t.from))
            ck.error(where, "transition from undeclared state '" + t.from + "'");
        if (!states.count(t.to))
            ck.error(where, "transition to undeclared state '" + t.to + "'");
    }
    for (const auto& c : sc.composites) {
        if (!states.count(c.state))
            ck.error(where, "composite references undeclared state '" + c.state + "'");
        if (c.mode == CompositeMode::concurrent && c.regions.size() < 2)
            ck.error(where, "concurrent composite '" + c.state + "' has fewer than 2 regions");
        for (const auto& region : c.regions)
            if (region.empty()) ck.error(where, "composite '" + c.state + "' has an empty region");
    }
}

void check_deployment(Checker& ck, const DeploymentModel& dep) {
    const std::string where = "deployment";
    std::set<std::string> node_names;
    for (const auto& node : dep.nodes) {
        if (!node_names.insert(node.name).second)
            ck.error(where, "duplicate node '" + node.name + "'");
        std::set<std::string> device_names;
        for (const auto& dev : node.devices) {
            if (!device_names.insert(dev.name).second)
                ck.error(where, "duplicate device '" + dev.name + "' on node '" + node.name + "'");
            if (!(dev.speed_factor > 0.0))
                ck.error(where, "device '" + dev.name + "' has non-positive speed factor");
            if (dev.kind == DeviceKind::delay && dev.scheduling != SchedulingPolicy::delay)
                ck.error(where, "delay device '" + dev.name + "' must use delay scheduling");
        }
    }
    for (const auto& [component, node] : dep.allocation)
        if (!node_names.count(node))
            ck.error(where, "component '" + component + "' allocated to undeclared node '" +
                                node + "'");
}

void check_annotations(Checker& ck, const PerformanceAnnotation& ann) {
    const std::string where = "annotations";
    for (const auto& [action, t] : ann.node_times)
        if (t < 0.0) ck.error(where, "negative time for action '" + action + "'");
    for (const auto& [action, requests] : ann.resource_requests)
        for (const auto& [resource, count] : requests)
            if (count < 0.0)
                ck.error(where, "negative request count for '" + action + "." + resource + "'");
}

void check_overhead(Checker& ck, const OverheadMatrix& ov) {
    const std::string where = "overhead";
    if (ov.per_request.size() != ov.software_resources.size()) {
        ck.error(where, "overhead matrix row count does not match resource list");
        return;
    }
    for (std::size_t k = 0; k < ov.per_request.size(); ++k) {
        if (ov.per_request[k].size() != ov.devices.size()) {
            ck.error(where, "overhead row for '" + ov.software_resources[k] +
                                "' does not match device list");
            continue;
        }
        for (double entry : ov.per_request[k])
            if (entry < 0.0)
                ck.error(where, "negative overhead entry for '" + ov.software_resources[k] + "'");
    }
}

} // namespace

std::vector<Diagnostic> validate_model(const DesignModel& m) {
    Checker ck;
    for (const auto& [name, s] : m.scenarios) check_scenario(ck, m, s);
    check_ref_cycles(ck, m);
    for (const auto& [name, a] : m.activities) check_activity(ck, a);
    for (const auto& [name, sc] : m.statecharts) check_statechart(ck, sc);
    if (m.deployment) check_deployment(ck, *m.deployment);
    check_annotations(ck, m.annotations);
    if (m.overhead) check_overhead(ck, *m.overhead);
    return ck.diags;
}

std::string format_diagnostics(const std::vector<Diagnostic>& diags) {
    std::string out;
    for (const auto& d : diags) {
        out += d.severity == Severity::error ? "error: " : "warning: ";
        out += d.location;
        out += ": ";
        out += d.message;
        out += '\n';
    }
    return out;
}

} // namespace spe
