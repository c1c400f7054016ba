#include <string>

#include "spe/execgraph.hpp"
#include "spe/parse.hpp"
#include "spe/report.hpp"

namespace spe {

namespace {

struct Writer {
    std::string out;
    int depth = 0;

    void line(const std::string& s) {
        out.append(static_cast<std::size_t>(depth) * 2, ' ');
        out += s;
        out += '\n';
    }

    void open(const std::string& s) {
        line(s + " {");
        ++depth;
    }

    void close() {
        --depth;
        line("}");
    }
};

std::string join(const std::vector<std::string>& names) {
    std::string s;
    for (const auto& n : names) {
        if (!s.empty()) s += ' ';
        s += n;
    }
    return s;
}

void write_steps(Writer& w, const std::vector<Step>& steps);

void write_step(Writer& w, const Step& step) {
    if (const auto* msg = std::get_if<MessageStep>(&step.node)) {
        w.line(std::string(msg->kind == MessageKind::sync ? "sync " : "async ") +
               msg->from + " -> " + msg->to + " " + msg->action);
    } else if (const auto* self = std::get_if<SelfCallStep>(&step.node)) {
        w.line("self " + self->on + " " + self->action + " repeat " +
               std::to_string(self->repetitions));
    } else if (const auto* loop = std::get_if<LoopStep>(&step.node)) {
        w.open("loop " + std::to_string(loop->count));
        write_steps(w, loop->body);
        w.close();
    } else if (const auto* alt = std::get_if<AltStep>(&step.node)) {
        w.open("alt");
        for (const auto& b : alt->branches) {
            w.open("branch " + format_number(b.probability));
            write_steps(w, b.body);
            w.close();
        }
        w.close();
    } else if (const auto* par = std::get_if<ParStep>(&step.node)) {
        w.open("par");
        for (const auto& b : par->branches) {
            w.open("branch");
            write_steps(w, b);
            w.close();
        }
        w.close();
    } else if (const auto* ref = std::get_if<RefStep>(&step.node)) {
        w.line("ref " + ref->scenario);
    }
}

void write_steps(Writer& w, const std::vector<Step>& steps) {
    for (const auto& s : steps) write_step(w, s);
}

void write_activity(Writer& w, const ActivityModel& a) {
    w.open("activity " + a.name);
    w.line("actions: " + join(a.actions));
    if (!a.initial.empty()) w.line("initial: " + a.initial);
    w.line("final: " + join(a.finals));
    for (const auto& [from, to] : a.edges) w.line("edge " + from + " -> " + to);
    for (const auto& d : a.decisions) {
        w.open("decision at " + d.at);
        for (const auto& o : d.outcomes) {
            std::string s = "outcome " + format_number(o.probability) + " -> " + o.target;
            if (o.repetitions) s += " repeat " + std::to_string(*o.repetitions);
            w.line(s);
        }
        w.close();
    }
    for (const auto& fj : a.fork_joins) w.line("fork " + fj.fork + " join " + fj.join);
    w.close();
}

void write_statechart(Writer& w, const StateChartModel& sc) {
    w.open("statechart " + sc.name);
    w.line("states: " + join(sc.states));
    if (!sc.initial.empty()) w.line("initial: " + sc.initial);
    w.line("final: " + join(sc.finals));
    for (const auto& t : sc.transitions) {
        std::string s = "transition " + t.from + " -> " + t.to;
        if (t.event) s += " on " + *t.event;
        if (t.probability) s += " prob " + format_number(*t.probability);
        w.line(s);
    }
    for (const auto& c : sc.composites) {
        w.open("composite " + c.state +
               (c.mode == CompositeMode::concurrent ? " concurrent" : " sequential"));
        for (const auto& region : c.regions) w.line("region: " + join(region));
        w.close();
    }
    w.close();
}

const char* device_kind_name(DeviceKind k) {
    switch (k) {
        case DeviceKind::cpu: return "cpu";
        case DeviceKind::disk: return "disk";
        case DeviceKind::network: return "network";
        case DeviceKind::delay: return "delay";
    }
    return "cpu";
}

const char* scheduling_name(SchedulingPolicy p) {
    switch (p) {
        case SchedulingPolicy::fcfs: return "fcfs";
        case SchedulingPolicy::ps: return "ps";
        case SchedulingPolicy::delay: return "delay";
    }
    return "fcfs";
}

void write_deployment(Writer& w, const DeploymentModel& dep) {
    w.open("deployment");
    for (const auto& node : dep.nodes) {
        w.open("node " + node.name);
        for (const auto& dev : node.devices)
            w.line("device " + dev.name + " " + device_kind_name(dev.kind) + " " +
                   scheduling_name(dev.scheduling) + " speed " +
                   format_number(dev.speed_factor));
        w.close();
    }
    for (const auto& [component, node] : dep.allocation)
        w.line("allocate " + component + " -> " + node);
    w.close();
}

void write_annotations(Writer& w, const PerformanceAnnotation& ann) {
    w.open("annotations");
    for (const auto& [action, t] : ann.node_times)
        w.line("time " + action + " " + format_number(t));
    for (const auto& [action, requests] : ann.resource_requests)
        for (const auto& [resource, count] : requests)
            w.line("request " + action + " " + resource + " " + format_number(count));
    w.close();
}

void write_overhead(Writer& w, const OverheadMatrix& ov) {
    w.open("overhead");
    w.line("resources: " + join(ov.software_resources));
    w.line("devices: " + join(ov.devices));
    for (std::size_t k = 0; k < ov.software_resources.size(); ++k) {
        std::string s = "row " + ov.software_resources[k];
        for (double entry : ov.per_request[k]) s += " " + format_number(entry);
        w.line(s);
    }
    w.close();
}

void write_graph_nodes(Writer& w, const std::vector<ExecNode>& nodes);

void write_graph_node(Writer& w, const ExecNode& n) {
    if (const auto* basic = std::get_if<BasicNode>(&n.node)) {
        w.line("basic " + basic->name);
    } else if (const auto* ex = std::get_if<ExpandedNode>(&n.node)) {
        w.open("expanded " + ex->name);
        write_graph_nodes(w, ex->sub.body);
        w.close();
    } else if (const auto* rep = std::get_if<RepetitionNode>(&n.node)) {
        w.open("repeat " + std::to_string(rep->count));
        write_graph_nodes(w, rep->body);
        w.close();
    } else if (const auto* cs = std::get_if<CaseNode>(&n.node)) {
        w.open("case");
        for (const auto& b : cs->branches) {
            w.open("branch " + format_number(b.probability));
            write_graph_nodes(w, b.body);
            w.close();
        }
        w.close();
    } else if (const auto* par = std::get_if<PardoNode>(&n.node)) {
        w.open("pardo");
        for (const auto& b : par->branches) {
            w.open("branch");
            write_graph_nodes(w, b);
            w.close();
        }
        w.close();
    } else if (const auto* split = std::get_if<SplitNode>(&n.node)) {
        w.open("split");
        for (const auto& b : split->spawned) {
            w.open("branch");
            write_graph_nodes(w, b);
            w.close();
        }
        w.close();
    }
}

void write_graph_nodes(Writer& w, const std::vector<ExecNode>& nodes) {
    for (const auto& n : nodes) write_graph_node(w, n);
}

} // namespace

std::string serialize_model(const DesignModel& m) {
    Writer w;
    for (const auto& [name, a] : m.activities) write_activity(w, a);
    if (!m.annotations.empty()) write_annotations(w, m.annotations);
    if (m.deployment) write_deployment(w, *m.deployment);
    if (m.overhead) write_overhead(w, *m.overhead);
    for (const auto& [name, s] : m.scenarios) {
        w.open("scenario " + s.name);
        w.line("participants: " + join(s.participants));
        write_steps(w, s.body);
        w.close();
    }
    for (const auto& [name, sc] : m.statecharts) write_statechart(w, sc);
    return w.out;
}

std::string serialize_graph(const ExecutionGraph& g) {
    Writer w;
    w.open("graph " + g.name);
    write_graph_nodes(w, g.body);
    w.close();
    return w.out;
}

std::string serialize_objectives(const std::vector<Objective>& objectives) {
    Writer w;
    w.open("objectives");
    for (const auto& o : objectives)
        w.line(std::string(metric_name(o.metric)) + " <= " + format_number(o.threshold));
    w.close();
    return w.out;
}

} // namespace spe
