#include "spe/parse.hpp"

#include <algorithm>
#include <set>

#include "lexer.hpp"
#include "spe/execgraph.hpp"

namespace spe {

using detail::Lexer;
using detail::TokKind;
using detail::Token;

namespace {

std::vector<std::string> parse_name_list(Lexer& lex) {
    std::vector<std::string> names;
    while (lex.at_name()) names.push_back(lex.take().text);
    return names;
}

// Alt branches and decision outcomes: probabilities are mandatory unless the
// caller asked for uniform fill, and then they must be omitted consistently.
void fill_uniform(Lexer& lex, const Token& at, const ParseOptions& opts,
                  std::vector<double*> probs, int omitted) {
    if (omitted == 0) return;
    if (!opts.uniform_probs)
        lex.fail(at, "branch probability required (no silent default; "
                     "use the uniform-probabilities option to fill 1/k)");
    if (omitted != static_cast<int>(probs.size()))
        lex.fail(at, "branch probabilities must be given for all branches or none");
    const double p = 1.0 / static_cast<double>(probs.size());
    for (double* slot : probs) *slot = p;
}

std::vector<Step> parse_steps(Lexer& lex, const ParseOptions& opts);

Step parse_step(Lexer& lex, const ParseOptions& opts) {
    Step step;
    const Token at = lex.peek();
    if (lex.accept_keyword("sync") || lex.at_keyword("async")) {
        const bool is_async = lex.accept_keyword("async");
        MessageStep msg;
        msg.kind = is_async ? MessageKind::async : MessageKind::sync;
        msg.from = lex.expect_name("sender participant");
        lex.expect_punct("->");
        msg.to = lex.expect_name("receiver participant");
        msg.action = lex.expect_name("action name");
        step.node = msg;
    } else if (lex.accept_keyword("self")) {
        SelfCallStep self;
        self.on = lex.expect_name("participant");
        self.action = lex.expect_name("action name");
        self.repetitions = lex.accept_keyword("repeat")
                               ? lex.expect_integer("repetition count")
                               : 1;
        step.node = self;
    } else if (lex.accept_keyword("loop")) {
        LoopStep loop;
        loop.count = lex.expect_integer("loop count");
        lex.expect_punct("{");
        loop.body = parse_steps(lex, opts);
        lex.expect_punct("}");
        step.node = loop;
    } else if (lex.accept_keyword("alt")) {
        AltStep alt;
        lex.expect_punct("{");
        std::vector<double*> probs;
        int omitted = 0;
        while (lex.accept_keyword("branch")) {
            AltBranch branch;
            if (lex.at_number()) {
                branch.probability = lex.expect_number("branch probability");
            } else {
                ++omitted;
            }
            lex.expect_punct("{");
            branch.body = parse_steps(lex, opts);
            lex.expect_punct("}");
            alt.branches.push_back(std::move(branch));
        }
        lex.expect_punct("}");
        if (alt.branches.empty()) lex.fail(at, "alt has no branches");
        for (auto& b : alt.branches) probs.push_back(&b.probability);
        fill_uniform(lex, at, opts, probs, omitted);
        step.node = alt;
    } else if (lex.accept_keyword("par")) {
        ParStep par;
        lex.expect_punct("{");
        while (lex.accept_keyword("branch")) {
            lex.expect_punct("{");
            par.branches.push_back(parse_steps(lex, opts));
            lex.expect_punct("}");
        }
        lex.expect_punct("}");
        if (par.branches.empty()) lex.fail(at, "par has no branches");
        step.node = par;
    } else if (lex.accept_keyword("ref")) {
        step.node = RefStep{lex.expect_name("scenario name")};
    } else {
        lex.fail(at, "expected a step (sync, async, self, loop, alt, par or ref)");
    }
    return step;
}

std::vector<Step> parse_steps(Lexer& lex, const ParseOptions& opts) {
    std::vector<Step> steps;
    while (!lex.at_punct("}") && lex.peek().kind != TokKind::end)
        steps.push_back(parse_step(lex, opts));
    return steps;
}

SequenceScenario parse_scenario(Lexer& lex, const ParseOptions& opts) {
    SequenceScenario s;
    s.name = lex.expect_name("scenario name");
    lex.expect_punct("{");
    const Token at = lex.peek();
    lex.expect_keyword("participants");
    lex.expect_punct(":");
    s.participants = parse_name_list(lex);
    if (s.participants.empty()) lex.fail(at, "scenario has no participants");
    s.body = parse_steps(lex, opts);
    lex.expect_punct("}");
    return s;
}

ActivityModel parse_activity(Lexer& lex, const ParseOptions& opts) {
    ActivityModel a;
    a.name = lex.expect_name("activity name");
    lex.expect_punct("{");
    bool saw_initial = false;
    while (!lex.at_punct("}")) {
        const Token at = lex.peek();
        if (lex.accept_keyword("actions")) {
            lex.expect_punct(":");
            a.actions = parse_name_list(lex);
        } else if (lex.accept_keyword("initial")) {
            lex.expect_punct(":");
            if (saw_initial) lex.fail(at, "duplicate initial node");
            a.initial = lex.expect_name("initial node");
            saw_initial = true;
        } else if (lex.accept_keyword("final")) {
            lex.expect_punct(":");
            a.finals = parse_name_list(lex);
        } else if (lex.accept_keyword("edge")) {
            std::string from = lex.expect_name("edge source");
            lex.expect_punct("->");
            std::string to = lex.expect_name("edge target");
            a.edges.emplace_back(std::move(from), std::move(to));
        } else if (lex.accept_keyword("decision")) {
            lex.expect_keyword("at");
            Decision d;
            d.at = lex.expect_name("decision node");
            lex.expect_punct("{");
            std::vector<double*> probs;
            int omitted = 0;
            while (lex.accept_keyword("outcome")) {
                DecisionOutcome o;
                if (lex.at_number()) {
                    o.probability = lex.expect_number("outcome probability");
                } else {
                    ++omitted;
                }
                lex.expect_punct("->");
                o.target = lex.expect_name("outcome target");
                if (lex.accept_keyword("repeat"))
                    o.repetitions = lex.expect_integer("repetition count");
                d.outcomes.push_back(std::move(o));
            }
            lex.expect_punct("}");
            if (d.outcomes.empty()) lex.fail(at, "decision has no outcomes");
            for (auto& o : d.outcomes) probs.push_back(&o.probability);
            fill_uniform(lex, at, opts, probs, omitted);
            a.decisions.push_back(std::move(d));
        } else if (lex.accept_keyword("fork")) {
            ForkJoin fj;
            fj.fork = lex.expect_name("fork node");
            lex.expect_keyword("join");
            fj.join = lex.expect_name("join node");
            a.fork_joins.push_back(std::move(fj));
        } else {
            lex.fail(at, "expected actions, initial, final, edge, decision or fork");
        }
    }
    lex.expect_punct("}");
    std::sort(a.actions.begin(), a.actions.end());
    std::sort(a.finals.begin(), a.finals.end());
    std::sort(a.edges.begin(), a.edges.end());
    std::sort(a.decisions.begin(), a.decisions.end(),
              [](const Decision& x, const Decision& y) { return x.at < y.at; });
    std::sort(a.fork_joins.begin(), a.fork_joins.end(),
              [](const ForkJoin& x, const ForkJoin& y) { return x.fork < y.fork; });
    return a;
}

StateChartModel parse_statechart(Lexer& lex) {
    StateChartModel sc;
    sc.name = lex.expect_name("statechart name");
    lex.expect_punct("{");
    bool saw_initial = false;
    while (!lex.at_punct("}")) {
        const Token at = lex.peek();
        if (lex.accept_keyword("states")) {
            lex.expect_punct(":");
            sc.states = parse_name_list(lex);
        } else if (lex.accept_keyword("initial")) {
            lex.expect_punct(":");
            if (saw_initial) lex.fail(at, "duplicate initial state");
            sc.initial = lex.expect_name("initial state");
            saw_initial = true;
        } else if (lex.accept_keyword("final")) {
            lex.expect_punct(":");
            sc.finals = parse_name_list(lex);
        } else if (lex.accept_keyword("transition")) {
            Transition t;
            t.from = lex.expect_name("transition source");
            lex.expect_punct("->");
            t.to = lex.expect_name("transition target");
            if (lex.accept_keyword("on")) t.event = lex.expect_name("event name");
            if (lex.accept_keyword("prob"))
                t.probability = lex.expect_number("transition probability");
            sc.transitions.push_back(std::move(t));
        } else if (lex.accept_keyword("composite")) {
            CompositeState c;
            c.state = lex.expect_name("composite state");
            if (lex.accept_keyword("concurrent")) {
                c.mode = CompositeMode::concurrent;
            } else {
                lex.expect_keyword("sequential");
                c.mode = CompositeMode::sequential;
            }
            lex.expect_punct("{");
            while (lex.accept_keyword("region")) {
                lex.expect_punct(":");
                auto region = parse_name_list(lex);
                if (region.empty()) lex.fail(at, "empty region in composite state");
                c.regions.push_back(std::move(region));
            }
            lex.expect_punct("}");
            if (c.regions.empty()) lex.fail(at, "composite state has no regions");
            sc.composites.push_back(std::move(c));
        } else {
            lex.fail(at, "expected states, initial, final, transition or composite");
        }
    }
    lex.expect_punct("}");
    std::sort(sc.states.begin(), sc.states.end());
    std::sort(sc.finals.begin(), sc.finals.end());
    std::sort(sc.transitions.begin(), sc.transitions.end(),
              [](const Transition& x, const Transition& y) {
                  return std::tie(x.from, x.to) < std::tie(y.from, y.to);
              });
    std::sort(sc.composites.begin(), sc.composites.end(),
              [](const CompositeState& x, const CompositeState& y) {
                  return x.state < y.state;
              });
    return sc;
}

DeviceKind parse_device_kind(Lexer& lex) {
    const Token t = lex.peek();
    if (t.kind != TokKind::identifier) lex.fail(t, "expected device kind");
    if (t.text == "cpu") return lex.take(), DeviceKind::cpu;
    if (t.text == "disk") return lex.take(), DeviceKind::disk;
    if (t.text == "network") return lex.take(), DeviceKind::network;
    if (t.text == "delay") return lex.take(), DeviceKind::delay;
    lex.fail(t, "unknown device kind '" + t.text + "' (cpu, disk, network or delay)");
}

SchedulingPolicy parse_scheduling(Lexer& lex) {
    const Token t = lex.peek();
    if (t.kind != TokKind::identifier) lex.fail(t, "expected scheduling policy");
    if (t.text == "fcfs") return lex.take(), SchedulingPolicy::fcfs;
    if (t.text == "ps") return lex.take(), SchedulingPolicy::ps;
    if (t.text == "delay") return lex.take(), SchedulingPolicy::delay;
    lex.fail(t, "unknown scheduling policy '" + t.text + "' (fcfs, ps or delay)");
}

DeploymentModel parse_deployment(Lexer& lex) {
    DeploymentModel dep;
    lex.expect_punct("{");
    while (!lex.at_punct("}")) {
        const Token at = lex.peek();
        if (lex.accept_keyword("node")) {
            ProcNode node;
            node.name = lex.expect_name("node name");
            for (const auto& existing : dep.nodes)
                if (existing.name == node.name)
                    lex.fail(at, "duplicate node '" + node.name + "'");
            lex.expect_punct("{");
            while (lex.accept_keyword("device")) {
                Device dev;
                dev.name = lex.expect_name("device name");
                dev.kind = parse_device_kind(lex);
                dev.scheduling = parse_scheduling(lex);
                lex.expect_keyword("speed");
                dev.speed_factor = lex.expect_number("speed factor");
                for (const auto& existing : node.devices)
                    if (existing.name == dev.name)
                        lex.fail(at, "duplicate device '" + dev.name + "' on node '" +
                                         node.name + "'");
                node.devices.push_back(std::move(dev));
            }
            lex.expect_punct("}");
            std::sort(node.devices.begin(), node.devices.end(),
                      [](const Device& x, const Device& y) { return x.name < y.name; });
            dep.nodes.push_back(std::move(node));
        } else if (lex.accept_keyword("allocate")) {
            std::string component = lex.expect_name("component name");
            lex.expect_punct("->");
            std::string target = lex.expect_name("node name");
            if (dep.allocation.count(component))
                lex.fail(at, "duplicate allocation for component '" + component + "'");
            dep.allocation[component] = std::move(target);
        } else {
            lex.fail(at, "expected node or allocate");
        }
    }
    lex.expect_punct("}");
    std::sort(dep.nodes.begin(), dep.nodes.end(),
              [](const ProcNode& x, const ProcNode& y) { return x.name < y.name; });
    return dep;
}

void parse_annotations(Lexer& lex, PerformanceAnnotation& ann) {
    lex.expect_punct("{");
    while (!lex.at_punct("}")) {
        const Token at = lex.peek();
        if (lex.accept_keyword("time")) {
            std::string action = lex.expect_name("action name");
            if (ann.node_times.count(action))
                lex.fail(at, "duplicate time annotation for '" + action + "'");
            ann.node_times[action] = lex.expect_number("time value");
        } else if (lex.accept_keyword("request")) {
            std::string action = lex.expect_name("action name");
            std::string resource = lex.expect_name("software resource");
            auto& requests = ann.resource_requests[action];
            if (requests.count(resource))
                lex.fail(at, "duplicate request annotation for '" + action + "." +
                                 resource + "'");
            requests[resource] = lex.expect_number("request count");
        } else {
            lex.fail(at, "expected time or request");
        }
    }
    lex.expect_punct("}");
}

OverheadMatrix parse_overhead(Lexer& lex) {
    lex.expect_punct("{");
    const Token at = lex.peek();
    lex.expect_keyword("resources");
    lex.expect_punct(":");
    auto resources = parse_name_list(lex);
    if (resources.empty()) lex.fail(at, "overhead has no software resources");
    lex.expect_keyword("devices");
    lex.expect_punct(":");
    auto devices = parse_name_list(lex);
    if (devices.empty()) lex.fail(at, "overhead has no devices");

    std::map<std::string, std::vector<double>> rows;
    while (lex.accept_keyword("row")) {
        const Token row_at = lex.peek();
        std::string resource = lex.expect_name("software resource");
        if (rows.count(resource)) lex.fail(row_at, "duplicate row for '" + resource + "'");
        if (std::find(resources.begin(), resources.end(), resource) == resources.end())
            lex.fail(row_at, "row for undeclared resource '" + resource + "'");
        std::vector<double> entries;
        for (std::size_t i = 0; i < devices.size(); ++i)
            entries.push_back(lex.expect_number("overhead entry"));
        rows[resource] = std::move(entries);
    }
    lex.expect_punct("}");
    for (const auto& r : resources)
        if (!rows.count(r)) lex.fail(at, "missing overhead row for resource '" + r + "'");

    // Canonical form: both axes sorted, matrix permuted to match.
    std::vector<std::size_t> device_order(devices.size());
    for (std::size_t i = 0; i < devices.size(); ++i) device_order[i] = i;
    std::sort(device_order.begin(), device_order.end(),
              [&](std::size_t x, std::size_t y) { return devices[x] < devices[y]; });

    OverheadMatrix ov;
    ov.software_resources = resources;
    std::sort(ov.software_resources.begin(), ov.software_resources.end());
    for (std::size_t j : device_order) ov.devices.push_back(devices[j]);
    for (const auto& r : ov.software_resources) {
        std::vector<double> row;
        for (std::size_t j : device_order) row.push_back(rows[r][j]);
        ov.per_request.push_back(std::move(row));
    }
    return ov;
}

std::vector<ExecNode> parse_graph_nodes(Lexer& lex);

ExecNode parse_graph_node(Lexer& lex) {
    ExecNode n;
    const Token at = lex.peek();
    if (lex.accept_keyword("basic")) {
        n.node = BasicNode{lex.expect_name("node name")};
    } else if (lex.accept_keyword("repeat")) {
        RepetitionNode rep;
        rep.count = lex.expect_integer("repetition count");
        lex.expect_punct("{");
        rep.body = parse_graph_nodes(lex);
        lex.expect_punct("}");
        n.node = std::move(rep);
    } else if (lex.accept_keyword("case")) {
        CaseNode cs;
        lex.expect_punct("{");
        while (lex.accept_keyword("branch")) {
            CaseBranch branch;
            branch.probability = lex.expect_number("branch probability");
            lex.expect_punct("{");
            branch.body = parse_graph_nodes(lex);
            lex.expect_punct("}");
            cs.branches.push_back(std::move(branch));
        }
        lex.expect_punct("}");
        if (cs.branches.empty()) lex.fail(at, "case has no branches");
        n.node = std::move(cs);
    } else if (lex.accept_keyword("pardo") || lex.at_keyword("split")) {
        const bool is_split = lex.accept_keyword("split");
        std::vector<std::vector<ExecNode>> branches;
        lex.expect_punct("{");
        while (lex.accept_keyword("branch")) {
            lex.expect_punct("{");
            branches.push_back(parse_graph_nodes(lex));
            lex.expect_punct("}");
        }
        lex.expect_punct("}");
        if (branches.empty())
            lex.fail(at, std::string(is_split ? "split" : "pardo") + " has no branches");
        if (is_split)
            n.node = SplitNode{std::move(branches)};
        else
            n.node = PardoNode{std::move(branches)};
    } else if (lex.accept_keyword("expanded")) {
        ExpandedNode ex;
        ex.name = lex.expect_name("expanded node name");
        ex.sub.name = ex.name;
        lex.expect_punct("{");
        ex.sub.body = parse_graph_nodes(lex);
        lex.expect_punct("}");
        n.node = std::move(ex);
    } else {
        lex.fail(at, "expected basic, repeat, case, pardo, split or expanded");
    }
    return n;
}

std::vector<ExecNode> parse_graph_nodes(Lexer& lex) {
    std::vector<ExecNode> nodes;
    while (!lex.at_punct("}") && lex.peek().kind != TokKind::end)
        nodes.push_back(parse_graph_node(lex));
    return nodes;
}

} // namespace

DesignModel parse_model(const std::string& text, const ParseOptions& opts) {
    Lexer lex(text);
    DesignModel m;
    bool saw_annotations = false;
    while (lex.peek().kind != TokKind::end) {
        const Token at = lex.peek();
        if (lex.accept_keyword("scenario")) {
            auto s = parse_scenario(lex, opts);
            if (m.scenarios.count(s.name)) lex.fail(at, "duplicate scenario '" + s.name + "'");
            m.scenarios.emplace(s.name, std::move(s));
        } else if (lex.accept_keyword("activity")) {
            auto a = parse_activity(lex, opts);
            if (m.activities.count(a.name)) lex.fail(at, "duplicate activity '" + a.name + "'");
            m.activities.emplace(a.name, std::move(a));
        } else if (lex.accept_keyword("statechart")) {
            auto sc = parse_statechart(lex);
            if (m.statecharts.count(sc.name))
                lex.fail(at, "duplicate statechart '" + sc.name + "'");
            m.statecharts.emplace(sc.name, std::move(sc));
        } else if (lex.accept_keyword("deployment")) {
            if (m.deployment) lex.fail(at, "duplicate deployment section");
            m.deployment = parse_deployment(lex);
        } else if (lex.accept_keyword("annotations")) {
            if (saw_annotations) lex.fail(at, "duplicate annotations section");
            saw_annotations = true;
            parse_annotations(lex, m.annotations);
        } else if (lex.accept_keyword("overhead")) {
            if (m.overhead) lex.fail(at, "duplicate overhead section");
            m.overhead = parse_overhead(lex);
        } else {
            lex.fail(at, "unknown diagram kind '" + at.text + "'");
        }
    }
    return m;
}

ExecutionGraph parse_graph(const std::string& text) {
    Lexer lex(text);
    lex.expect_keyword("graph");
    ExecutionGraph g;
    g.name = lex.expect_name("graph name");
    lex.expect_punct("{");
    g.body = parse_graph_nodes(lex);
    lex.expect_punct("}");
    if (lex.peek().kind != TokKind::end)
        lex.fail(lex.peek(), "trailing content after graph");
    return g;
}

std::vector<Objective> parse_objectives(const std::string& text) {
    Lexer lex(text);
    lex.expect_keyword("objectives");
    lex.expect_punct("{");
    std::vector<Objective> objectives;
    while (!lex.at_punct("}")) {
        const Token at = lex.peek();
        Objective o;
        if (lex.accept_keyword("shortest")) {
            o.metric = MetricKind::shortest;
        } else if (lex.accept_keyword("average")) {
            o.metric = MetricKind::average;
        } else if (lex.accept_keyword("longest")) {
            o.metric = MetricKind::longest;
        } else {
            lex.fail(at, "expected metric (shortest, average or longest)");
        }
        lex.expect_punct("<=");
        o.threshold = lex.expect_number("threshold");
        objectives.push_back(o);
    }
    lex.expect_punct("}");
    if (lex.peek().kind != TokKind::end)
        lex.fail(lex.peek(), "trailing content after objectives");
    return objectives;
}

} // namespace spe
