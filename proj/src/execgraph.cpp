#include "spe/execgraph.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "spe/report.hpp"

namespace spe {

namespace {

constexpr double kProbTolerance = 1e-9;

// ---------------------------------------------------------------------------
// from_sequence
// ---------------------------------------------------------------------------

/// True when the step is driven by `participant` alone and does not
/// synchronize with the rest of the flow: its own self-calls and further
/// asynchronous sends. Anything else (a sync call, another participant
/// acting, control structures) ends an asynchronous spawn region.
bool drives_async_flow(const Step& step, const std::string& participant) {
    if (const auto* self = std::get_if<SelfCallStep>(&step.node))
        return self->on == participant;
    if (const auto* msg = std::get_if<MessageStep>(&step.node))
        return msg->from == participant && msg->kind == MessageKind::async;
    return false;
}

struct SequenceBuilder {
    const DesignModel& model;
    const CombineRules& combine;
    std::set<std::string> active; // ref-cycle guard

    std::vector<ExecNode> build_steps(const std::vector<Step>& steps) {
        std::vector<ExecNode> out;
        std::size_t i = 0;
        while (i < steps.size()) {
            const Step& step = steps[i];
            if (const auto* msg = std::get_if<MessageStep>(&step.node)) {
                if (msg->kind == MessageKind::sync) {
                    out.push_back({BasicNode{msg->action}});
                    ++i;
                    continue;
                }
                // Async: spawn the receiver's follow-up run into the split.
                std::vector<ExecNode> spawned;
                spawned.push_back({BasicNode{msg->action}});
                std::size_t j = i + 1;
                std::vector<Step> tail;
                while (j < steps.size() && drives_async_flow(steps[j], msg->to))
                    tail.push_back(steps[j++]);
                auto tail_nodes = build_steps(tail);
                spawned.insert(spawned.end(), tail_nodes.begin(), tail_nodes.end());
                out.push_back({SplitNode{{std::move(spawned)}}});
                i = j;
            } else if (const auto* self = std::get_if<SelfCallStep>(&step.node)) {
                out.push_back({RepetitionNode{self->repetitions,
                                              {{BasicNode{self->action}}}}});
                ++i;
            } else if (const auto* loop = std::get_if<LoopStep>(&step.node)) {
                out.push_back({RepetitionNode{loop->count, build_steps(loop->body)}});
                ++i;
            } else if (const auto* alt = std::get_if<AltStep>(&step.node)) {
                CaseNode cs;
                for (const auto& b : alt->branches)
                    cs.branches.push_back({b.probability, build_steps(b.body)});
                out.push_back({std::move(cs)});
                ++i;
            } else if (const auto* par = std::get_if<ParStep>(&step.node)) {
                PardoNode pd;
                for (const auto& b : par->branches) pd.branches.push_back(build_steps(b));
                out.push_back({std::move(pd)});
                ++i;
            } else if (const auto* ref = std::get_if<RefStep>(&step.node)) {
                out.push_back({ExpandedNode{ref->scenario, build_scenario(ref->scenario)}});
                ++i;
            }
        }
        apply_combine(out);
        return out;
    }

    ExecutionGraph build_scenario(const std::string& name) {
        auto it = model.scenarios.find(name);
        if (it == model.scenarios.end())
            throw ModelError("unresolvable scenario reference '" + name + "'");
        if (!active.insert(name).second)
            throw ModelError("cyclic scenario reference involving '" + name + "'");
        ExecutionGraph g;
        g.name = name;
        g.body = build_steps(it->second.body);
        active.erase(name);
        return g;
    }

    // Collapse consecutive basic nodes matching a combine group, in group
    // declaration order, greedily left to right.
    void apply_combine(std::vector<ExecNode>& nodes) const {
        if (combine.empty()) return;
        for (const auto& group : combine.groups) {
            if (group.actions.empty()) continue;
            for (std::size_t i = 0; i + group.actions.size() <= nodes.size();) {
                bool match = true;
                for (std::size_t k = 0; k < group.actions.size(); ++k) {
                    const auto* basic = std::get_if<BasicNode>(&nodes[i + k].node);
                    if (!basic || basic->name != group.actions[k]) {
                        match = false;
                        break;
                    }
                }
                if (match) {
                    nodes.erase(nodes.begin() + static_cast<std::ptrdiff_t>(i + 1),
                                nodes.begin() +
                                    static_cast<std::ptrdiff_t>(i + group.actions.size()));
                    nodes[i].node = BasicNode{group.name};
                }
                ++i;
            }
        }
    }
};

// ---------------------------------------------------------------------------
// from_activity
// ---------------------------------------------------------------------------

struct ActivityWalker {
    const ActivityModel& model;
    std::map<std::string, std::vector<std::string>> successors; // plain edges
    std::map<std::string, std::vector<std::string>> flow; // edges + decision outcomes
    std::map<std::string, const Decision*> decisions;
    std::map<std::string, std::string> join_of; // fork -> join
    std::set<std::string> joins;
    std::set<std::string> finals;

    explicit ActivityWalker(const ActivityModel& a) : model(a) {
        for (const auto& [from, to] : a.edges) {
            successors[from].push_back(to);
            flow[from].push_back(to);
        }
        for (const auto& d : a.decisions) {
            decisions[d.at] = &d;
            for (const auto& o : d.outcomes) flow[d.at].push_back(o.target);
        }
        for (const auto& fj : a.fork_joins) {
            join_of[fj.fork] = fj.join;
            joins.insert(fj.join);
        }
        finals.insert(a.finals.begin(), a.finals.end());
    }

    [[noreturn]] void fail(const std::string& message) const {
        throw ModelError("activity " + model.name + ": " + message);
    }

    const std::string& sole_successor(const std::string& node) const {
        auto it = successors.find(node);
        if (it == successors.end() || it->second.empty())
            fail("node '" + node + "' has no outgoing edge");
        if (it->second.size() > 1)
            fail("node '" + node + "' branches without a decision or fork");
        return it->second.front();
    }

    /// Set of nodes reachable from `node` (inclusive), for merge detection.
    std::set<std::string> reachable(const std::string& node) const {
        std::set<std::string> seen;
        std::vector<std::string> stack{node};
        while (!stack.empty()) {
            std::string cur = stack.back();
            stack.pop_back();
            if (!seen.insert(cur).second) continue;
            auto it = flow.find(cur);
            if (it == flow.end()) continue;
            for (const auto& next : it->second) stack.push_back(next);
        }
        return seen;
    }

    /// First node along the walk from `from` that all `others` can also
    /// reach; empty when the branches only meet at their final nodes.
    std::string find_merge(const std::string& from,
                           const std::vector<std::set<std::string>>& others) const {
        std::set<std::string> seen;
        std::vector<std::string> frontier{from};
        while (!frontier.empty()) {
            std::vector<std::string> next;
            for (const auto& node : frontier) {
                if (!seen.insert(node).second) continue;
                bool common = true;
                for (const auto& other : others)
                    if (!other.count(node)) {
                        common = false;
                        break;
                    }
                if (common) return node;
                auto it = flow.find(node);
                if (it != flow.end())
                    next.insert(next.end(), it->second.begin(), it->second.end());
            }
            frontier = std::move(next);
        }
        return {};
    }

    /// Walks from `node` until `stop` (exclusive) or a final node, emitting
    /// execution-graph nodes. `trail` maps already-emitted nodes to their
    /// position, so decision back-edges can wrap the loop body in place.
    std::vector<ExecNode> walk(std::string node, const std::string& stop) const {
        std::vector<ExecNode> out;
        std::map<std::string, std::size_t> trail;
        std::set<std::string> visited;
        while (!node.empty() && node != stop && !finals.count(node)) {
            if (!visited.insert(node).second)
                fail("unbounded loop at '" + node + "'");
            if (node == model.initial) {
                node = sole_successor(node);
                continue;
            }
            auto fork_it = join_of.find(node);
            if (fork_it != join_of.end()) {
                const std::string& join = fork_it->second;
                auto succ_it = successors.find(node);
                if (succ_it == successors.end() || succ_it->second.size() < 2)
                    fail("fork '" + node + "' has fewer than 2 branches");
                PardoNode pardo;
                for (const auto& branch : succ_it->second) {
                    auto body = walk(branch, join);
                    pardo.branches.push_back(std::move(body));
                }
                out.push_back({std::move(pardo)});
                node = sole_successor(join);
                continue;
            }
            if (joins.count(node)) fail("reached join '" + node + "' outside its fork");

            auto dec_it = decisions.find(node);
            if (dec_it == decisions.end()) {
                trail[node] = out.size();
                out.push_back({BasicNode{node}});
                node = sole_successor(node);
                continue;
            }

            // Decision after `node`: either a loop back-edge or a case split.
            const Decision& d = *dec_it->second;
            const DecisionOutcome* back = nullptr;
            std::vector<const DecisionOutcome*> forward;
            for (const auto& o : d.outcomes) {
                if (o.target == node || trail.count(o.target))
                    back = &o;
                else
                    forward.push_back(&o);
            }
            if (back) {
                if (!back->repetitions)
                    fail("unbounded loop at '" + node + "'");
                if (forward.size() != 1)
                    fail("decision at '" + node +
                         "' must have exactly one forward outcome next to a back-edge");
                std::vector<ExecNode> body;
                const std::size_t start =
                    back->target == node ? out.size() : trail.at(back->target);
                body.assign(out.begin() + static_cast<std::ptrdiff_t>(start), out.end());
                out.erase(out.begin() + static_cast<std::ptrdiff_t>(start), out.end());
                body.push_back({BasicNode{node}});
                out.push_back({RepetitionNode{*back->repetitions, std::move(body)}});
                // Nodes swallowed by the loop body are no longer addressable
                // as back-edge targets of a later decision.
                for (auto it = trail.begin(); it != trail.end();)
                    it = it->second >= start ? trail.erase(it) : std::next(it);
                node = forward.front()->target;
                continue;
            }

            trail[node] = out.size();
            out.push_back({BasicNode{node}});
            std::vector<std::set<std::string>> reach;
            for (const auto* o : forward) reach.push_back(reachable(o->target));
            std::string merge;
            for (std::size_t b = 0; b < forward.size() && merge.empty(); ++b) {
                std::vector<std::set<std::string>> others;
                for (std::size_t k = 0; k < forward.size(); ++k)
                    if (k != b) others.push_back(reach[k]);
                merge = find_merge(forward[b]->target, others);
            }
            CaseNode cs;
            for (const auto* o : forward)
                cs.branches.push_back({o->probability, walk(o->target, merge)});
            out.push_back({std::move(cs)});
            node = merge; // empty merge: every branch ran to a final node
        }
        return out;
    }
};

// ---------------------------------------------------------------------------
// from_statechart
// ---------------------------------------------------------------------------

struct StatechartWalker {
    const StateChartModel& model;
    std::map<std::string, std::vector<const Transition*>> outgoing;
    std::map<std::string, const CompositeState*> composites;
    std::set<std::string> finals;

    explicit StatechartWalker(const StateChartModel& sc) : model(sc) {
        for (const auto& t : sc.transitions) outgoing[t.from].push_back(&t);
        for (const auto& c : sc.composites) composites[c.state] = &c;
        finals.insert(sc.finals.begin(), sc.finals.end());
    }

    [[noreturn]] void fail(const std::string& message) const {
        throw ModelError("statechart " + model.name + ": " + message);
    }

    ExecNode state_node(const std::string& state) const {
        auto it = composites.find(state);
        if (it == composites.end()) return {BasicNode{state}};
        const CompositeState& c = *it->second;
        if (c.mode == CompositeMode::concurrent) {
            PardoNode pardo;
            for (const auto& region : c.regions) {
                std::vector<ExecNode> body;
                for (const auto& sub : region) body.push_back({BasicNode{sub}});
                pardo.branches.push_back(std::move(body));
            }
            return {std::move(pardo)};
        }
        ExecutionGraph sub;
        sub.name = state;
        for (const auto& region : c.regions)
            for (const auto& s : region) sub.body.push_back({BasicNode{s}});
        return {ExpandedNode{state, std::move(sub)}};
    }

    std::set<std::string> reachable(const std::string& state) const {
        std::set<std::string> seen;
        std::vector<std::string> stack{state};
        while (!stack.empty()) {
            std::string cur = stack.back();
            stack.pop_back();
            if (!seen.insert(cur).second) continue;
            auto it = outgoing.find(cur);
            if (it == outgoing.end()) continue;
            for (const auto* t : it->second) stack.push_back(t->to);
        }
        return seen;
    }

    std::string find_merge(const std::string& from,
                           const std::vector<std::set<std::string>>& others) const {
        std::set<std::string> seen;
        std::vector<std::string> frontier{from};
        while (!frontier.empty()) {
            std::vector<std::string> next;
            for (const auto& state : frontier) {
                if (!seen.insert(state).second) continue;
                bool common = true;
                for (const auto& other : others)
                    if (!other.count(state)) {
                        common = false;
                        break;
                    }
                if (common) return state;
                auto it = outgoing.find(state);
                if (it != outgoing.end())
                    for (const auto* t : it->second) next.push_back(t->to);
            }
            frontier = std::move(next);
        }
        return {};
    }

    std::vector<ExecNode> walk(std::string state, const std::string& stop,
                               std::set<std::string> on_path) const {
        std::vector<ExecNode> out;
        while (!state.empty() && state != stop) {
            if (!on_path.insert(state).second)
                fail("cyclic transition structure at '" + state + "'");
            out.push_back(state_node(state));
            if (finals.count(state)) break;
            auto it = outgoing.find(state);
            if (it == outgoing.end() || it->second.empty())
                fail("state '" + state + "' has no outgoing transition and is not final");
            const auto& exits = it->second;
            if (exits.size() == 1) {
                state = exits.front()->to;
                continue;
            }
            double sum = 0.0;
            for (const auto* t : exits) {
                if (!t->probability)
                    fail("state '" + state +
                         "' has multiple outgoing transitions without probabilities");
                sum += *t->probability;
            }
            if (std::abs(sum - 1.0) > kProbTolerance)
                fail("transition probabilities out of '" + state + "' sum to " +
                     format_number(sum));
            std::vector<std::set<std::string>> reach;
            for (const auto* t : exits) reach.push_back(reachable(t->to));
            std::string merge;
            for (std::size_t b = 0; b < exits.size() && merge.empty(); ++b) {
                std::vector<std::set<std::string>> others;
                for (std::size_t k = 0; k < exits.size(); ++k)
                    if (k != b) others.push_back(reach[k]);
                merge = find_merge(exits[b]->to, others);
            }
            CaseNode cs;
            for (const auto* t : exits)
                cs.branches.push_back({*t->probability, walk(t->to, merge, on_path)});
            out.push_back({std::move(cs)});
            state = merge;
        }
        return out;
    }
};

// ---------------------------------------------------------------------------
// flatten / validate / dot
// ---------------------------------------------------------------------------

std::vector<ExecNode> flatten_nodes(const std::vector<ExecNode>& nodes) {
    std::vector<ExecNode> out;
    for (const auto& n : nodes) {
        if (const auto* ex = std::get_if<ExpandedNode>(&n.node)) {
            auto inlined = flatten_nodes(ex->sub.body);
            out.insert(out.end(), std::make_move_iterator(inlined.begin()),
                       std::make_move_iterator(inlined.end()));
        } else if (const auto* rep = std::get_if<RepetitionNode>(&n.node)) {
            out.push_back({RepetitionNode{rep->count, flatten_nodes(rep->body)}});
        } else if (const auto* cs = std::get_if<CaseNode>(&n.node)) {
            CaseNode flat;
            for (const auto& b : cs->branches)
                flat.branches.push_back({b.probability, flatten_nodes(b.body)});
            out.push_back({std::move(flat)});
        } else if (const auto* par = std::get_if<PardoNode>(&n.node)) {
            PardoNode flat;
            for (const auto& b : par->branches) flat.branches.push_back(flatten_nodes(b));
            out.push_back({std::move(flat)});
        } else if (const auto* split = std::get_if<SplitNode>(&n.node)) {
            SplitNode flat;
            for (const auto& b : split->spawned) flat.spawned.push_back(flatten_nodes(b));
            out.push_back({std::move(flat)});
        } else {
            out.push_back(n);
        }
    }
    return out;
}

struct GraphChecker {
    std::vector<Diagnostic> diags;
    const PerformanceAnnotation* ann = nullptr;

    void error(const std::string& where, const std::string& message) {
        diags.push_back({Severity::error, where, message});
    }

    // Names are unique per graph level; expanded sub-graphs open a new scope.
    void check_nodes(const std::vector<ExecNode>& nodes, const std::string& where,
                     std::set<std::string>& names) {
        for (const auto& n : nodes) {
            if (const auto* basic = std::get_if<BasicNode>(&n.node)) {
                if (!names.insert(basic->name).second)
                    error(where, "duplicate node name '" + basic->name + "'");
                if (ann && !ann->node_times.count(basic->name))
                    error(where, "basic node '" + basic->name + "' has no time annotation");
            } else if (const auto* ex = std::get_if<ExpandedNode>(&n.node)) {
                if (!names.insert(ex->name).second)
                    error(where, "duplicate node name '" + ex->name + "'");
                check_graph(ex->sub, where + " / " + ex->name);
            } else if (const auto* rep = std::get_if<RepetitionNode>(&n.node)) {
                if (rep->count < 0) error(where, "repetition count is negative");
                if (rep->body.empty()) error(where, "repetition body is empty");
                check_nodes(rep->body, where, names);
            } else if (const auto* cs = std::get_if<CaseNode>(&n.node)) {
                if (cs->branches.empty()) {
                    error(where, "case has no branches");
                    continue;
                }
                double sum = 0.0;
                for (const auto& b : cs->branches) {
                    if (b.probability < 0.0 || b.probability > 1.0)
                        error(where, "case probability " + format_number(b.probability) +
                                         " outside [0, 1]");
                    sum += b.probability;
                    check_nodes(b.body, where, names);
                }
                if (std::abs(sum - 1.0) > kProbTolerance)
                    error(where, "case probabilities sum to " + format_number(sum));
            } else if (const auto* par = std::get_if<PardoNode>(&n.node)) {
                if (par->branches.empty()) error(where, "pardo has no branches");
                for (const auto& b : par->branches) check_nodes(b, where, names);
            } else if (const auto* split = std::get_if<SplitNode>(&n.node)) {
                if (split->spawned.empty()) error(where, "split has no branches");
                for (const auto& b : split->spawned) check_nodes(b, where, names);
            }
        }
    }

    void check_graph(const ExecutionGraph& g, const std::string& where) {
        if (g.body.empty()) error(where, "graph body is empty");
        std::set<std::string> names;
        check_nodes(g.body, where, names);
    }
};

/// Deterministic DOT writer. Every structural node gets a stable id in
/// pre-order; chains are linked with plain arcs, case arcs carry their
/// probabilities, pardo and split regions hang off fork/join marks.
struct DotWriter {
    std::ostringstream os;
    int counter = 0;

    std::string fresh(const std::string& prefix) {
        return prefix + std::to_string(counter++);
    }

    static std::string quote(const std::string& s) {
        std::string q = "\"";
        for (char c : s) {
            if (c == '"' || c == '\\') q += '\\';
            q += c;
        }
        q += '"';
        return q;
    }

    void node(const std::string& id, const std::string& label, const char* shape) {
        os << "  " << quote(id) << " [label=" << quote(label) << ", shape=" << shape
           << "];\n";
    }

    void arc(const std::string& from, const std::string& to, const std::string& label = {},
             const char* style = nullptr) {
        os << "  " << quote(from) << " -> " << quote(to);
        if (!label.empty() || style) {
            os << " [";
            bool first = true;
            if (!label.empty()) {
                os << "label=" << quote(label);
                first = false;
            }
            if (style) {
                if (!first) os << ", ";
                os << "style=" << style;
            }
            os << "]";
        }
        os << ";\n";
    }

    // Renders a sequence; returns its entry and exit ids (empty if no nodes).
    std::pair<std::string, std::string> sequence(const std::vector<ExecNode>& nodes) {
        std::string entry, exit;
        for (const auto& n : nodes) {
            auto [head, tail] = render(n);
            if (entry.empty()) entry = head;
            if (!exit.empty()) arc(exit, head);
            exit = tail;
        }
        return {entry, exit};
    }

    std::pair<std::string, std::string> render(const ExecNode& n) {
        if (const auto* basic = std::get_if<BasicNode>(&n.node)) {
            node(basic->name, basic->name, "box");
            return {basic->name, basic->name};
        }
        if (const auto* ex = std::get_if<ExpandedNode>(&n.node)) {
            node(ex->name, ex->name, "box3d");
            return {ex->name, ex->name};
        }
        if (const auto* rep = std::get_if<RepetitionNode>(&n.node)) {
            const std::string id = fresh("repeat_");
            node(id, "\xc3\x97" + std::to_string(rep->count), "invhouse");
            auto [entry, exit] = sequence(rep->body);
            if (!entry.empty()) {
                arc(id, entry);
                arc(exit, id, "", "dashed");
            }
            return {id, id};
        }
        if (const auto* cs = std::get_if<CaseNode>(&n.node)) {
            const std::string id = fresh("case_");
            const std::string join = fresh("join_");
            node(id, "case", "diamond");
            node(join, "", "point");
            for (const auto& b : cs->branches) {
                auto [entry, exit] = sequence(b.body);
                if (entry.empty()) {
                    arc(id, join, format_number(b.probability));
                } else {
                    arc(id, entry, format_number(b.probability));
                    arc(exit, join);
                }
            }
            return {id, join};
        }
        const std::vector<std::vector<ExecNode>>* branches = nullptr;
        const char* tag = nullptr;
        if (const auto* par = std::get_if<PardoNode>(&n.node)) {
            branches = &par->branches;
            tag = "fork";
        } else {
            branches = &std::get<SplitNode>(n.node).spawned;
            tag = "split";
        }
        const std::string id = fresh(std::string(tag) + "_");
        node(id, tag, "rect");
        if (std::string(tag) == "fork") {
            const std::string join = fresh("joinbar_");
            node(join, "join", "rect");
            for (const auto& b : *branches) {
                auto [entry, exit] = sequence(b);
                if (entry.empty()) {
                    arc(id, join);
                } else {
                    arc(id, entry);
                    arc(exit, join);
                }
            }
            return {id, join};
        }
        for (const auto& b : *branches) {
            auto [entry, exit] = sequence(b);
            if (!entry.empty()) arc(id, entry, "", "dashed");
        }
        return {id, id};
    }
};

} // namespace

ExecutionGraph from_sequence(const DesignModel& model, const std::string& scenario,
                             const CombineRules& combine) {
    SequenceBuilder builder{model, combine, {}};
    return builder.build_scenario(scenario);
}

ExecutionGraph from_activity(const ActivityModel& a) {
    ActivityWalker walker(a);
    if (a.initial.empty()) walker.fail("activity has no initial node");
    ExecutionGraph g;
    g.name = a.name;
    g.body = walker.walk(a.initial, {});
    if (g.body.empty()) walker.fail("no actions between initial and final");
    return g;
}

ExecutionGraph from_statechart(const StateChartModel& sc) {
    StatechartWalker walker(sc);
    if (sc.initial.empty()) walker.fail("statechart has no initial state");
    ExecutionGraph g;
    g.name = sc.name;
    g.body = walker.walk(sc.initial, {}, {});
    return g;
}

ExecutionGraph flatten(const ExecutionGraph& g) {
    return {g.name, flatten_nodes(g.body)};
}

std::vector<Diagnostic> validate_graph(const ExecutionGraph& g,
                                       const PerformanceAnnotation* ann) {
    GraphChecker ck;
    ck.ann = ann;
    ck.check_graph(g, "graph " + g.name);
    return ck.diags;
}

std::string to_dot(const ExecutionGraph& g) {
    DotWriter w;
    w.os << "digraph " << DotWriter::quote(g.name) << " {\n";
    w.os << "  rankdir=TB;\n";
    w.os << "  node [fontname=\"Helvetica\"];\n";
    w.sequence(g.body);
    w.os << "}\n";
    return w.os.str();
}

} // namespace spe
