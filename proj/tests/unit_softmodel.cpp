#include <doctest.h>

#include <cmath>
#include <functional>

#include "spe/parse.hpp"
#include "spe/softmodel.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "support/testutil.hpp"

using namespace spe;
using namespace spe::test;

namespace {

ExecutionGraph transaction_graph() {
    const auto model = parse_model(fixture("atm.spe"));
    return flatten(from_sequence(model, "ProcessTransaction"));
}

PerformanceAnnotation atm_annotations() {
    return parse_model(fixture("atm.spe")).annotations;
}

OverheadMatrix table2_overheads() {
    return *parse_model(fixture("sendresults.spe")).overhead;
}

} // namespace

TEST_CASE("solve_static: transaction subgraph path extremes") {
    const auto metrics = solve_static(transaction_graph(), atm_annotations());
    CHECK(metrics.shortest == 80.0);
    CHECK(metrics.longest == 530.0);
    // Uniform thirds on the three transaction kinds.
    CHECK(close_rel(metrics.average, 280.0, 1e-9));
    CHECK(std::abs(metrics.average - 280.0) <= 1e-9 * 280.0);
}

TEST_CASE("solve_static: whole session composes linearly") {
    const auto model = parse_model(fixture("atm.spe"));
    const auto metrics =
        solve_static(flatten(from_sequence(model, "atmSession")), model.annotations);
    CHECK(metrics.shortest == 50 + 20 + 2 * 80 + 100);
    CHECK(metrics.longest == 50 + 20 + 2 * 530 + 100);
    CHECK(close_rel(metrics.average, 50 + 20 + 2 * 280 + 100, 1e-9));
}

TEST_CASE("solve_static: zero times and plain repetition") {
    ExecutionGraph g;
    g.name = "zeros";
    g.body.push_back({BasicNode{"a"}});
    g.body.push_back({BasicNode{"b"}});
    PerformanceAnnotation ann;
    ann.node_times = {{"a", 0.0}, {"b", 0.0}};
    const auto zero = solve_static(g, ann);
    CHECK(zero.shortest == 0.0);
    CHECK(zero.average == 0.0);
    CHECK(zero.longest == 0.0);

    ExecutionGraph rep;
    rep.name = "rep";
    rep.body.push_back({RepetitionNode{2, {ExecNode{BasicNode{"step"}}}}});
    PerformanceAnnotation ann2;
    ann2.node_times = {{"step", 80.0}};
    const auto m = solve_static(rep, ann2);
    CHECK(m.shortest == 160.0);
    CHECK(m.average == 160.0);
    CHECK(m.longest == 160.0);
}

TEST_CASE("solve_static: unbound names and invalid graphs are errors") {
    ExecutionGraph g;
    g.name = "gap";
    g.body.push_back({BasicNode{"mystery"}});
    PerformanceAnnotation empty_ann;
    CHECK_THROWS_WITH_AS(solve_static(g, empty_ann),
                         doctest::Contains("no time annotation"), ModelError);

    ExecutionGraph bad;
    bad.name = "bad";
    CaseNode cs;
    cs.branches.push_back({0.4, {ExecNode{BasicNode{"x"}}}});
    bad.body.push_back({cs});
    PerformanceAnnotation ann;
    ann.node_times = {{"x", 1.0}};
    CHECK_THROWS_AS(solve_static(bad, ann), ModelError);
}

TEST_CASE("device_demands: matrix product over the overhead table") {
    ExecutionGraph g;
    g.name = "send";
    g.body.push_back({BasicNode{"sendResults"}});
    PerformanceAnnotation ann;
    ann.node_times = {{"sendResults", 10.0}};
    ann.resource_requests["sendResults"] = {
        {"WorkUnit", 2.0}, {"DataBase", 1.0}, {"Messages", 1.0}};
    const auto demands = device_demands(g, ann, table2_overheads());
    CHECK(demands.per_device.at("CPU") == 145.0);       // 2*20 + 1*100 + 1*5
    CHECK(demands.per_device.at("PhysicalIO") == 4.0);  // 0 + 2 + 2
    CHECK(demands.per_device.at("NetworkMsg") == 1.0);  // 0 + 0 + 1
}

TEST_CASE("device_demands: zero requests, repetition scaling, weighting") {
    const auto ov = table2_overheads();
    ExecutionGraph g;
    g.name = "quiet";
    g.body.push_back({BasicNode{"idle"}});
    PerformanceAnnotation ann;
    ann.node_times = {{"idle", 1.0}};
    auto demands = device_demands(g, ann, ov);
    CHECK(demands.per_device.at("CPU") == 0.0);
    CHECK(demands.per_device.at("PhysicalIO") == 0.0);

    ExecutionGraph rep;
    rep.name = "rep";
    rep.body.push_back({RepetitionNode{3, {ExecNode{BasicNode{"fetch"}}}}});
    PerformanceAnnotation ann2;
    ann2.node_times = {{"fetch", 1.0}};
    ann2.resource_requests["fetch"] = {{"DataBase", 1.0}};
    demands = device_demands(rep, ann2, ov);
    CHECK(demands.per_device.at("PhysicalIO") == 6.0); // 3 repetitions x 2 per access

    // Case probability weights the demand; split work still counts fully.
    ExecutionGraph mixed;
    mixed.name = "mixed";
    CaseNode cs;
    cs.branches.push_back({0.25, {ExecNode{BasicNode{"fetch"}}}});
    cs.branches.push_back({0.75, {}});
    mixed.body.push_back({cs});
    mixed.body.push_back({SplitNode{{{ExecNode{BasicNode{"audit"}}}}}});
    PerformanceAnnotation ann3;
    ann3.node_times = {{"fetch", 1.0}, {"audit", 1.0}};
    ann3.resource_requests["fetch"] = {{"DataBase", 1.0}};
    ann3.resource_requests["audit"] = {{"Messages", 2.0}};
    demands = device_demands(mixed, ann3, ov);
    CHECK(demands.per_device.at("PhysicalIO") == doctest::Approx(0.25 * 2 + 2 * 2));
    CHECK(demands.per_device.at("NetworkMsg") == doctest::Approx(2.0));
}

TEST_CASE("device_demands: unknown software resource is an error") {
    ExecutionGraph g;
    g.name = "odd";
    g.body.push_back({BasicNode{"n"}});
    PerformanceAnnotation ann;
    ann.node_times = {{"n", 1.0}};
    ann.resource_requests["n"] = {{"GpuHours", 1.0}};
    CHECK_THROWS_WITH_AS(device_demands(g, ann, table2_overheads()),
                         doctest::Contains("unknown software resource 'GpuHours'"),
                         ModelError);
}

TEST_CASE("check_objective: margins on the transaction metrics") {
    const PathMetrics metrics{80.0, 530.0, 280.0};
    auto verdict = check_objective(metrics, {MetricKind::average, 300.0});
    CHECK(verdict.pass);
    CHECK(verdict.margin == doctest::Approx(20.0));

    verdict = check_objective(metrics, {MetricKind::longest, 500.0});
    CHECK(!verdict.pass);
    CHECK(verdict.margin == doctest::Approx(-30.0));

    verdict = check_objective(PathMetrics{0, 0, 0}, {MetricKind::longest, 0.0});
    CHECK(verdict.pass);
    CHECK(verdict.margin == 0.0);
}

TEST_CASE("property: shortest <= average <= longest") {
    Xoshiro256pp rng(1234);
    for (int i = 0; i < 1000; ++i) {
        const auto [graph, ann] = random_graph(rng);
        const auto m = solve_static(graph, ann);
        const double slack = 1e-9 * std::max(1.0, m.longest);
        CHECK(m.shortest <= m.average + slack);
        CHECK(m.average <= m.longest + slack);
        CHECK(m.shortest >= 0.0);
    }
}

TEST_CASE("property: repetition linearity") {
    Xoshiro256pp rng(77);
    for (int i = 0; i < 200; ++i) {
        auto [graph, ann] = random_graph(rng);
        const auto base = solve_static(graph, ann);
        const RepCount n = static_cast<RepCount>(rng.next() % 5);
        ExecutionGraph wrapped;
        wrapped.name = "wrapped";
        wrapped.body.push_back({RepetitionNode{n, graph.body}});
        const auto scaled = solve_static(wrapped, ann);
        CHECK(close_rel(scaled.shortest, static_cast<double>(n) * base.shortest, 1e-9));
        CHECK(close_rel(scaled.average, static_cast<double>(n) * base.average, 1e-9));
        CHECK(close_rel(scaled.longest, static_cast<double>(n) * base.longest, 1e-9));
    }
}

TEST_CASE("property: a single certain case branch is transparent") {
    Xoshiro256pp rng(99);
    for (int i = 0; i < 200; ++i) {
        auto [graph, ann] = random_graph(rng);
        const auto base = solve_static(graph, ann);
        ExecutionGraph wrapped;
        wrapped.name = "sure";
        CaseNode cs;
        cs.branches.push_back({1.0, graph.body});
        wrapped.body.push_back({cs});
        const auto same = solve_static(wrapped, ann);
        CHECK(close_rel(same.shortest, base.shortest, 1e-9));
        CHECK(close_rel(same.average, base.average, 1e-9));
        CHECK(close_rel(same.longest, base.longest, 1e-9));
    }
}

TEST_CASE("property: scaling node times scales all metrics") {
    Xoshiro256pp rng(55);
    for (int i = 0; i < 200; ++i) {
        auto [graph, ann] = random_graph(rng);
        const auto base = solve_static(graph, ann);
        const double c = 0.25 + 4.0 * rng.uniform01();
        PerformanceAnnotation scaled_ann = ann;
        for (auto& [name, t] : scaled_ann.node_times) t *= c;
        const auto scaled = solve_static(graph, scaled_ann);
        CHECK(close_rel(scaled.shortest, c * base.shortest, 1e-9));
        CHECK(close_rel(scaled.average, c * base.average, 1e-9));
        CHECK(close_rel(scaled.longest, c * base.longest, 1e-9));
    }
}

TEST_CASE("property: demands are additive over sequencing and linear in repetition") {
    // Overhead axes matching the generator's request names.
    OverheadMatrix ov;
    ov.software_resources = {"res_a", "res_b"};
    ov.devices = {"dev0", "dev1"};
    ov.per_request = {{3.0, 1.0}, {0.5, 2.0}};
    Xoshiro256pp rng(42);
    for (int i = 0; i < 100; ++i) {
        GraphGenOptions opts;
        opts.allow_expanded = false;
        auto [g1, ann1] = random_graph(rng, opts);
        auto [g2, ann2] = random_graph(rng, opts);
        // Node names restart per graph; prefix the second set to disjoin it.
        // (random_graph names are node_K, unique within one graph only.)
        PerformanceAnnotation merged = ann1;
        ExecutionGraph renamed = g2;
        std::string prefix = "g2_";
        std::function<void(std::vector<ExecNode>&)> rename =
            [&](std::vector<ExecNode>& nodes) {
                for (auto& n : nodes) {
                    if (auto* basic = std::get_if<BasicNode>(&n.node)) {
                        basic->name = prefix + basic->name;
                    } else if (auto* rep = std::get_if<RepetitionNode>(&n.node)) {
                        rename(rep->body);
                    } else if (auto* cs = std::get_if<CaseNode>(&n.node)) {
                        for (auto& b : cs->branches) rename(b.body);
                    } else if (auto* par = std::get_if<PardoNode>(&n.node)) {
                        for (auto& b : par->branches) rename(b);
                    } else if (auto* split = std::get_if<SplitNode>(&n.node)) {
                        for (auto& b : split->spawned) rename(b);
                    }
                }
            };
        rename(renamed.body);
        for (const auto& [name, t] : ann2.node_times) merged.node_times[prefix + name] = t;
        for (const auto& [name, reqs] : ann2.resource_requests)
            merged.resource_requests[prefix + name] = reqs;

        ExecutionGraph seq;
        seq.name = "seq";
        seq.body = g1.body;
        seq.body.insert(seq.body.end(), renamed.body.begin(), renamed.body.end());

        const auto d1 = device_demands(g1, merged, ov);
        const auto d2 = device_demands(renamed, merged, ov);
        const auto dseq = device_demands(seq, merged, ov);
        for (const auto& [device, total] : dseq.per_device)
            CHECK(close_rel(total, d1.per_device.at(device) + d2.per_device.at(device),
                            1e-9));

        ExecutionGraph rep;
        rep.name = "rep";
        rep.body.push_back({RepetitionNode{3, g1.body}});
        const auto drep = device_demands(rep, merged, ov);
        for (const auto& [device, total] : drep.per_device)
            CHECK(close_rel(total, 3.0 * d1.per_device.at(device), 1e-9));
    }
}

TEST_CASE("oracle: exhaustive path enumeration matches the solver") {
    Xoshiro256pp rng(2025);
    int checked = 0;
    for (int i = 0; i < 400; ++i) {
        GraphGenOptions opts;
        opts.max_depth = 3;
        opts.allow_pardo = false; // see GraphGenOptions::allow_pardo
        const auto [graph, ann] = random_graph(rng, opts);
        std::vector<PathSample> paths;
        try {
            paths = enumerate_paths(graph, ann, 10000);
        } catch (const PathLimitExceeded&) {
            continue; // outside the oracle's domain
        }
        ++checked;
        const auto expected = metrics_from_paths(paths);
        const auto actual = solve_static(graph, ann);
        CHECK(close_rel(actual.shortest, expected.shortest, 1e-9));
        CHECK(close_rel(actual.longest, expected.longest, 1e-9));
        CHECK(close_rel(actual.average, expected.average, 1e-9));
    }
    CHECK(checked > 100); // the domain must not be vacuously small
}

TEST_CASE("fork-join metrics: slowest branch gates every metric") {
    // Deterministic branches: enumeration and the compositional rule agree.
    ExecutionGraph g;
    g.name = "fj";
    PardoNode par;
    par.branches.push_back({ExecNode{BasicNode{"a"}}, ExecNode{BasicNode{"b"}}});
    par.branches.push_back({ExecNode{BasicNode{"c"}}});
    g.body.push_back({par});
    PerformanceAnnotation ann;
    ann.node_times = {{"a", 3.0}, {"b", 4.0}, {"c", 5.0}};
    const auto m = solve_static(g, ann);
    CHECK(m.shortest == 7.0);
    CHECK(m.average == 7.0);
    CHECK(m.longest == 7.0);
    const auto paths = enumerate_paths(g, ann, 100);
    const auto oracle = metrics_from_paths(paths);
    CHECK(oracle.shortest == m.shortest);
    CHECK(oracle.average == m.average);
    CHECK(oracle.longest == m.longest);

    // Stochastic branches: the average is the slowest branch's average.
    ExecutionGraph st;
    st.name = "fj2";
    PardoNode par2;
    CaseNode cs;
    cs.branches.push_back({0.5, {ExecNode{BasicNode{"fast"}}}});
    cs.branches.push_back({0.5, {ExecNode{BasicNode{"slow"}}}});
    par2.branches.push_back({ExecNode{std::move(cs)}});
    par2.branches.push_back({ExecNode{BasicNode{"steady"}}});
    st.body.push_back({std::move(par2)});
    PerformanceAnnotation ann2;
    ann2.node_times = {{"fast", 0.0}, {"slow", 10.0}, {"steady", 5.0}};
    const auto m2 = solve_static(st, ann2);
    CHECK(m2.shortest == 5.0);  // max(0, 5)
    CHECK(m2.longest == 10.0);  // max(10, 5)
    CHECK(m2.average == 5.0);   // max(5, 5)
}

TEST_CASE("oracle: transaction subgraph agrees with enumeration") {
    const auto g = transaction_graph();
    const auto paths = enumerate_paths(g, atm_annotations(), 10000);
    CHECK(paths.size() == 3);
    const auto m = metrics_from_paths(paths);
    CHECK(m.shortest == 80.0);
    CHECK(m.longest == 530.0);
    CHECK(close_rel(m.average, 280.0, 1e-9));
}
