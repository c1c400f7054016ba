#include <doctest.h>

#include <cmath>

#include "spe/simqnet.hpp"
#include "support/generators.hpp"
#include "support/testutil.hpp"

using namespace spe;
using namespace spe::test;

namespace {

QueueingNetwork mm1() {
    QueueingNetwork net;
    net.centers.push_back({"only", CenterKind::queueing, SchedulingPolicy::fcfs, 1.0});
    return net;
}

QueueingNetwork two_center() {
    QueueingNetwork net;
    net.centers.push_back({"a", CenterKind::queueing, SchedulingPolicy::fcfs, 1.0});
    net.centers.push_back({"b", CenterKind::queueing, SchedulingPolicy::fcfs, 2.0});
    return net;
}

} // namespace

TEST_CASE("simulate: fixed seed reproduces bit-identical metrics") {
    SimConfig cfg{5000.0, 500.0, 42, 4};
    const Workload w = OpenWorkload{0.5};
    const auto first = simulate(mm1(), w, cfg);
    const auto second = simulate(mm1(), w, cfg);
    CHECK(first == second);

    SimConfig other = cfg;
    other.seed = 43;
    CHECK(simulate(mm1(), w, other) != first);
}

TEST_CASE("simulate: parallel and serial replication paths agree exactly") {
    SimConfig cfg{20000.0, 2000.0, 7, 8};
    const Workload open = OpenWorkload{0.5};
    CHECK(simulate(mm1(), open, cfg) == simulate_serial(mm1(), open, cfg));

    const Workload closed = ClosedWorkload{2, 0.0};
    CHECK(simulate(two_center(), closed, cfg) ==
          simulate_serial(two_center(), closed, cfg));
}

TEST_CASE("simulate: M/M/1 converges to the closed form") {
    SimConfig cfg{200000.0, 20000.0, 1, 5};
    const auto sim = simulate(mm1(), OpenWorkload{0.5}, cfg);
    CHECK(sim.per_center.at("only").utilization.mean == doctest::Approx(0.5).epsilon(0.02));
    CHECK(sim.per_center.at("only").residence_time.mean ==
          doctest::Approx(2.0).epsilon(0.05));
    CHECK(sim.throughput.mean == doctest::Approx(0.5).epsilon(0.02));
    CHECK(sim.completed_jobs > 0);
}

TEST_CASE("simulate: processor sharing matches the product-form residence") {
    QueueingNetwork net;
    net.centers.push_back({"shared", CenterKind::queueing, SchedulingPolicy::ps, 1.0});
    SimConfig cfg{200000.0, 20000.0, 11, 5};
    const auto sim = simulate(net, OpenWorkload{0.5}, cfg);
    CHECK(sim.per_center.at("shared").residence_time.mean ==
          doctest::Approx(2.0).epsilon(0.05));
    CHECK(sim.per_center.at("shared").utilization.mean ==
          doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("simulate: delay center behaves as pure latency") {
    QueueingNetwork net;
    net.centers.push_back({"wire", CenterKind::delay, SchedulingPolicy::delay, 3.0});
    SimConfig cfg{100000.0, 10000.0, 3, 5};
    const auto sim = simulate(net, OpenWorkload{0.8}, cfg);
    CHECK(sim.per_center.at("wire").residence_time.mean ==
          doctest::Approx(3.0).epsilon(0.05));
    CHECK(sim.per_center.at("wire").queue_length.mean ==
          doctest::Approx(2.4).epsilon(0.05));
}

TEST_CASE("simulate: open two-center run confirms the analytic formulas") {
    QueueingNetwork net;
    net.centers.push_back({"a", CenterKind::queueing, SchedulingPolicy::fcfs, 0.4});
    net.centers.push_back({"b", CenterKind::queueing, SchedulingPolicy::fcfs, 0.25});
    const auto analytic = solve_open(net, 2.0);
    SimConfig cfg{200000.0, 20000.0, 21, 5};
    const auto sim = simulate(net, OpenWorkload{2.0}, cfg);
    const auto agreement = cross_validate(analytic, sim, 0.05);
    CHECK(agreement.pass);
    CHECK(sim.response_time.mean == doctest::Approx(2.5).epsilon(0.05));
}

TEST_CASE("simulate: closed two-center run approaches the MVA solution") {
    SimConfig cfg{200000.0, 20000.0, 5, 5};
    const auto sim = simulate(two_center(), ClosedWorkload{2, 0.0}, cfg);
    CHECK(sim.response_time.mean == doctest::Approx(14.0 / 3.0).epsilon(0.05));
    CHECK(sim.throughput.mean == doctest::Approx(3.0 / 7.0).epsilon(0.05));
}

TEST_CASE("simulate: closed workload with think time obeys Little's law") {
    SimConfig cfg{100000.0, 10000.0, 9, 5};
    const auto sim = simulate(two_center(), ClosedWorkload{3, 5.0}, cfg);
    const double n = sim.throughput.mean * (sim.response_time.mean + 5.0);
    CHECK(n == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("simulate: conservation of counted completions") {
    SimConfig cfg{20000.0, 1000.0, 17, 3};
    const auto sim = simulate(two_center(), ClosedWorkload{2, 0.0}, cfg);
    for (const auto& [name, count] : sim.center_completions)
        CHECK(count == sim.completed_jobs);
}

TEST_CASE("simulate: invalid configurations are rejected") {
    SimConfig bad{1000.0, 1000.0, 1, 2}; // warmup == horizon
    CHECK_THROWS_WITH_AS(simulate(mm1(), OpenWorkload{0.5}, bad),
                         doctest::Contains("warmup"), ModelError);
    SimConfig cfg{1000.0, 100.0, 1, 0};
    CHECK_THROWS_AS(simulate(mm1(), OpenWorkload{0.5}, cfg), ModelError);
    SimConfig ok{1000.0, 100.0, 1, 1};
    CHECK_THROWS_WITH_AS(simulate(mm1(), OpenWorkload{1.5}, ok),
                         doctest::Contains("saturated"), ModelError);
}

TEST_CASE("cross_validate: self-comparison and center mismatches") {
    SystemMetrics analytic;
    analytic.per_center["only"] = {0.5, 2.0, 1.0};
    analytic.throughput = 0.5;
    analytic.response_time = 2.0;
    analytic.bottleneck = "only";

    SimMetrics self;
    self.per_center["only"] = {{0.5, 0.0}, {2.0, 0.0}, {1.0, 0.0}};
    self.throughput = {0.5, 0.0};
    self.response_time = {2.0, 0.0};
    const auto agree = cross_validate(analytic, self, 0.0);
    CHECK(agree.pass);
    for (const auto& m : agree.metrics) CHECK(m.pass);

    SimMetrics renamed = self;
    renamed.per_center.clear();
    renamed.per_center["other"] = {{0.5, 0.0}, {2.0, 0.0}, {1.0, 0.0}};
    CHECK_THROWS_AS(cross_validate(analytic, renamed, 0.0), ModelError);
}

TEST_CASE("cross_validate: tolerance and confidence interval act as slack") {
    SystemMetrics analytic;
    analytic.per_center["only"] = {0.5, 2.0, 1.0};
    analytic.throughput = 0.5;
    analytic.response_time = 2.0;

    SimMetrics sim;
    sim.per_center["only"] = {{0.52, 0.0}, {2.0, 0.0}, {1.0, 0.0}};
    sim.throughput = {0.5, 0.0};
    sim.response_time = {2.0, 0.0};
    CHECK(!cross_validate(analytic, sim, 0.01).pass);
    CHECK(cross_validate(analytic, sim, 0.05).pass);
    sim.per_center["only"].utilization.half_width = 0.05;
    CHECK(cross_validate(analytic, sim, 0.01).pass);
}

TEST_CASE("student t quantiles") {
    CHECK(student_t_975(1) == doctest::Approx(12.7062).epsilon(1e-4));
    CHECK(student_t_975(9) == doctest::Approx(2.26216).epsilon(1e-4));
    CHECK(student_t_975(30) == doctest::Approx(2.04227).epsilon(1e-4));
    CHECK(student_t_975(120) == doctest::Approx(1.9799).epsilon(1e-3));
}

TEST_CASE("simulate: single replication yields zero half widths") {
    SimConfig cfg{5000.0, 500.0, 2, 1};
    const auto sim = simulate(mm1(), OpenWorkload{0.5}, cfg);
    CHECK(sim.throughput.half_width == 0.0);
    CHECK(sim.per_center.at("only").utilization.half_width == 0.0);
}
