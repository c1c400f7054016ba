// Replication throughput benchmark: the same seeded simulation executed
// with the serial reference loop and with the OpenMP replication kernel.
// Both paths must produce identical metrics; the table reports the speedup.

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <chrono>
#include <cstdio>

#include "spe/report.hpp"
#include "spe/simqnet.hpp"

using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

spe::QueueingNetwork bench_network() {
    spe::QueueingNetwork net;
    net.centers.push_back({"cpu", spe::CenterKind::queueing, spe::SchedulingPolicy::ps, 0.6});
    net.centers.push_back({"disk", spe::CenterKind::queueing, spe::SchedulingPolicy::fcfs, 0.3});
    net.centers.push_back({"net", spe::CenterKind::delay, spe::SchedulingPolicy::delay, 0.2});
    return net;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"serial vs parallel replication benchmark"};
    double horizon = 200000.0;
    int replications = 16;
    std::uint64_t seed = 12345;
    double arrival_rate = 0.9;
    app.add_option("--horizon", horizon, "simulated time per replication");
    app.add_option("--replications", replications, "replication count");
    app.add_option("--seed", seed, "random seed");
    app.add_option("--rate", arrival_rate, "open arrival rate");
    CLI11_PARSE(app, argc, argv);

    const auto net = bench_network();
    const spe::Workload workload = spe::OpenWorkload{arrival_rate};
    spe::SimConfig cfg;
    cfg.horizon = horizon;
    cfg.warmup = spe::default_warmup(horizon);
    cfg.seed = seed;
    cfg.replications = replications;

    std::printf("network: 3 centers (ps, fcfs, delay), open rate %s\n",
                spe::format_number(arrival_rate).c_str());
    std::printf("config: horizon %s, %d replications, seed %llu\n\n",
                spe::format_number(horizon).c_str(), replications,
                static_cast<unsigned long long>(seed));

    auto start = Clock::now();
    const auto serial = spe::simulate_serial(net, workload, cfg);
    const double serial_time = seconds_since(start);

    start = Clock::now();
    const auto parallel = spe::simulate(net, workload, cfg);
    const double parallel_time = seconds_since(start);

    int threads = 1;
#ifdef _OPENMP
#pragma omp parallel
#pragma omp single
    threads = omp_get_num_threads();
#endif

    std::printf("%-10s %12s %14s\n", "path", "seconds", "jobs counted");
    std::printf("%-10s %12.3f %14lld\n", "serial", serial_time,
                static_cast<long long>(serial.completed_jobs));
    std::printf("%-10s %12.3f %14lld   (%d thread%s)\n", "parallel", parallel_time,
                static_cast<long long>(parallel.completed_jobs), threads,
                threads == 1 ? "" : "s");
    std::printf("\nspeedup: %.2fx\n", serial_time / parallel_time);

    if (!(serial == parallel)) {
        std::printf("MISMATCH: parallel metrics differ from the serial reference\n");
        return 1;
    }
    std::printf("parallel metrics identical to serial reference: ok\n");
    return 0;
}
