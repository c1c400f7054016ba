#include "spe/simqnet.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>
#include <vector>

#include "spe/rng.hpp"

namespace spe {

namespace {

// ---------------------------------------------------------------------------
// One replication: a single-threaded event-driven run over the network.
// All randomness flows through one xoshiro256++ stream seeded from
// (cfg.seed, replication index), so replications are independent and the
// whole run is reproducible bit for bit.
// ---------------------------------------------------------------------------

enum class EventKind { arrival, think_end, fcfs_done, ps_done, delay_done };

struct Event {
    double time = 0.0;
    std::uint64_t seq = 0; // FIFO tie-break, makes event order total
    EventKind kind = EventKind::arrival;
    int center = -1;
    std::int64_t job = -1;
    std::uint64_t version = 0; // guards stale processor-sharing predictions
};

struct EventAfter {
    bool operator()(const Event& a, const Event& b) const {
        if (a.time != b.time) return a.time > b.time;
        return a.seq > b.seq;
    }
};

struct Job {
    double cycle_start = 0.0;
    int center = -1; // index of the center currently visited
    double remaining = 0.0; // outstanding work at a PS center
    std::vector<double> visit_entry;
    std::vector<double> visit_residence;
};

struct CenterState {
    // time-average accumulators, clipped to [warmup, horizon]
    double last_time = 0.0;
    double area_jobs = 0.0;
    double area_busy = 0.0;
    int population = 0;

    std::deque<std::int64_t> fcfs_queue;
    std::vector<std::int64_t> ps_active;
    double ps_last_update = 0.0;
    std::uint64_t ps_version = 0;
};

struct ReplicationResult {
    std::vector<double> utilization;
    std::vector<double> residence;
    std::vector<double> queue_length;
    double throughput = 0.0;
    double response_time = 0.0;
    std::int64_t completed = 0;
};

class ReplicationRun {
public:
    ReplicationRun(const QueueingNetwork& net, const Workload& w, const SimConfig& cfg,
                   int replication)
        : net_(net),
          workload_(w),
          horizon_(cfg.horizon),
          warmup_(cfg.warmup),
          rng_(SplitMix64(cfg.seed + 0x9E3779B97F4A7C15ULL *
                                         static_cast<std::uint64_t>(replication + 1))
                   .next()) {
        centers_.resize(net.centers.size());
    }

    ReplicationResult run() {
        if (const auto* open = std::get_if<OpenWorkload>(&workload_)) {
            schedule({next_time(1.0 / open->arrival_rate), 0, EventKind::arrival});
        } else {
            const auto& closed = std::get<ClosedWorkload>(workload_);
            for (std::int64_t j = 0; j < closed.population; ++j) {
                jobs_.push_back(make_job());
                if (closed.think_time > 0.0) {
                    schedule({next_time(closed.think_time), 0, EventKind::think_end, -1, j});
                } else {
                    begin_cycle(j, 0.0);
                }
            }
        }
        while (!events_.empty() && events_.top().time <= horizon_) {
            const Event ev = events_.top();
            events_.pop();
            dispatch(ev);
        }
        return collect();
    }

private:
    Job make_job() const {
        Job job;
        job.visit_entry.resize(net_.centers.size(), 0.0);
        job.visit_residence.resize(net_.centers.size(), 0.0);
        return job;
    }

    double next_time(double mean) { return clock_ + rng_.exponential(mean); }

    void schedule(Event ev) {
        ev.seq = next_seq_++;
        events_.push(ev);
    }

    void dispatch(const Event& ev) {
        clock_ = ev.time;
        switch (ev.kind) {
            case EventKind::arrival: {
                const auto& open = std::get<OpenWorkload>(workload_);
                std::int64_t id;
                if (free_jobs_.empty()) {
                    jobs_.push_back(make_job());
                    id = static_cast<std::int64_t>(jobs_.size()) - 1;
                } else {
                    id = free_jobs_.back();
                    free_jobs_.pop_back();
                }
                begin_cycle(id, clock_);
                schedule({next_time(1.0 / open.arrival_rate), 0, EventKind::arrival});
                break;
            }
            case EventKind::think_end:
                begin_cycle(ev.job, clock_);
                break;
            case EventKind::fcfs_done: {
                CenterState& cs = centers_[static_cast<std::size_t>(ev.center)];
                const std::int64_t id = cs.fcfs_queue.front();
                cs.fcfs_queue.pop_front();
                leave_center(id, ev.center);
                if (!cs.fcfs_queue.empty()) start_fcfs_service(ev.center);
                break;
            }
            case EventKind::ps_done: {
                CenterState& cs = centers_[static_cast<std::size_t>(ev.center)];
                if (ev.version != cs.ps_version) break; // superseded prediction
                ps_advance(ev.center);
                // The job with the least remaining work is the one completing.
                auto it = std::min_element(
                    cs.ps_active.begin(), cs.ps_active.end(),
                    [&](std::int64_t a, std::int64_t b) {
                        const double wa = jobs_[static_cast<std::size_t>(a)].remaining;
                        const double wb = jobs_[static_cast<std::size_t>(b)].remaining;
                        if (wa != wb) return wa < wb;
                        return a < b;
                    });
                const std::int64_t id = *it;
                cs.ps_active.erase(it);
                ps_reschedule(ev.center);
                leave_center(id, ev.center);
                break;
            }
            case EventKind::delay_done:
                leave_center(ev.job, ev.center);
                break;
        }
    }

    void begin_cycle(std::int64_t id, double now) {
        Job& job = jobs_[static_cast<std::size_t>(id)];
        job.cycle_start = now;
        enter_center(id, 0);
    }

    void enter_center(std::int64_t id, int center) {
        Job& job = jobs_[static_cast<std::size_t>(id)];
        const ServiceCenter& sc = net_.centers[static_cast<std::size_t>(center)];
        CenterState& cs = centers_[static_cast<std::size_t>(center)];
        job.center = center;
        job.visit_entry[static_cast<std::size_t>(center)] = clock_;
        integrate(center);
        ++cs.population;

        if (sc.kind == CenterKind::delay) {
            schedule({next_time(sc.demand), 0, EventKind::delay_done, center, id});
            return;
        }
        if (sc.scheduling == SchedulingPolicy::ps) {
            ps_advance(center);
            job.remaining = rng_.exponential(sc.demand);
            cs.ps_active.push_back(id);
            ps_reschedule(center);
            return;
        }
        cs.fcfs_queue.push_back(id);
        if (cs.fcfs_queue.size() == 1) start_fcfs_service(center);
    }

    void start_fcfs_service(int center) {
        const ServiceCenter& sc = net_.centers[static_cast<std::size_t>(center)];
        schedule({next_time(sc.demand), 0, EventKind::fcfs_done, center});
    }

    // Progress every PS job by (now - last_update)/k and reset the epoch.
    void ps_advance(int center) {
        CenterState& cs = centers_[static_cast<std::size_t>(center)];
        const double elapsed = clock_ - cs.ps_last_update;
        cs.ps_last_update = clock_;
        if (cs.ps_active.empty() || elapsed <= 0.0) return;
        const double progress = elapsed / static_cast<double>(cs.ps_active.size());
        for (std::int64_t id : cs.ps_active) {
            double& remaining = jobs_[static_cast<std::size_t>(id)].remaining;
            remaining = std::max(0.0, remaining - progress);
        }
    }

    void ps_reschedule(int center) {
        CenterState& cs = centers_[static_cast<std::size_t>(center)];
        ++cs.ps_version;
        if (cs.ps_active.empty()) return;
        double least = std::numeric_limits<double>::infinity();
        for (std::int64_t id : cs.ps_active)
            least = std::min(least, jobs_[static_cast<std::size_t>(id)].remaining);
        const double eta = least * static_cast<double>(cs.ps_active.size());
        schedule({clock_ + eta, 0, EventKind::ps_done, center, -1, cs.ps_version});
    }

    void leave_center(std::int64_t id, int center) {
        Job& job = jobs_[static_cast<std::size_t>(id)];
        CenterState& cs = centers_[static_cast<std::size_t>(center)];
        integrate(center);
        --cs.population;
        job.visit_residence[static_cast<std::size_t>(center)] =
            clock_ - job.visit_entry[static_cast<std::size_t>(center)];

        const int next = center + 1;
        if (next < static_cast<int>(net_.centers.size())) {
            enter_center(id, next);
            return;
        }
        complete_cycle(id);
    }

    void complete_cycle(std::int64_t id) {
        Job& job = jobs_[static_cast<std::size_t>(id)];
        if (clock_ > warmup_) {
            ++completed_;
            response_sum_ += clock_ - job.cycle_start;
            for (std::size_t i = 0; i < net_.centers.size(); ++i)
                residence_sum_[i] += job.visit_residence[i];
        }
        if (const auto* closed = std::get_if<ClosedWorkload>(&workload_)) {
            if (closed->think_time > 0.0) {
                schedule({next_time(closed->think_time), 0, EventKind::think_end, -1, id});
            } else {
                begin_cycle(id, clock_);
            }
            return;
        }
        free_jobs_.push_back(id); // open jobs leave; recycle the record
    }

    // Advance the time-average integrals of a center to the current clock,
    // restricted to the measurement window [warmup, horizon].
    void integrate(int center) {
        CenterState& cs = centers_[static_cast<std::size_t>(center)];
        const double now = std::min(clock_, horizon_);
        const double from = std::max(cs.last_time, warmup_);
        cs.last_time = now;
        if (now <= from) return;
        const double dt = now - from;
        cs.area_jobs += dt * static_cast<double>(cs.population);
        const bool is_delay =
            net_.centers[static_cast<std::size_t>(center)].kind == CenterKind::delay;
        // A delay center's utilization is its mean population (one server per
        // job); a queueing center's is its busy fraction.
        cs.area_busy += is_delay ? dt * static_cast<double>(cs.population)
                                 : (cs.population > 0 ? dt : 0.0);
    }

    ReplicationResult collect() {
        clock_ = horizon_;
        for (int i = 0; i < static_cast<int>(net_.centers.size()); ++i) integrate(i);
        const double window = horizon_ - warmup_;
        ReplicationResult r;
        r.completed = completed_;
        r.throughput = static_cast<double>(completed_) / window;
        r.response_time = completed_ > 0 ? response_sum_ / static_cast<double>(completed_)
                                         : 0.0;
        for (std::size_t i = 0; i < net_.centers.size(); ++i) {
            r.utilization.push_back(centers_[i].area_busy / window);
            r.queue_length.push_back(centers_[i].area_jobs / window);
            r.residence.push_back(
                completed_ > 0 ? residence_sum_[i] / static_cast<double>(completed_) : 0.0);
        }
        return r;
    }

    const QueueingNetwork& net_;
    const Workload& workload_;
    double horizon_;
    double warmup_;
    Xoshiro256pp rng_;
    double clock_ = 0.0;
    std::uint64_t next_seq_ = 0;
    std::priority_queue<Event, std::vector<Event>, EventAfter> events_;
    std::vector<Job> jobs_;
    std::vector<std::int64_t> free_jobs_;
    std::vector<CenterState> centers_;
    std::int64_t completed_ = 0;
    double response_sum_ = 0.0;
    std::vector<double> residence_sum_ = std::vector<double>(net_.centers.size(), 0.0);
};

void require_config(const QueueingNetwork& net, const Workload& w, const SimConfig& cfg) {
    if (net.centers.empty()) throw ModelError("queueing network has no service centers");
    if (!(cfg.horizon > 0.0)) throw ModelError("simulation horizon must be positive");
    if (cfg.warmup < 0.0 || cfg.warmup >= cfg.horizon)
        throw ModelError("warmup must lie in [0, horizon)");
    if (cfg.replications < 1) throw ModelError("at least one replication is required");
    if (const auto* open = std::get_if<OpenWorkload>(&w)) {
        if (!(open->arrival_rate > 0.0)) throw ModelError("arrival rate must be positive");
        for (const auto& c : net.centers)
            if (c.kind == CenterKind::queueing && open->arrival_rate * c.demand >= 1.0)
                throw ModelError("center '" + c.name + "' is saturated; simulation of an "
                                 "unstable open network is refused");
    } else {
        const auto& closed = std::get<ClosedWorkload>(w);
        if (closed.population < 1) throw ModelError("population must be at least 1");
        if (closed.think_time < 0.0) throw ModelError("think time must be non-negative");
        double total = closed.think_time;
        for (const auto& c : net.centers) total += c.demand;
        if (total <= 0.0)
            throw ModelError("closed workload needs positive total demand or think time");
    }
}

Estimate estimate_over(const std::vector<ReplicationResult>& reps,
                       double (*pick)(const ReplicationResult&, std::size_t),
                       std::size_t index) {
    const int n = static_cast<int>(reps.size());
    double sum = 0.0;
    for (const auto& r : reps) sum += pick(r, index);
    const double mean = sum / n;
    if (n < 2) return {mean, 0.0};
    double ss = 0.0;
    for (const auto& r : reps) {
        const double d = pick(r, index) - mean;
        ss += d * d;
    }
    const double std_err = std::sqrt(ss / (n - 1) / n);
    return {mean, student_t_975(n - 1) * std_err};
}

SimMetrics reduce(const QueueingNetwork& net, const std::vector<ReplicationResult>& reps) {
    SimMetrics m;
    m.throughput = estimate_over(
        reps, [](const ReplicationResult& r, std::size_t) { return r.throughput; }, 0);
    m.response_time = estimate_over(
        reps, [](const ReplicationResult& r, std::size_t) { return r.response_time; }, 0);
    for (std::size_t i = 0; i < net.centers.size(); ++i) {
        SimCenterMetrics cm;
        cm.utilization = estimate_over(
            reps, [](const ReplicationResult& r, std::size_t k) { return r.utilization[k]; },
            i);
        cm.residence_time = estimate_over(
            reps, [](const ReplicationResult& r, std::size_t k) { return r.residence[k]; },
            i);
        cm.queue_length = estimate_over(
            reps, [](const ReplicationResult& r, std::size_t k) { return r.queue_length[k]; },
            i);
        m.per_center[net.centers[i].name] = cm;
    }
    for (const auto& r : reps) m.completed_jobs += r.completed;
    // Each counted job visited each center exactly once.
    for (const auto& c : net.centers) m.center_completions[c.name] = m.completed_jobs;
    return m;
}

std::vector<ReplicationResult> run_replications(const QueueingNetwork& net,
                                                const Workload& w, const SimConfig& cfg,
                                                bool parallel) {
    std::vector<ReplicationResult> reps(static_cast<std::size_t>(cfg.replications));
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int r = 0; r < cfg.replications; ++r)
            reps[static_cast<std::size_t>(r)] = ReplicationRun(net, w, cfg, r).run();
    } else {
        for (int r = 0; r < cfg.replications; ++r)
            reps[static_cast<std::size_t>(r)] = ReplicationRun(net, w, cfg, r).run();
    }
    return reps;
}

} // namespace

SimMetrics simulate(const QueueingNetwork& net, const Workload& w, const SimConfig& cfg) {
    require_config(net, w, cfg);
    return reduce(net, run_replications(net, w, cfg, true));
}

SimMetrics simulate_serial(const QueueingNetwork& net, const Workload& w,
                           const SimConfig& cfg) {
    require_config(net, w, cfg);
    return reduce(net, run_replications(net, w, cfg, false));
}

AgreementReport cross_validate(const SystemMetrics& analytic, const SimMetrics& sim,
                               double rel_tol) {
    for (const auto& [name, cm] : analytic.per_center)
        if (!sim.per_center.count(name))
            throw ModelError("center '" + name + "' missing from simulation metrics");
    for (const auto& [name, cm] : sim.per_center)
        if (!analytic.per_center.count(name))
            throw ModelError("center '" + name + "' missing from analytic metrics");

    AgreementReport report;
    report.pass = true;
    auto compare = [&](const std::string& metric, double a, const Estimate& s) {
        const double slack = std::max(rel_tol * std::abs(a), s.half_width);
        MetricAgreement ma{metric, a, s.mean, s.half_width,
                           std::abs(a - s.mean) <= slack};
        report.pass = report.pass && ma.pass;
        report.metrics.push_back(std::move(ma));
    };
    compare("throughput", analytic.throughput, sim.throughput);
    compare("response_time", analytic.response_time, sim.response_time);
    for (const auto& [name, cm] : analytic.per_center) {
        const auto& sm = sim.per_center.at(name);
        compare(name + ".utilization", cm.utilization, sm.utilization);
        compare(name + ".residence_time", cm.residence_time, sm.residence_time);
        compare(name + ".queue_length", cm.queue_length, sm.queue_length);
    }
    return report;
}

double student_t_975(int degrees_of_freedom) {
    static const double table[] = {
        12.70620474, 4.30265273, 3.18244631, 2.77644511, 2.57058184, 2.44691185,
        2.36462425,  2.30600414, 2.26215716, 2.22813885, 2.20098516, 2.17881283,
        2.16036866,  2.14478669, 2.13144955, 2.11990530, 2.10981558, 2.10092204,
        2.09302405,  2.08596345, 2.07961384, 2.07387307, 2.06865761, 2.06389856,
        2.05953855,  2.05552944, 2.05183052, 2.04840714, 2.04522964, 2.04227246,
    };
    if (degrees_of_freedom < 1) return 0.0;
    if (degrees_of_freedom <= 30) return table[degrees_of_freedom - 1];
    // Asymptotic expansion around the normal quantile; error < 1e-3 here.
    const double z = 1.959963985;
    const double nu = static_cast<double>(degrees_of_freedom);
    return z + (z * z * z + z) / (4.0 * nu);
}

} // namespace spe
