#include "spe/pipeline.hpp"

#include <algorithm>
#include <cstdarg>
#include <cstdio>
#include <exception>
#include <fstream>
#include <sstream>

#include "spe/parse.hpp"
#include "spe/report.hpp"

namespace spe {

namespace {

constexpr double kSimAgreementTolerance = 0.05;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelError("cannot read file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string base_name(const std::string& path) {
    const auto pos = path.find_last_of("/\\");
    return pos == std::string::npos ? path : path.substr(pos + 1);
}

[[noreturn]] void fail_step(int step, const std::string& name, const std::string& message) {
    throw ModelError("step " + std::to_string(step) + " (" + name + "): " + message);
}

std::string line(const char* fmt, ...) {
    char buf[256];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof(buf), fmt, args);
    va_end(args);
    return buf;
}

// ---------------------------------------------------------------------------
// structured rendering
// ---------------------------------------------------------------------------

Doc estimate_doc(const Estimate& e) {
    DocMap m;
    m["halfwidth"] = e.half_width;
    m["mean"] = e.mean;
    return {m};
}

Doc sim_doc(const SimMetrics& sim, const SimConfig& cfg) {
    DocMap m;
    DocMap config;
    config["horizon"] = cfg.horizon;
    config["replications"] = static_cast<std::int64_t>(cfg.replications);
    config["seed"] = static_cast<std::int64_t>(cfg.seed);
    config["warmup"] = cfg.warmup;
    m["config"] = {config};
    m["completed_jobs"] = sim.completed_jobs;
    DocList centers;
    for (const auto& [name, cm] : sim.per_center) {
        DocMap c;
        c["center"] = name;
        c["completions"] = sim.center_completions.at(name);
        c["queue_length"] = estimate_doc(cm.queue_length);
        c["residence_time"] = estimate_doc(cm.residence_time);
        c["utilization"] = estimate_doc(cm.utilization);
        centers.push_back({c});
    }
    m["centers"] = centers;
    m["response_time"] = estimate_doc(sim.response_time);
    m["throughput"] = estimate_doc(sim.throughput);
    return {m};
}

Doc system_doc(const SystemMetrics& sys) {
    DocMap m;
    m["bottleneck"] = sys.bottleneck;
    if (sys.bound_demand) m["bound_demand"] = *sys.bound_demand;
    if (sys.bound_population) m["bound_population"] = *sys.bound_population;
    DocList centers;
    for (const auto& [name, cm] : sys.per_center) {
        DocMap c;
        c["center"] = name;
        c["queue_length"] = cm.queue_length;
        c["residence_time"] = cm.residence_time;
        c["utilization"] = cm.utilization;
        centers.push_back({c});
    }
    m["centers"] = centers;
    m["response_time"] = sys.response_time;
    m["throughput"] = sys.throughput;
    return {m};
}

Doc assessment_doc(const AssessmentReport& r) {
    DocMap root;
    root["model"] = base_name(r.model_path);
    root["scenario"] = r.scenario;

    DocList steps;
    for (const auto& s : r.steps) {
        DocMap step;
        step["name"] = s.name;
        step["number"] = static_cast<std::int64_t>(s.number);
        step["status"] = s.status;
        steps.push_back({step});
    }
    root["steps"] = steps;

    DocList collab;
    for (const auto& c : r.collaboration) {
        DocMap entry;
        entry["component"] = c.component;
        entry["in"] = c.in;
        entry["load"] = c.load_score;
        entry["out"] = c.out;
        collab.push_back({entry});
    }
    root["collaboration"] = collab;

    DocMap metrics;
    metrics["average"] = r.path_metrics.average;
    metrics["longest"] = r.path_metrics.longest;
    metrics["shortest"] = r.path_metrics.shortest;
    root["path_metrics"] = {metrics};

    if (r.demands) {
        DocMap demands;
        for (const auto& [device, demand] : r.demands->per_device) demands[device] = demand;
        root["demands"] = {demands};
    }
    if (r.system) root["system"] = system_doc(*r.system);
    if (r.sim) root["simulation"] = sim_doc(*r.sim, r.sim_config.value_or(SimConfig{}));
    if (r.agreement) {
        DocMap agreement;
        agreement["pass"] = r.agreement->pass;
        DocList entries;
        for (const auto& ma : r.agreement->metrics) {
            DocMap e;
            e["analytic"] = ma.analytic;
            e["halfwidth"] = ma.half_width;
            e["metric"] = ma.metric;
            e["pass"] = ma.pass;
            e["simulated"] = ma.simulated;
            entries.push_back({e});
        }
        agreement["metrics"] = entries;
        root["agreement"] = {agreement};
    }

    DocList verdicts;
    for (const auto& v : r.verdicts) {
        DocMap e;
        e["margin"] = v.verdict.margin;
        e["metric"] = metric_name(v.objective.metric);
        e["pass"] = v.verdict.pass;
        e["threshold"] = v.objective.threshold;
        e["value"] = v.value;
        verdicts.push_back({e});
    }
    root["objectives"] = verdicts;
    root["recommendation"] = r.proceed ? "proceed" : "revise";
    return {root};
}

// ---------------------------------------------------------------------------
// text rendering
// ---------------------------------------------------------------------------

std::string text_report(const AssessmentReport& r) {
    std::ostringstream os;
    os << "Assessment of " << base_name(r.model_path) << " (scenario " << r.scenario
       << ")\n";
    os << "--------------------------------------------------------------\n";
    for (const auto& s : r.steps)
        os << line("  step %2d  %-34s %s\n", s.number, s.name.c_str(), s.status.c_str());

    os << "\nPath metrics (time units)\n";
    os << line("  shortest %12s\n", format_number(r.path_metrics.shortest).c_str());
    os << line("  average  %12s\n", format_number(r.path_metrics.average).c_str());
    os << line("  longest  %12s\n", format_number(r.path_metrics.longest).c_str());

    if (!r.collaboration.empty()) {
        os << "\nComponent load ranking (in + out interactions)\n";
        for (const auto& c : r.collaboration)
            os << line("  %-20s load %-6s (in %s, out %s)\n", c.component.c_str(),
                       format_number(c.load_score).c_str(), format_number(c.in).c_str(),
                       format_number(c.out).c_str());
    }
    if (r.demands) {
        os << "\nDevice demands\n";
        for (const auto& [device, demand] : r.demands->per_device)
            os << line("  %-20s %s\n", device.c_str(), format_number(demand).c_str());
    }
    if (r.system) {
        os << "\nSystem model\n";
        os << line("  throughput    %s\n", format_number(r.system->throughput).c_str());
        os << line("  response time %s\n", format_number(r.system->response_time).c_str());
        os << line("  bottleneck    %s\n", r.system->bottleneck.c_str());
        for (const auto& [name, cm] : r.system->per_center)
            os << line("  %-14s U=%-10s R=%-10s Q=%s\n", name.c_str(),
                       format_number(cm.utilization).c_str(),
                       format_number(cm.residence_time).c_str(),
                       format_number(cm.queue_length).c_str());
    }
    if (r.sim) {
        os << "\nSimulation (" << r.sim->completed_jobs << " jobs counted)\n";
        os << line("  throughput    %s +/- %s\n",
                   format_number(r.sim->throughput.mean).c_str(),
                   format_number(r.sim->throughput.half_width).c_str());
        os << line("  response time %s +/- %s\n",
                   format_number(r.sim->response_time.mean).c_str(),
                   format_number(r.sim->response_time.half_width).c_str());
        if (r.agreement)
            os << line("  agreement with analytic model: %s\n",
                       r.agreement->pass ? "pass" : "FAIL");
    }

    os << "\nObjectives\n";
    if (r.verdicts.empty()) os << "  (no objectives)\n";
    for (const auto& v : r.verdicts)
        os << line("  %-8s <= %-10s value %-10s margin %-10s %s\n",
                   metric_name(v.objective.metric),
                   format_number(v.objective.threshold).c_str(),
                   format_number(v.value).c_str(), format_number(v.verdict.margin).c_str(),
                   v.verdict.pass ? "pass" : "FAIL");
    os << "\nRecommendation: " << (r.proceed ? "proceed" : "revise") << "\n";
    return os.str();
}

} // namespace

Workload parse_workload_spec(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    if (colon == std::string::npos || (kind != "open" && kind != "closed"))
        throw ModelError("workload spec must be open:RATE or closed:N,Z, got '" + spec +
                         "'");
    const std::string rest = spec.substr(colon + 1);
    try {
        if (kind == "open") {
            std::size_t used = 0;
            const double rate = std::stod(rest, &used);
            if (used != rest.size()) throw std::invalid_argument(rest);
            return OpenWorkload{rate};
        }
        const auto comma = rest.find(',');
        if (comma == std::string::npos)
            throw ModelError("closed workload spec must be closed:N,Z");
        std::size_t used = 0;
        const std::string n_part = rest.substr(0, comma);
        const std::string z_part = rest.substr(comma + 1);
        const std::int64_t n = std::stoll(n_part, &used);
        if (used != n_part.size()) throw std::invalid_argument(n_part);
        const double z = std::stod(z_part, &used);
        if (used != z_part.size()) throw std::invalid_argument(z_part);
        return ClosedWorkload{n, z};
    } catch (const std::invalid_argument&) {
        throw ModelError("malformed workload spec '" + spec + "'");
    } catch (const std::out_of_range&) {
        throw ModelError("workload spec value out of range in '" + spec + "'");
    }
}

AssessmentReport run_pipeline(const PipelineConfig& cfg) {
    if (cfg.objectives.empty()) throw ModelError("no performance requirements given");
    if (cfg.simulate && !cfg.sim_config)
        throw ModelError("simulation requested without a simulation configuration");

    AssessmentReport report;
    report.model_path = cfg.model_path;

    // Steps 1-2: read the design specification and its scenarios.
    DesignModel model;
    try {
        ParseOptions opts;
        opts.uniform_probs = cfg.uniform_probs;
        model = parse_model(read_file(cfg.model_path), opts);
    } catch (const ParseError& e) {
        fail_step(1, "determine performance scenarios", e.what());
    }
    const auto diags = validate_model(model);
    if (has_errors(diags))
        fail_step(2, "sequence diagrams", "model validation failed\n" +
                                              format_diagnostics(diags));
    if (model.scenarios.empty())
        fail_step(2, "sequence diagrams", "model declares no scenarios");

    const std::string scenario_name =
        cfg.scenario ? *cfg.scenario : model.scenarios.begin()->first;
    auto scenario_it = model.scenarios.find(scenario_name);
    if (scenario_it == model.scenarios.end())
        fail_step(2, "sequence diagrams", "unknown scenario '" + scenario_name + "'");
    report.scenario = scenario_name;
    report.steps.push_back({1, "determine performance scenarios",
                            "done: " + std::to_string(model.scenarios.size()) +
                                " scenario(s)"});

    try {
        report.graph = from_sequence(model, scenario_name, cfg.combine);
    } catch (const ModelError& e) {
        fail_step(2, "sequence diagrams", e.what());
    }
    report.steps.push_back({2, "sequence diagram to execution graph", "done"});

    // Step 3: activity workflow structure.
    if (model.activities.empty()) {
        report.steps.push_back({3, "activity diagrams", "skipped: none declared"});
    } else {
        for (const auto& [name, activity] : model.activities) {
            try {
                const auto g = from_activity(activity);
                const auto gd = validate_graph(g);
                if (has_errors(gd))
                    fail_step(3, "activity diagrams", name + ": " + gd.front().message);
            } catch (const ModelError& e) {
                fail_step(3, "activity diagrams", e.what());
            }
        }
        report.steps.push_back({3, "activity diagrams",
                                "done: " + std::to_string(model.activities.size()) +
                                    " derived"});
    }

    // Step 4: collaboration view of the chosen scenario.
    if (cfg.weighted_collaboration) {
        report.collaboration =
            rank_components(derive_collaboration_weighted(scenario_it->second));
    } else {
        report.collaboration = rank_components(derive_collaboration(scenario_it->second));
    }
    report.steps.push_back({4, "collaboration ranking", "done"});

    // Step 5: solve the software execution model.
    const ExecutionGraph flat = flatten(report.graph);
    try {
        report.path_metrics = solve_static(flat, model.annotations);
    } catch (const ModelError& e) {
        fail_step(5, "software execution model", e.what());
    }
    std::string demand_note = "done";
    if (model.overhead) {
        try {
            report.demands = device_demands(flat, model.annotations, *model.overhead);
        } catch (const ModelError& e) {
            fail_step(5, "software execution model", e.what());
        }
    } else {
        demand_note = "done: no overhead matrix, demands skipped";
    }
    report.steps.push_back({5, "software execution model", demand_note});

    // Step 6: statechart structure.
    if (model.statecharts.empty()) {
        report.steps.push_back({6, "statechart diagrams", "skipped: none declared"});
    } else {
        for (const auto& [name, chart] : model.statecharts) {
            try {
                const auto g = from_statechart(chart);
                (void)g;
            } catch (const ModelError& e) {
                fail_step(6, "statechart diagrams", e.what());
            }
        }
        report.steps.push_back({6, "statechart diagrams",
                                "done: " + std::to_string(model.statecharts.size()) +
                                    " derived"});
    }

    // Step 7: deployment.
    report.steps.push_back(
        {7, "deployment diagram",
         model.deployment ? "done" : "skipped: none declared"});

    // Step 8: system execution model.
    if (!report.demands) {
        report.steps.push_back({8, "system execution model",
                                "skipped: no device demands"});
    } else if (!model.deployment) {
        report.steps.push_back({8, "system execution model",
                                "skipped: no deployment"});
    } else if (!cfg.workload) {
        report.steps.push_back({8, "system execution model",
                                "skipped: no workload given"});
    } else {
        try {
            const QueueingNetwork net = build_network(*report.demands, *model.deployment);
            report.system = solve(net, *cfg.workload);
            if (cfg.simulate) {
                report.sim = simulate(net, *cfg.workload, *cfg.sim_config);
                report.sim_config = cfg.sim_config;
                report.agreement =
                    cross_validate(*report.system, *report.sim, kSimAgreementTolerance);
            }
        } catch (const ModelError& e) {
            fail_step(8, "system execution model", e.what());
        }
        report.steps.push_back({8, "system execution model",
                                cfg.simulate ? "done: solved and simulated" : "done"});
    }

    // Steps 9-10: analyze against the requirements and decide.
    report.proceed = true;
    for (const auto& o : cfg.objectives) {
        ObjectiveVerdict v;
        v.objective = o;
        v.value = metric_value(report.path_metrics, o.metric);
        v.verdict = check_objective(report.path_metrics, o);
        report.proceed = report.proceed && v.verdict.pass;
        report.verdicts.push_back(v);
    }
    report.steps.push_back({9, "analyze performance models", "done"});
    report.steps.push_back({10, "review design against requirements",
                            report.proceed ? "done: proceed" : "done: revise"});
    return report;
}

ComparisonReport compare_alternatives(const std::vector<PipelineConfig>& cfgs) {
    if (cfgs.size() < 2)
        throw ModelError("comparison needs at least two design alternatives");
    for (std::size_t i = 1; i < cfgs.size(); ++i)
        if (!(cfgs[i].objectives == cfgs.front().objectives))
            throw ModelError("design alternatives must share one objective list");

    ComparisonReport report;
    report.reports.resize(cfgs.size());
    std::vector<std::exception_ptr> failures(cfgs.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < static_cast<int>(cfgs.size()); ++i) {
        try {
            report.reports[static_cast<std::size_t>(i)] =
                run_pipeline(cfgs[static_cast<std::size_t>(i)]);
        } catch (...) {
            failures[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (const auto& failure : failures)
        if (failure) std::rethrow_exception(failure);

    report.ranking.resize(cfgs.size());
    for (std::size_t i = 0; i < cfgs.size(); ++i) report.ranking[i] = i;
    auto passed = [&](std::size_t i) {
        std::size_t count = 0;
        for (const auto& v : report.reports[i].verdicts)
            if (v.verdict.pass) ++count;
        return count;
    };
    std::stable_sort(report.ranking.begin(), report.ranking.end(),
                     [&](std::size_t a, std::size_t b) {
                         const auto pa = passed(a), pb = passed(b);
                         if (pa != pb) return pa > pb;
                         const double ra = report.reports[a].path_metrics.average;
                         const double rb = report.reports[b].path_metrics.average;
                         if (ra != rb) return ra < rb;
                         return a < b;
                     });
    return report;
}

std::string render_report(const AssessmentReport& r, OutputFormat format) {
    switch (format) {
        case OutputFormat::structured: return write_doc("assessment", assessment_doc(r));
        case OutputFormat::dot: return to_dot(r.graph);
        case OutputFormat::text: break;
    }
    return text_report(r);
}

std::string render_comparison(const ComparisonReport& r, OutputFormat format) {
    if (format == OutputFormat::structured) {
        DocMap root;
        DocList ranking;
        for (std::size_t idx : r.ranking) {
            const auto& rep = r.reports[idx];
            DocMap e;
            e["alternative"] = static_cast<std::int64_t>(idx);
            e["average"] = rep.path_metrics.average;
            e["model"] = base_name(rep.model_path);
            std::int64_t passed = 0;
            for (const auto& v : rep.verdicts)
                if (v.verdict.pass) ++passed;
            e["passed"] = passed;
            e["recommendation"] = rep.proceed ? "proceed" : "revise";
            ranking.push_back({e});
        }
        root["ranking"] = ranking;
        DocList reports;
        for (const auto& rep : r.reports) reports.push_back(assessment_doc(rep));
        root["reports"] = reports;
        return write_doc("comparison", {root});
    }
    std::ostringstream os;
    os << "Design alternative comparison\n";
    os << "-----------------------------\n";
    int rank = 1;
    for (std::size_t idx : r.ranking) {
        const auto& rep = r.reports[idx];
        std::size_t passed = 0;
        for (const auto& v : rep.verdicts)
            if (v.verdict.pass) ++passed;
        os << line("  #%d  %-28s objectives %zu/%zu  average %-10s %s\n", rank++,
                   base_name(rep.model_path).c_str(), passed, rep.verdicts.size(),
                   format_number(rep.path_metrics.average).c_str(),
                   rep.proceed ? "proceed" : "revise");
    }
    os << '\n';
    for (std::size_t idx : r.ranking) {
        os << text_report(r.reports[idx]);
        os << '\n';
    }
    return os.str();
}

} // namespace spe
