// Command line front end for the performance assessment toolkit.
//
// Exit codes: 0 all objectives met (or command succeeded), 1 objectives
// failed, 2 input or validation error.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "spe/parse.hpp"
#include "spe/pipeline.hpp"
#include "spe/report.hpp"

namespace {

struct CommonOptions {
    std::string model_path;
    std::optional<std::string> scenario;
    std::vector<std::string> combine_specs;
    bool uniform_probs = false;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw spe::ModelError("cannot read file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

spe::CombineRules parse_combine_specs(const std::vector<std::string>& specs) {
    spe::CombineRules rules;
    for (const auto& spec : specs) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos)
            throw spe::ModelError("combine rule must be NAME=action,action,... got '" +
                                  spec + "'");
        spe::CombineGroup group;
        group.name = spec.substr(0, eq);
        std::string rest = spec.substr(eq + 1);
        std::size_t start = 0;
        while (start <= rest.size()) {
            const auto comma = rest.find(',', start);
            const std::string item = rest.substr(
                start, comma == std::string::npos ? std::string::npos : comma - start);
            if (!item.empty()) group.actions.push_back(item);
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (group.name.empty() || group.actions.empty())
            throw spe::ModelError("combine rule must be NAME=action,action,... got '" +
                                  spec + "'");
        rules.groups.push_back(std::move(group));
    }
    return rules;
}

spe::DesignModel load_model(const CommonOptions& opts) {
    spe::ParseOptions popts;
    popts.uniform_probs = opts.uniform_probs;
    return spe::parse_model(read_file(opts.model_path), popts);
}

/// Validated model + the scenario the command operates on.
std::string pick_scenario(const spe::DesignModel& model, const CommonOptions& opts) {
    if (model.scenarios.empty()) throw spe::ModelError("model declares no scenarios");
    const std::string name =
        opts.scenario ? *opts.scenario : model.scenarios.begin()->first;
    if (!model.scenarios.count(name))
        throw spe::ModelError("unknown scenario '" + name + "'");
    return name;
}

void require_valid(const spe::DesignModel& model) {
    const auto diags = spe::validate_model(model);
    if (spe::has_errors(diags))
        throw spe::ModelError("model validation failed\n" +
                              spe::format_diagnostics(diags));
}

spe::OutputFormat parse_format(const std::string& name) {
    if (name == "text") return spe::OutputFormat::text;
    if (name == "structured") return spe::OutputFormat::structured;
    if (name == "dot") return spe::OutputFormat::dot;
    throw spe::ModelError("unknown output format '" + name + "'");
}

spe::Doc path_metrics_doc(const spe::PathMetrics& m) {
    spe::DocMap doc;
    doc["average"] = m.average;
    doc["longest"] = m.longest;
    doc["shortest"] = m.shortest;
    return {doc};
}

spe::Doc system_metrics_doc(const spe::SystemMetrics& m) {
    spe::DocMap doc;
    doc["bottleneck"] = m.bottleneck;
    if (m.bound_demand) doc["bound_demand"] = *m.bound_demand;
    if (m.bound_population) doc["bound_population"] = *m.bound_population;
    spe::DocList centers;
    for (const auto& [name, cm] : m.per_center) {
        spe::DocMap c;
        c["center"] = name;
        c["queue_length"] = cm.queue_length;
        c["residence_time"] = cm.residence_time;
        c["utilization"] = cm.utilization;
        centers.push_back({c});
    }
    doc["centers"] = centers;
    doc["response_time"] = m.response_time;
    doc["throughput"] = m.throughput;
    return {doc};
}

spe::Doc estimate_doc(const spe::Estimate& e) {
    spe::DocMap m;
    m["halfwidth"] = e.half_width;
    m["mean"] = e.mean;
    return {m};
}

spe::Doc sim_metrics_doc(const spe::SimMetrics& sim, const spe::SimConfig& cfg) {
    spe::DocMap doc;
    spe::DocMap config;
    config["horizon"] = cfg.horizon;
    config["replications"] = static_cast<std::int64_t>(cfg.replications);
    config["seed"] = static_cast<std::int64_t>(cfg.seed);
    config["warmup"] = cfg.warmup;
    doc["config"] = {config};
    doc["completed_jobs"] = sim.completed_jobs;
    spe::DocList centers;
    for (const auto& [name, cm] : sim.per_center) {
        spe::DocMap c;
        c["center"] = name;
        c["completions"] = sim.center_completions.at(name);
        c["queue_length"] = estimate_doc(cm.queue_length);
        c["residence_time"] = estimate_doc(cm.residence_time);
        c["utilization"] = estimate_doc(cm.utilization);
        centers.push_back({c});
    }
    doc["centers"] = centers;
    doc["response_time"] = estimate_doc(sim.response_time);
    doc["throughput"] = estimate_doc(sim.throughput);
    return {doc};
}

/// demands + deployment -> network, shared by solve-system and simulate.
spe::QueueingNetwork build_network_for(const spe::DesignModel& model,
                                       const std::string& scenario,
                                       const spe::CombineRules& combine) {
    if (!model.overhead)
        throw spe::ModelError("model has no overhead matrix; cannot build demands");
    if (!model.deployment)
        throw spe::ModelError("model has no deployment; cannot build the system model");
    const auto graph =
        spe::flatten(spe::from_sequence(model, scenario, combine));
    const auto demands = spe::device_demands(graph, model.annotations, *model.overhead);
    return spe::build_network(demands, *model.deployment);
}

int run(int argc, char** argv) {
    CLI::App app{"Design-time software performance assessment toolkit"};
    app.require_subcommand(1);

    CommonOptions common;
    std::string workload_spec;
    std::string objectives_path;
    std::string format_name = "text";
    bool dot = false;
    bool flatten_graph = false;
    bool do_simulate = false;
    bool weighted_collab = false;
    spe::SimConfig sim_cfg;
    sim_cfg.horizon = 100000.0;
    sim_cfg.warmup = -1.0; // filled with the 10% default when unset
    sim_cfg.seed = 1;
    sim_cfg.replications = 5;
    std::vector<std::string> compare_models;

    auto add_common = [&](CLI::App* cmd, bool with_scenario = true) {
        cmd->add_option("model", common.model_path, "model document")->required();
        if (with_scenario)
            cmd->add_option("--scenario", [&](const std::vector<std::string>& v) {
                common.scenario = v.front();
                return true;
            }, "root scenario (default: first by name)");
        cmd->add_option("--combine", common.combine_specs,
                        "merge rule NAME=action,action,... (repeatable)");
        cmd->add_flag("--uniform-probs", common.uniform_probs,
                      "fill omitted branch probabilities uniformly");
    };

    auto* validate_cmd = app.add_subcommand("validate", "check a model document");
    add_common(validate_cmd, false);

    auto* derive_cmd = app.add_subcommand("derive", "derive the execution graph");
    add_common(derive_cmd);
    derive_cmd->add_flag("--dot", dot, "emit DOT instead of the canonical graph form");
    derive_cmd->add_flag("--flatten", flatten_graph, "inline expanded nodes");
    std::string from_activity_name, from_statechart_name;
    derive_cmd->add_option("--activity", from_activity_name,
                           "derive from this activity model instead");
    derive_cmd->add_option("--statechart", from_statechart_name,
                           "derive from this statechart instead");

    auto* static_cmd = app.add_subcommand("solve-static", "solve the software model");
    add_common(static_cmd);
    static_cmd->add_option("--format", format_name, "text or structured");

    auto* system_cmd = app.add_subcommand("solve-system", "solve the system model");
    add_common(system_cmd);
    system_cmd->add_option("--workload", workload_spec, "open:RATE or closed:N,Z")
        ->required();
    system_cmd->add_option("--format", format_name, "text or structured");

    auto* simulate_cmd = app.add_subcommand("simulate", "simulate the system model");
    add_common(simulate_cmd);
    simulate_cmd->add_option("--workload", workload_spec, "open:RATE or closed:N,Z")
        ->required();
    simulate_cmd->add_option("--seed", sim_cfg.seed, "random seed");
    simulate_cmd->add_option("--horizon", sim_cfg.horizon, "simulated time per replication");
    simulate_cmd->add_option("--warmup", sim_cfg.warmup, "warmup time (default 10%)");
    simulate_cmd->add_option("--replications", sim_cfg.replications, "replication count");

    auto* analyze_cmd = app.add_subcommand("analyze", "run the full assessment pipeline");
    add_common(analyze_cmd);
    analyze_cmd->add_option("--objectives", objectives_path, "objectives document")
        ->required();
    analyze_cmd->add_option("--workload", workload_spec, "open:RATE or closed:N,Z");
    analyze_cmd->add_flag("--simulate", do_simulate, "cross-check with the simulator");
    analyze_cmd->add_option("--seed", sim_cfg.seed, "simulation seed");
    analyze_cmd->add_option("--horizon", sim_cfg.horizon, "simulation horizon");
    analyze_cmd->add_option("--warmup", sim_cfg.warmup, "simulation warmup");
    analyze_cmd->add_option("--replications", sim_cfg.replications, "replications");
    analyze_cmd->add_flag("--weighted-collab", weighted_collab,
                          "use execution-weighted interaction counts");
    analyze_cmd->add_option("--format", format_name, "text, structured or dot");

    auto* compare_cmd = app.add_subcommand("compare", "compare design alternatives");
    compare_cmd->add_option("models", compare_models, "model documents")
        ->required()
        ->expected(-1);
    compare_cmd->add_option("--objectives", objectives_path, "objectives document")
        ->required();
    compare_cmd->add_option("--workload", workload_spec, "open:RATE or closed:N,Z");
    compare_cmd->add_option("--scenario", [&](const std::vector<std::string>& v) {
        common.scenario = v.front();
        return true;
    }, "root scenario for every alternative");
    compare_cmd->add_flag("--uniform-probs", common.uniform_probs,
                          "fill omitted branch probabilities uniformly");
    compare_cmd->add_option("--format", format_name, "text or structured");

    CLI11_PARSE(app, argc, argv);

    if (sim_cfg.warmup < 0.0) sim_cfg.warmup = spe::default_warmup(sim_cfg.horizon);
    const spe::CombineRules combine = parse_combine_specs(common.combine_specs);

    if (validate_cmd->parsed()) {
        const auto model = load_model(common);
        const auto diags = spe::validate_model(model);
        std::cerr << spe::format_diagnostics(diags);
        if (spe::has_errors(diags)) return spe::exit_input_error;
        std::cout << "ok\n";
        return spe::exit_proceed;
    }

    if (derive_cmd->parsed()) {
        const auto model = load_model(common);
        require_valid(model);
        spe::ExecutionGraph graph;
        if (!from_activity_name.empty()) {
            auto it = model.activities.find(from_activity_name);
            if (it == model.activities.end())
                throw spe::ModelError("unknown activity '" + from_activity_name + "'");
            graph = spe::from_activity(it->second);
        } else if (!from_statechart_name.empty()) {
            auto it = model.statecharts.find(from_statechart_name);
            if (it == model.statecharts.end())
                throw spe::ModelError("unknown statechart '" + from_statechart_name + "'");
            graph = spe::from_statechart(it->second);
        } else {
            graph = spe::from_sequence(model, pick_scenario(model, common), combine);
        }
        if (flatten_graph) graph = spe::flatten(graph);
        std::cout << (dot ? spe::to_dot(graph) : spe::serialize_graph(graph));
        return spe::exit_proceed;
    }

    if (static_cmd->parsed()) {
        const auto model = load_model(common);
        require_valid(model);
        const auto graph = spe::flatten(
            spe::from_sequence(model, pick_scenario(model, common), combine));
        const auto metrics = spe::solve_static(graph, model.annotations);
        if (parse_format(format_name) == spe::OutputFormat::structured) {
            std::cout << spe::write_doc("path_metrics", path_metrics_doc(metrics));
        } else {
            std::printf("shortest %s\naverage  %s\nlongest  %s\n",
                        spe::format_number(metrics.shortest).c_str(),
                        spe::format_number(metrics.average).c_str(),
                        spe::format_number(metrics.longest).c_str());
        }
        return spe::exit_proceed;
    }

    if (system_cmd->parsed()) {
        const auto model = load_model(common);
        require_valid(model);
        const auto net =
            build_network_for(model, pick_scenario(model, common), combine);
        const auto workload = spe::parse_workload_spec(workload_spec);
        const auto metrics = spe::solve(net, workload);
        if (parse_format(format_name) == spe::OutputFormat::structured) {
            std::cout << spe::write_doc("system_metrics", system_metrics_doc(metrics));
        } else {
            std::printf("throughput    %s\nresponse time %s\nbottleneck    %s\n",
                        spe::format_number(metrics.throughput).c_str(),
                        spe::format_number(metrics.response_time).c_str(),
                        metrics.bottleneck.c_str());
            for (const auto& [name, cm] : metrics.per_center)
                std::printf("%-14s U=%-12s R=%-12s Q=%s\n", name.c_str(),
                            spe::format_number(cm.utilization).c_str(),
                            spe::format_number(cm.residence_time).c_str(),
                            spe::format_number(cm.queue_length).c_str());
        }
        return spe::exit_proceed;
    }

    if (simulate_cmd->parsed()) {
        const auto model = load_model(common);
        require_valid(model);
        const auto net =
            build_network_for(model, pick_scenario(model, common), combine);
        const auto workload = spe::parse_workload_spec(workload_spec);
        const auto metrics = spe::simulate(net, workload, sim_cfg);
        std::cout << spe::write_doc("simulation", sim_metrics_doc(metrics, sim_cfg));
        return spe::exit_proceed;
    }

    if (analyze_cmd->parsed() || compare_cmd->parsed()) {
        spe::PipelineConfig cfg;
        cfg.scenario = common.scenario;
        cfg.objectives = spe::parse_objectives(read_file(objectives_path));
        if (!workload_spec.empty()) cfg.workload = spe::parse_workload_spec(workload_spec);
        cfg.simulate = do_simulate;
        if (do_simulate) cfg.sim_config = sim_cfg;
        cfg.output_format = parse_format(format_name);
        cfg.combine = combine;
        cfg.uniform_probs = common.uniform_probs;
        cfg.weighted_collaboration = weighted_collab;

        if (analyze_cmd->parsed()) {
            cfg.model_path = common.model_path;
            const auto report = spe::run_pipeline(cfg);
            std::cout << spe::render_report(report, cfg.output_format);
            return report.proceed ? spe::exit_proceed : spe::exit_objectives_failed;
        }

        std::vector<spe::PipelineConfig> cfgs;
        for (const auto& path : compare_models) {
            cfg.model_path = path;
            cfgs.push_back(cfg);
        }
        const auto comparison = spe::compare_alternatives(cfgs);
        std::cout << spe::render_comparison(comparison, cfg.output_format);
        bool all_proceed = true;
        for (const auto& rep : comparison.reports) all_proceed &= rep.proceed;
        return all_proceed ? spe::exit_proceed : spe::exit_objectives_failed;
    }

    return spe::exit_input_error;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const spe::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return spe::exit_input_error;
    } catch (const spe::ModelError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return spe::exit_input_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return spe::exit_input_error;
    }
}
