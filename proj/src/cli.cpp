#include "freight/cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "freight/io.hpp"

namespace freight {

namespace {

using ordered_json = nlohmann::ordered_json;

RunConfig parse_run_config(const ordered_json& doc, const std::string& context) {
    RunConfig cfg;
    try {
        cfg.network = doc.value("network", cfg.network);
        cfg.demand = doc.value("demand", cfg.demand);
        cfg.records = doc.value("records", cfg.records);
        cfg.factors = doc.value("factors", cfg.factors);
        cfg.rail_capacity_table = doc.value("rail_capacity_table", cfg.rail_capacity_table);
        cfg.out_dir = doc.value("out_dir", cfg.out_dir);
        cfg.algorithm = doc.value("algorithm", cfg.algorithm);
        if (doc.contains("solver")) {
            const ordered_json& s = doc.at("solver");
            cfg.solver.step_size = s.value("step_size", cfg.solver.step_size);
            cfg.solver.rel_gap_tol = s.value("rel_gap_tol", cfg.solver.rel_gap_tol);
            cfg.solver.max_iterations = s.value("max_iterations", cfg.solver.max_iterations);
            cfg.solver.beta = s.value("beta", cfg.solver.beta);
            cfg.solver.intermodal_road_factor =
                s.value("intermodal_road_factor", cfg.solver.intermodal_road_factor);
            cfg.solver.intermodal_rail_factor =
                s.value("intermodal_rail_factor", cfg.solver.intermodal_rail_factor);
            cfg.solver.normalize = s.value("normalize", cfg.solver.normalize);
            cfg.solver.threads = s.value("threads", cfg.solver.threads);
        }
        if (doc.contains("beta_sweep"))
            cfg.beta_sweep = doc.at("beta_sweep").get<std::vector<double>>();
        if (doc.contains("restricted_links"))
            cfg.restricted_links = doc.at("restricted_links").get<std::vector<std::string>>();
        if (doc.contains("terminal_whitelist")) {
            for (const ordered_json& jw : doc.at("terminal_whitelist")) {
                WhitelistEntry e;
                e.origin = jw.at("origin").get<std::string>();
                e.destination = jw.at("destination").get<std::string>();
                if (jw.contains("terminals"))
                    e.terminals = jw.at("terminals").get<std::vector<std::string>>();
                cfg.terminal_whitelist.push_back(std::move(e));
            }
        }
        if (doc.contains("tracked_links"))
            cfg.tracked_links = doc.at("tracked_links").get<std::vector<std::string>>();
        if (doc.contains("payload_factors")) {
            PayloadFactors p;
            p.tons_per_truck = doc.at("payload_factors").value("tons_per_truck", 0.0);
            p.tons_per_train = doc.at("payload_factors").value("tons_per_train", 0.0);
            cfg.payloads = p;
        }
        cfg.top_n_congested = doc.value("top_n_congested", cfg.top_n_congested);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(context + ": " + e.what());
    }
    return cfg;
}

/// Loads the network named by the config, folds in config-level restrictions
/// and whitelists, validates, and indexes. Validation failures are printed
/// and reported through `violations`.
Network prepare_network(const RunConfig& cfg, bool& valid) {
    RailCapacityTable caps;
    const RailCapacityTable* caps_ptr = nullptr;
    if (!cfg.rail_capacity_table.empty()) {
        caps = load_rail_capacity_table(cfg.rail_capacity_table);
        caps_ptr = &caps;
    }
    Network net = load_network(cfg.network, caps_ptr);
    for (const std::string& id : cfg.restricted_links) net.restricted_links.push_back(id);
    for (const WhitelistEntry& e : cfg.terminal_whitelist) net.terminal_whitelist.push_back(e);

    const ValidationReport report = validate_network(net);
    for (const Violation& v : report) std::cerr << v.subject << ": " << v.message << "\n";
    valid = report.empty();
    if (valid) net.build_index();
    return net;
}

RunReport make_report(const Network& net, const LpfTable& lpfs, const AssignmentResult& result,
                      const RunConfig& cfg, double wall_seconds) {
    RunReport report;
    report.algorithm = result.algorithm;
    report.iterations = result.iterations;
    report.converged = result.converged;
    report.deterministic = result.deterministic;
    report.objective_hours = result.objective_trace.back();
    report.raw_objective = result.raw_objective_trace.back();
    report.gap_trace = result.gap_trace;
    report.objective_trace = result.objective_trace;
    report.wall_clock_seconds = wall_seconds;
    const LinkTimeView times = times_from_flows(net, lpfs, result.link_flows, 1);
    report.ue_cost_spread_hours = ue_cost_spread(net, result, times).overall;
    if (cfg.payloads) report.ton_miles = ton_miles(result, net, *cfg.payloads);
    report.congested_links = congested_link_table(net, lpfs, result, cfg.top_n_congested);
    return report;
}

int cmd_validate(const RunConfig& cfg) {
    bool valid = false;
    Network net = prepare_network(cfg, valid);
    if (!valid) return kExitValidationFailure;
    std::cout << "network OK: " << net.node_count() << " nodes, " << net.link_count()
              << " links\n";
    return kExitOk;
}

int cmd_convert(const RunConfig& cfg) {
    if (cfg.records.empty() || cfg.factors.empty())
        throw IoError("convert needs --records and --factors");
    bool valid = false;
    Network net = prepare_network(cfg, valid);
    if (!valid) return kExitValidationFailure;

    const std::vector<ShipmentRecord> records = load_shipments_csv(cfg.records);
    const FactorTables tables = load_factor_tables(cfg.factors);
    const DemandBuildResult built = build_demand_table(records, net, tables);

    const std::filesystem::path out = std::filesystem::path(cfg.out_dir) / "demand.csv";
    write_demand_csv(built.table, out);
    std::cout << "wrote " << out.string() << "\n"
              << "truck: " << fmt_g9(built.summary.truck_per_day) << " trucks/day\n"
              << "rail: " << fmt_g9(built.summary.rail_per_day) << " trains/day\n"
              << "intermodal: " << fmt_g9(built.summary.intermodal_units_per_day)
              << " units/day (" << fmt_g9(built.summary.intermodal_truck_trips_per_day)
              << " drayage truck trips/day)\n"
              << "records converted: " << built.summary.records_converted
              << ", filtered: " << built.summary.records_filtered << "\n";
    return kExitOk;
}

int run_one_assignment(const Network& net, const DemandTable& demand, const RunConfig& cfg,
                       const std::string& algorithm) {
    const auto t0 = std::chrono::steady_clock::now();
    const AssignmentResult result = algorithm == "fw" ? solve_fw(net, demand, cfg.solver)
                                                      : solve_gp(net, demand, cfg.solver);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const LpfTable lpfs(net, cfg.solver.beta);
    const std::filesystem::path out_dir(cfg.out_dir);
    write_flows_csv(out_dir / ("flows_" + algorithm + ".csv"), net, lpfs, result);
    if (geometry_complete(net))
        write_flows_geojson(out_dir / ("flows_" + algorithm + ".geojson"), net, lpfs, result);
    write_report_json(out_dir / ("report_" + algorithm + ".json"),
                      make_report(net, lpfs, result, cfg, wall));

    std::cout << algorithm << ": " << (result.converged ? "converged" : "did not converge")
              << " after " << result.iterations << " iterations, objective "
              << fmt_g9(result.objective_trace.back()) << " h\n";
    return result.converged ? kExitOk : kExitNotConverged;
}

int cmd_assign(const RunConfig& cfg) {
    if (cfg.demand.empty()) throw IoError("assign needs --demand");
    if (cfg.algorithm != "gp" && cfg.algorithm != "fw" && cfg.algorithm != "both")
        throw IoError("algorithm must be gp, fw, or both");
    bool valid = false;
    Network net = prepare_network(cfg, valid);
    if (!valid) return kExitValidationFailure;
    const DemandTable demand = load_demand_csv(cfg.demand);

    int code = kExitOk;
    if (cfg.algorithm == "gp" || cfg.algorithm == "both")
        code = std::max(code, run_one_assignment(net, demand, cfg, "gp"));
    if (cfg.algorithm == "fw" || cfg.algorithm == "both")
        code = std::max(code, run_one_assignment(net, demand, cfg, "fw"));
    return code;
}

int cmd_sweep_beta(const RunConfig& cfg) {
    if (cfg.demand.empty()) throw IoError("sweep-beta needs --demand");
    if (cfg.beta_sweep.empty()) throw IoError("sweep-beta needs a nonempty beta list");
    bool valid = false;
    Network net = prepare_network(cfg, valid);
    if (!valid) return kExitValidationFailure;
    const DemandTable demand = load_demand_csv(cfg.demand);

    const std::vector<BetaSweepRow> rows =
        beta_sweep(net, demand, cfg.solver, cfg.beta_sweep, cfg.tracked_links);
    const std::filesystem::path out = std::filesystem::path(cfg.out_dir) / "beta_sweep.csv";
    write_beta_sweep_csv(out, rows);
    std::cout << "wrote " << out.string() << " (" << rows.size() << " rows)\n";
    return kExitOk;
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path + ": cannot open");
    ordered_json doc;
    try {
        doc = ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path + ": " + e.what());
    }
    return parse_run_config(doc, path);
}

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"user-equilibrium freight assignment for road-rail intermodal networks"};
    app.require_subcommand(1);

    std::string config_path;
    RunConfig flags;
    std::string betas_csv;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config; flags override its fields");
        cmd->add_option("--network", flags.network, "network .json file or CSV directory");
        cmd->add_option("--rail-capacity-table", flags.rail_capacity_table,
                        "JSON lookup control_type x tracks -> trains/day");
        cmd->add_option("--out-dir", flags.out_dir, "output directory");
        cmd->add_option("--restrict", flags.restricted_links,
                        "link id to exclude from assignment (repeatable)");
        return cmd;
    };
    auto add_solver = [&](CLI::App* cmd) {
        cmd->add_option("--algorithm", flags.algorithm, "gp, fw, or both");
        cmd->add_option("--step-size", flags.solver.step_size, "projection step scale");
        cmd->add_option("--tol", flags.solver.rel_gap_tol, "relative gap tolerance");
        cmd->add_option("--max-iterations", flags.solver.max_iterations, "iteration cap");
        cmd->add_option("--beta", flags.solver.beta, "rail penalty rate");
        cmd->add_option("--intermodal-road-factor", flags.solver.intermodal_road_factor,
                        "trucks per intermodal unit on road links");
        cmd->add_option("--intermodal-rail-factor", flags.solver.intermodal_rail_factor,
                        "trains per intermodal unit on rail links");
        cmd->add_flag("--no-normalize", "report the raw objective");
        cmd->add_option("--threads", flags.solver.threads, "worker threads (>1 enables OpenMP)");
        cmd->add_option("--tons-per-truck", "payload for ton-mile reporting");
        cmd->add_option("--tons-per-train", "payload for ton-mile reporting");
        cmd->add_option("--top-n-congested", flags.top_n_congested,
                        "rows in the congested-link table");
        return cmd;
    };

    CLI::App* validate = add_common(app.add_subcommand("validate", "check a network file"));
    CLI::App* convert = add_common(
        app.add_subcommand("convert", "annual shipment records -> daily O-D demand CSV"));
    convert->add_option("--records", flags.records, "shipment records CSV");
    convert->add_option("--factors", flags.factors, "factor tables JSON");
    CLI::App* assign =
        add_solver(add_common(app.add_subcommand("assign", "solve user equilibrium")));
    assign->add_option("--demand", flags.demand, "demand CSV");
    CLI::App* sweep = add_solver(add_common(
        app.add_subcommand("sweep-beta", "re-solve per beta and tabulate congested links")));
    sweep->add_option("--demand", flags.demand, "demand CSV");
    sweep->add_option("--betas", betas_csv, "comma-separated beta list");
    sweep->add_option("--track", flags.tracked_links, "link id to tabulate (repeatable)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInputError;
    }

    // Start from the config document (when given), then lay every flag the
    // user actually passed on top.
    CLI::App* cmd = app.get_subcommands().front();
    try {
        RunConfig cfg;
        if (cmd->count("--config")) cfg = load_run_config(config_path);
        auto passed = [&](const std::string& name) {
            return cmd->get_option(name)->count() > 0;
        };
        if (passed("--network")) cfg.network = flags.network;
        if (passed("--rail-capacity-table")) cfg.rail_capacity_table = flags.rail_capacity_table;
        if (passed("--out-dir")) cfg.out_dir = flags.out_dir;
        if (passed("--restrict")) cfg.restricted_links = flags.restricted_links;
        if (cmd == convert) {
            if (passed("--records")) cfg.records = flags.records;
            if (passed("--factors")) cfg.factors = flags.factors;
        }
        if (cmd == assign || cmd == sweep) {
            if (passed("--demand")) cfg.demand = flags.demand;
            if (passed("--algorithm")) cfg.algorithm = flags.algorithm;
            if (passed("--step-size")) cfg.solver.step_size = flags.solver.step_size;
            if (passed("--tol")) cfg.solver.rel_gap_tol = flags.solver.rel_gap_tol;
            if (passed("--max-iterations"))
                cfg.solver.max_iterations = flags.solver.max_iterations;
            if (passed("--beta")) cfg.solver.beta = flags.solver.beta;
            if (passed("--intermodal-road-factor"))
                cfg.solver.intermodal_road_factor = flags.solver.intermodal_road_factor;
            if (passed("--intermodal-rail-factor"))
                cfg.solver.intermodal_rail_factor = flags.solver.intermodal_rail_factor;
            if (passed("--no-normalize")) cfg.solver.normalize = false;
            if (passed("--threads")) cfg.solver.threads = flags.solver.threads;
            if (passed("--top-n-congested")) cfg.top_n_congested = flags.top_n_congested;
            if (passed("--tons-per-truck") || passed("--tons-per-train")) {
                PayloadFactors p = cfg.payloads.value_or(PayloadFactors{});
                if (passed("--tons-per-truck"))
                    p.tons_per_truck = cmd->get_option("--tons-per-truck")->as<double>();
                if (passed("--tons-per-train"))
                    p.tons_per_train = cmd->get_option("--tons-per-train")->as<double>();
                cfg.payloads = p;
            }
        }
        if (cmd == sweep) {
            if (passed("--track")) cfg.tracked_links = flags.tracked_links;
            if (passed("--betas")) {
                cfg.beta_sweep.clear();
                std::stringstream ss(betas_csv);
                std::string tok;
                while (std::getline(ss, tok, ',')) {
                    if (tok.empty()) continue;
                    cfg.beta_sweep.push_back(std::stod(tok));
                }
            }
        }
        if (cfg.network.empty()) throw IoError("a network path is required");

        if (cmd == validate) return cmd_validate(cfg);
        if (cmd == convert) return cmd_convert(cfg);
        if (cmd == assign) return cmd_assign(cfg);
        return cmd_sweep_beta(cfg);
    } catch (const UnreachableDemand& e) {
        std::cerr << "error: " << e.what() << "\n";
        for (const UnreachableDemand::Entry& entry : e.entries())
            std::cerr << "  " << entry.origin << " -> " << entry.destination << " ("
                      << to_string(entry.mode) << ")\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
}

}  // namespace freight
