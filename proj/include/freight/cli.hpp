#pragma once

#include <string>
#include <vector>

#include "freight/equilibrium.hpp"

namespace freight {

// Process exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitValidationFailure = 2;
inline constexpr int kExitNotConverged = 3;

/// Everything a run needs; loadable from a JSON config document, with every
/// command-line flag overriding its config counterpart.
struct RunConfig {
    std::string network;       // .json file or directory with nodes.csv/links.csv
    std::string demand;        // demand CSV (assign/sweep-beta)
    std::string records;       // shipment records CSV (convert)
    std::string factors;       // factor tables JSON (convert)
    std::string rail_capacity_table;  // optional ingestion lookup
    std::string out_dir = ".";
    std::string algorithm = "gp";  // gp | fw | both
    SolverConfig solver;
    std::vector<double> beta_sweep;
    std::vector<std::string> restricted_links;
    std::vector<WhitelistEntry> terminal_whitelist;
    std::vector<std::string> tracked_links;  // sweep-beta reporting
    std::optional<PayloadFactors> payloads;  // enables ton-mile reporting
    int top_n_congested = 10;
};

RunConfig load_run_config(const std::string& path);

/// Entry point shared by the binary and the tests: argv without the program
/// name. Returns the process exit code.
int run_cli(const std::vector<std::string>& args);

}  // namespace freight
