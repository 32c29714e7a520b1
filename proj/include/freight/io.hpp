#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "freight/demand.hpp"
#include "freight/equilibrium.hpp"
#include "freight/network.hpp"

namespace freight {

/// Input problem: unreadable, malformed, or semantically broken file content.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Optional ingestion helper: trains/day by (control type, number of tracks),
/// used to fill missing rail capacities from track attributes.
struct RailCapacityTable {
    std::map<std::string, std::map<int, double>> trains_per_day;
};

RailCapacityTable load_rail_capacity_table(const std::filesystem::path& path);

/// Loads a network from a single JSON document (path ends in .json) or from a
/// directory holding nodes.csv and links.csv. Missing free_flow_time values
/// are derived from length / speed_limit (rail defaults to 60 mph); missing
/// rail capacities are filled from `rail_caps` when provided. The returned
/// network is not yet validated or indexed.
Network load_network(const std::filesystem::path& path,
                     const RailCapacityTable* rail_caps = nullptr);

void write_network_json(const Network& net, const std::filesystem::path& path);
void write_network_csv(const Network& net, const std::filesystem::path& dir);

DemandTable load_demand_csv(const std::filesystem::path& path);
void write_demand_csv(const DemandTable& table, const std::filesystem::path& path);

std::vector<ShipmentRecord> load_shipments_csv(const std::filesystem::path& path);
FactorTables load_factor_tables(const std::filesystem::path& path);

/// %.9g: fixed nine significant digits, so identical runs diff clean.
std::string fmt_g9(double v);

/// Writes via a temp file in the same directory plus an atomic rename.
void atomic_write(const std::filesystem::path& path, const std::string& content);

void write_flows_csv(const std::filesystem::path& path, const Network& net, const LpfTable& lpfs,
                     const AssignmentResult& result);

/// True when every link endpoint carries coordinates (the precondition for
/// GeoJSON export; without geometry the run degrades to CSV only).
bool geometry_complete(const Network& net);

void write_flows_geojson(const std::filesystem::path& path, const Network& net,
                         const LpfTable& lpfs, const AssignmentResult& result);

struct RunReport {
    std::string algorithm;
    int iterations = 0;
    bool converged = false;
    bool deterministic = true;
    double objective_hours = 0;  // normalized when normalization is on
    double raw_objective = 0;
    std::vector<double> gap_trace;
    std::vector<double> objective_trace;
    double wall_clock_seconds = 0;
    double ue_cost_spread_hours = 0;
    std::optional<TonMiles> ton_miles;
    struct CongestedLink {
        std::string link_id;
        double pct_over_capacity = 0;
        double travel_time = 0;
    };
    std::vector<CongestedLink> congested_links;
};

/// Top-N links over capacity (rail judged on combined twin flow), worst
/// first, ties by link id.
std::vector<RunReport::CongestedLink> congested_link_table(const Network& net,
                                                           const LpfTable& lpfs,
                                                           const AssignmentResult& result,
                                                           int top_n);

void write_report_json(const std::filesystem::path& path, const RunReport& report);

void write_beta_sweep_csv(const std::filesystem::path& path,
                          std::span<const BetaSweepRow> rows);

}  // namespace freight
