#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "freight/network.hpp"

namespace freight {

enum class ModeCategory { truck, rail, multiple_modes_and_mail };

const char* to_string(ModeCategory c);
std::optional<ModeCategory> mode_category_from_string(const std::string& s);

/// One annual commodity flow row, FAF-shaped.
struct ShipmentRecord {
    std::string origin;
    std::string destination;
    std::string commodity;
    double tons_per_year = 0;
    ModeCategory mode_category = ModeCategory::truck;
};

struct DistanceRange {
    double min_miles = 0;
    double max_miles = 0;                  // half-open [min, max)
    std::map<std::string, double> shares;  // truck type -> tonnage share, sums to 1
};

/// Pluggable conversion factors. The repository ships a synthetic example
/// set; real studies supply their own tables.
struct FactorTables {
    std::vector<DistanceRange> truck_allocation;
    // truck type -> body type -> tons per truck for that body style's slice
    std::map<std::string, std::map<std::string, double>> truck_equivalency;
    std::map<std::string, double> empty_truck;  // truck type -> empty-trip factor
    std::map<std::string, std::string> commodity_group;
    std::map<std::string, double> group_trainload_tons;  // group -> tons per trainload
    std::set<std::string> intermodal_eligible;
    double container_load = 0;  // tons per container/trailer
    double train_length = 0;    // containers per train
    double min_intermodal_distance = 500.0;  // miles
    double days_per_year = 365.0;
};

/// Throws std::invalid_argument on the first breached table invariant
/// (shares not summing to 1, non-positive loads, negative empty factors).
void validate_factor_tables(const FactorTables& tables);

/// Daily demand triple for one O-D pair.
struct DemandCell {
    std::string origin;
    std::string destination;
    double truck = 0;       // trucks/day
    double rail = 0;        // trains/day
    double intermodal = 0;  // intermodal units (trainload-equivalents)/day
};

struct DemandTable {
    std::vector<DemandCell> cells;  // sorted by (origin, destination)

    DemandCell& cell(const std::string& origin, const std::string& destination);
    const DemandCell* find(const std::string& origin, const std::string& destination) const;
    double total_truck() const;
    double total_rail() const;
    double total_intermodal() const;
    void sort_cells();
};

/// Shortest road-network distance between two centroids (length-weighted,
/// flow-independent); falls back to great-circle distance when no road path
/// exists but both centroids carry coordinates. Throws when neither works.
double od_distance(const Network& net, const std::string& origin, const std::string& destination);

double great_circle_miles(const LonLat& a, const LonLat& b);

/// Annual tonnage -> trucks/day via distance-range allocation, per-body
/// equivalency, and empty-trip factors.
double trucks_from_tonnage(const ShipmentRecord& rec, double distance_miles,
                           const FactorTables& tables);

/// Annual tonnage -> trains/day via commodity grouping and trainload weights.
double trainloads_from_tonnage(const ShipmentRecord& rec, const FactorTables& tables);

struct IntermodalDemand {
    double units_per_day = 0;        // trainload-equivalents/day
    double truck_trips_per_day = 0;  // loaded + empty drayage trips/day
};

/// Annual tonnage -> intermodal units/day. Ineligible commodities and hauls
/// shorter than the minimum distance convert to zero. Every container trip
/// generates an empty return, so truck trips are twice the container count.
IntermodalDemand intermodal_from_tonnage(const ShipmentRecord& rec, double distance_miles,
                                         const FactorTables& tables);

struct ConversionSummary {
    double truck_per_day = 0;
    double rail_per_day = 0;
    double intermodal_units_per_day = 0;
    double intermodal_truck_trips_per_day = 0;
    std::size_t records_converted = 0;
    std::size_t records_filtered = 0;  // ineligible or below the distance cutoff
};

struct DemandBuildResult {
    DemandTable table;
    ConversionSummary summary;
};

/// Applies the three converters by mode category and sums per O-D cell.
/// Converter failures are rethrown with the offending record index attached.
DemandBuildResult build_demand_table(std::span<const ShipmentRecord> records, const Network& net,
                                     const FactorTables& tables);

}  // namespace freight
