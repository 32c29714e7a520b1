#include "freight/demand.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <tuple>

#include "freight/shortest_path.hpp"

namespace freight {

const char* to_string(ModeCategory c) {
    switch (c) {
        case ModeCategory::truck: return "truck";
        case ModeCategory::rail: return "rail";
        case ModeCategory::multiple_modes_and_mail: return "multiple_modes_and_mail";
    }
    return "?";
}

std::optional<ModeCategory> mode_category_from_string(const std::string& s) {
    if (s == "truck") return ModeCategory::truck;
    if (s == "rail") return ModeCategory::rail;
    if (s == "multiple_modes_and_mail") return ModeCategory::multiple_modes_and_mail;
    return std::nullopt;
}

void validate_factor_tables(const FactorTables& tables) {
    for (const DistanceRange& r : tables.truck_allocation) {
        if (!(std::isfinite(r.min_miles) && std::isfinite(r.max_miles) && r.min_miles >= 0 &&
              r.min_miles < r.max_miles))
            throw std::invalid_argument("factor tables: bad distance range bounds");
        if (r.shares.empty())
            throw std::invalid_argument("factor tables: distance range has no truck-type shares");
        double sum = 0;
        for (const auto& [type, share] : r.shares) {
            if (!(share >= 0))
                throw std::invalid_argument("factor tables: negative share for truck type " + type);
            sum += share;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw std::invalid_argument("factor tables: truck-type shares must sum to 1");
    }
    for (const auto& [type, bodies] : tables.truck_equivalency) {
        if (bodies.empty())
            throw std::invalid_argument("factor tables: no body types for truck type " + type);
        for (const auto& [body, tons] : bodies)
            if (!(tons > 0))
                throw std::invalid_argument("factor tables: tons/truck must be > 0 for " + type +
                                            "/" + body);
    }
    for (const auto& [type, factor] : tables.empty_truck)
        if (!(factor >= 0))
            throw std::invalid_argument("factor tables: empty factor must be >= 0 for " + type);
    for (const auto& [group, tons] : tables.group_trainload_tons)
        if (!(tons > 0))
            throw std::invalid_argument("factor tables: tons/trainload must be > 0 for " + group);
    if (tables.container_load < 0)
        throw std::invalid_argument("factor tables: container_load must be >= 0");
    if (tables.train_length < 0)
        throw std::invalid_argument("factor tables: train_length must be >= 0");
    if (!(tables.min_intermodal_distance >= 0))
        throw std::invalid_argument("factor tables: min_intermodal_distance must be >= 0");
    if (!(tables.days_per_year > 0))
        throw std::invalid_argument("factor tables: days_per_year must be > 0");
}

DemandCell& DemandTable::cell(const std::string& origin, const std::string& destination) {
    auto it = std::lower_bound(cells.begin(), cells.end(), std::tie(origin, destination),
                               [](const DemandCell& c, const auto& key) {
                                   return std::tie(c.origin, c.destination) < key;
                               });
    if (it != cells.end() && it->origin == origin && it->destination == destination) return *it;
    it = cells.insert(it, DemandCell{origin, destination, 0, 0, 0});
    return *it;
}

const DemandCell* DemandTable::find(const std::string& origin,
                                    const std::string& destination) const {
    auto it = std::lower_bound(cells.begin(), cells.end(), std::tie(origin, destination),
                               [](const DemandCell& c, const auto& key) {
                                   return std::tie(c.origin, c.destination) < key;
                               });
    if (it != cells.end() && it->origin == origin && it->destination == destination) return &*it;
    return nullptr;
}

double DemandTable::total_truck() const {
    double s = 0;
    for (const DemandCell& c : cells) s += c.truck;
    return s;
}

double DemandTable::total_rail() const {
    double s = 0;
    for (const DemandCell& c : cells) s += c.rail;
    return s;
}

double DemandTable::total_intermodal() const {
    double s = 0;
    for (const DemandCell& c : cells) s += c.intermodal;
    return s;
}

void DemandTable::sort_cells() {
    std::sort(cells.begin(), cells.end(), [](const DemandCell& a, const DemandCell& b) {
        return std::tie(a.origin, a.destination) < std::tie(b.origin, b.destination);
    });
}

double great_circle_miles(const LonLat& a, const LonLat& b) {
    constexpr double kEarthRadiusMiles = 3958.761;
    constexpr double kRad = std::numbers::pi / 180.0;
    const double phi1 = a.lat * kRad;
    const double phi2 = b.lat * kRad;
    const double dphi = (b.lat - a.lat) * kRad;
    const double dlam = (b.lon - a.lon) * kRad;
    const double h = std::sin(dphi / 2) * std::sin(dphi / 2) +
                     std::cos(phi1) * std::cos(phi2) * std::sin(dlam / 2) * std::sin(dlam / 2);
    return 2.0 * kEarthRadiusMiles * std::atan2(std::sqrt(h), std::sqrt(1.0 - h));
}

namespace {

double distance_from_tree(const Network& net, const SpTree& tree, int32_t o, int32_t d) {
    if (tree.reached(d)) return tree.dist[static_cast<std::size_t>(d)];
    const std::optional<LonLat>& ca = net.node(o).coord;
    const std::optional<LonLat>& cb = net.node(d).coord;
    if (ca && cb) return great_circle_miles(*ca, *cb);
    throw std::runtime_error("od_distance: no road path between " + net.node(o).id + " and " +
                             net.node(d).id + " and coordinates are missing");
}

int32_t centroid_idx(const Network& net, const std::string& id, const char* role) {
    const int32_t i = net.node_idx(id);
    if (i < 0)
        throw std::invalid_argument(std::string("od_distance: unknown ") + role + " " + id);
    if (net.node(i).kind != NodeKind::centroid)
        throw std::invalid_argument(std::string("od_distance: ") + role + " " + id +
                                    " is not a centroid");
    return i;
}

}  // namespace

double od_distance(const Network& net, const std::string& origin,
                   const std::string& destination) {
    if (!net.indexed()) throw std::logic_error("od_distance: network not indexed");
    const int32_t o = centroid_idx(net, origin, "origin");
    const int32_t d = centroid_idx(net, destination, "destination");
    const LinkTimeView lengths = length_weights(net);
    const std::vector<char> mask = mode_link_mask(net, Mode::truck);
    const SpTree tree = build_sp_tree(net, lengths, mask, o);
    return distance_from_tree(net, tree, o, d);
}

double trucks_from_tonnage(const ShipmentRecord& rec, double distance_miles,
                           const FactorTables& tables) {
    if (rec.mode_category != ModeCategory::truck)
        throw std::invalid_argument("trucks_from_tonnage: record mode category is not truck");
    if (!(rec.tons_per_year >= 0) || !std::isfinite(rec.tons_per_year))
        throw std::invalid_argument("trucks_from_tonnage: tons must be finite and >= 0");
    if (rec.tons_per_year == 0) return 0.0;

    const DistanceRange* range = nullptr;
    for (const DistanceRange& r : tables.truck_allocation) {
        if (distance_miles >= r.min_miles && distance_miles < r.max_miles) {
            range = &r;
            break;
        }
    }
    if (!range)
        throw std::invalid_argument("trucks_from_tonnage: distance " +
                                    std::to_string(distance_miles) +
                                    " mi falls outside every allocation range");

    double annual_trips = 0.0;
    for (const auto& [type, share] : range->shares) {
        if (share == 0) continue;
        const double tons = rec.tons_per_year * share;
        auto eq = tables.truck_equivalency.find(type);
        if (eq == tables.truck_equivalency.end())
            throw std::invalid_argument("trucks_from_tonnage: no equivalency row for truck type " +
                                        type);
        double loaded = 0.0;
        for (const auto& [body, tons_per_truck] : eq->second) loaded += tons / tons_per_truck;
        auto ef = tables.empty_truck.find(type);
        if (ef == tables.empty_truck.end())
            throw std::invalid_argument("trucks_from_tonnage: no empty factor for truck type " +
                                        type);
        annual_trips += loaded * (1.0 + ef->second);
    }
    return annual_trips / tables.days_per_year;
}

double trainloads_from_tonnage(const ShipmentRecord& rec, const FactorTables& tables) {
    if (rec.mode_category != ModeCategory::rail)
        throw std::invalid_argument("trainloads_from_tonnage: record mode category is not rail");
    if (!(rec.tons_per_year >= 0) || !std::isfinite(rec.tons_per_year))
        throw std::invalid_argument("trainloads_from_tonnage: tons must be finite and >= 0");
    if (rec.tons_per_year == 0) return 0.0;

    auto group = tables.commodity_group.find(rec.commodity);
    if (group == tables.commodity_group.end())
        throw std::invalid_argument("trainloads_from_tonnage: commodity " + rec.commodity +
                                    " is not mapped to a group");
    auto weight = tables.group_trainload_tons.find(group->second);
    if (weight == tables.group_trainload_tons.end())
        throw std::invalid_argument("trainloads_from_tonnage: no trainload weight for group " +
                                    group->second);
    return rec.tons_per_year / weight->second / tables.days_per_year;
}

IntermodalDemand intermodal_from_tonnage(const ShipmentRecord& rec, double distance_miles,
                                         const FactorTables& tables) {
    if (rec.mode_category != ModeCategory::multiple_modes_and_mail)
        throw std::invalid_argument(
            "intermodal_from_tonnage: record mode category is not multiple_modes_and_mail");
    if (!(rec.tons_per_year >= 0) || !std::isfinite(rec.tons_per_year))
        throw std::invalid_argument("intermodal_from_tonnage: tons must be finite and >= 0");

    IntermodalDemand out;
    if (!tables.intermodal_eligible.count(rec.commodity)) return out;
    if (distance_miles < tables.min_intermodal_distance) return out;
    if (rec.tons_per_year == 0) return out;

    if (!(tables.container_load > 0))
        throw std::invalid_argument("intermodal_from_tonnage: container_load missing");
    if (!(tables.train_length > 0))
        throw std::invalid_argument("intermodal_from_tonnage: train_length missing");

    const double containers_per_year = rec.tons_per_year / tables.container_load;
    out.units_per_day = containers_per_year / tables.train_length / tables.days_per_year;
    out.truck_trips_per_day = 2.0 * containers_per_year / tables.days_per_year;
    return out;
}

DemandBuildResult build_demand_table(std::span<const ShipmentRecord> records, const Network& net,
                                     const FactorTables& tables) {
    if (!net.indexed()) throw std::logic_error("build_demand_table: network not indexed");
    validate_factor_tables(tables);

    // One length tree per origin serves every record leaving it.
    const LinkTimeView lengths = length_weights(net);
    const std::vector<char> mask = mode_link_mask(net, Mode::truck);
    std::map<int32_t, SpTree> trees;
    auto distance = [&](const std::string& origin, const std::string& destination) {
        const int32_t o = centroid_idx(net, origin, "origin");
        const int32_t d = centroid_idx(net, destination, "destination");
        auto it = trees.find(o);
        if (it == trees.end()) it = trees.emplace(o, build_sp_tree(net, lengths, mask, o)).first;
        return distance_from_tree(net, it->second, o, d);
    };

    DemandBuildResult out;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const ShipmentRecord& rec = records[i];
        try {
            switch (rec.mode_category) {
                case ModeCategory::truck: {
                    const double v =
                        trucks_from_tonnage(rec, distance(rec.origin, rec.destination), tables);
                    if (v > 0) out.table.cell(rec.origin, rec.destination).truck += v;
                    out.summary.truck_per_day += v;
                    ++out.summary.records_converted;
                    break;
                }
                case ModeCategory::rail: {
                    const double v = trainloads_from_tonnage(rec, tables);
                    if (v > 0) out.table.cell(rec.origin, rec.destination).rail += v;
                    out.summary.rail_per_day += v;
                    ++out.summary.records_converted;
                    break;
                }
                case ModeCategory::multiple_modes_and_mail: {
                    const double d = distance(rec.origin, rec.destination);
                    const bool kept = tables.intermodal_eligible.count(rec.commodity) &&
                                      d >= tables.min_intermodal_distance;
                    const IntermodalDemand v = intermodal_from_tonnage(rec, d, tables);
                    if (v.units_per_day > 0)
                        out.table.cell(rec.origin, rec.destination).intermodal += v.units_per_day;
                    out.summary.intermodal_units_per_day += v.units_per_day;
                    out.summary.intermodal_truck_trips_per_day += v.truck_trips_per_day;
                    if (kept)
                        ++out.summary.records_converted;
                    else
                        ++out.summary.records_filtered;
                    break;
                }
            }
        } catch (const std::exception& e) {
            throw std::invalid_argument("record " + std::to_string(i + 1) + " (" + rec.origin +
                                        " -> " + rec.destination + "): " + e.what());
        }
    }
    return out;
}

}  // namespace freight
