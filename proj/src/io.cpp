#include "freight/io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "freight/shortest_path.hpp"

namespace freight {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path.string() + ": cannot open");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

ordered_json parse_json_file(const std::filesystem::path& path) {
    try {
        return ordered_json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

/// One CSV line -> fields. Handles quoted fields with "" escapes and strips a
/// trailing carriage return.
std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c != '\r' || i + 1 != line.size()) {
            field.push_back(c);
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

struct CsvTable {
    std::filesystem::path path;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;  // padded/truncated to header size
    std::vector<std::size_t> line_numbers;

    int column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        return -1;
    }

    int require_column(const std::string& name) const {
        const int c = column(name);
        if (c < 0) throw IoError(path.string() + ": missing column '" + name + "'");
        return c;
    }

    const std::string& field(std::size_t row, int col) const {
        static const std::string empty;
        if (col < 0) return empty;
        return rows[row][static_cast<std::size_t>(col)];
    }
};

CsvTable load_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path.string() + ": cannot open");
    CsvTable table;
    table.path = path;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        std::vector<std::string> fields = split_csv_line(line);
        if (table.header.empty()) {
            table.header = std::move(fields);
            continue;
        }
        if (fields.size() > table.header.size())
            throw IoError(path.string() + ":" + std::to_string(line_no) +
                          ": more fields than header columns");
        fields.resize(table.header.size());
        table.rows.push_back(std::move(fields));
        table.line_numbers.push_back(line_no);
    }
    if (table.header.empty()) throw IoError(path.string() + ": empty file (no header)");
    return table;
}

std::optional<double> parse_number(const std::string& s) {
    if (s.empty()) return std::nullopt;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) return std::nullopt;
    return v;
}

double require_number(const CsvTable& table, std::size_t row, int col, const std::string& what) {
    const std::string& s = table.field(row, col);
    const std::optional<double> v = parse_number(s);
    if (!v)
        throw IoError(table.path.string() + ":" + std::to_string(table.line_numbers[row]) +
                      ": bad " + what + " '" + s + "'");
    return *v;
}

/// Fills a link's free_flow_time and capacity from the optional ingestion
/// attributes when the direct fields are absent.
void finish_link(Link& link, std::optional<double> fft, std::optional<double> capacity,
                 std::optional<double> speed_limit, const std::string& control_type,
                 std::optional<double> tracks, const RailCapacityTable* rail_caps,
                 const std::string& context) {
    constexpr double kRailDefaultMph = 60.0;
    if (fft) {
        link.free_flow_time = *fft;
    } else if (speed_limit && *speed_limit > 0) {
        link.free_flow_time = link.length / *speed_limit;
    } else if (link.kind == LinkKind::rail) {
        link.free_flow_time = link.length / kRailDefaultMph;
    } else if (link.kind == LinkKind::road) {
        throw IoError(context + ": road link needs free_flow_time or speed_limit");
    } else {
        link.free_flow_time = 0.0;  // connectors/terminals default to no delay
    }

    if (capacity) {
        link.capacity = *capacity;
    } else if (link.kind == LinkKind::rail) {
        if (!rail_caps || control_type.empty() || !tracks)
            throw IoError(context +
                          ": rail link needs capacity (or a capacity table with control_type and tracks)");
        auto ct = rail_caps->trains_per_day.find(control_type);
        if (ct == rail_caps->trains_per_day.end())
            throw IoError(context + ": capacity table has no control type '" + control_type + "'");
        auto tr = ct->second.find(static_cast<int>(*tracks));
        if (tr == ct->second.end())
            throw IoError(context + ": capacity table has no entry for " + control_type + " with " +
                          std::to_string(static_cast<int>(*tracks)) + " tracks");
        link.capacity = tr->second;
    } else if (link.kind == LinkKind::road) {
        throw IoError(context + ": road link needs capacity");
    } else {
        link.capacity = 0.0;
    }
}

std::optional<double> json_number(const ordered_json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_number()) throw IoError(std::string("field '") + key + "' is not a number");
    return it->get<double>();
}

std::string json_string(const ordered_json& j, const char* key, const std::string& fallback = "") {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return fallback;
    if (!it->is_string()) throw IoError(std::string("field '") + key + "' is not a string");
    return it->get<std::string>();
}

Network load_network_json(const std::filesystem::path& path, const RailCapacityTable* rail_caps) {
    const ordered_json doc = parse_json_file(path);
    Network net;
    try {
        if (!doc.contains("nodes") || !doc.contains("links"))
            throw IoError("document needs 'nodes' and 'links' arrays");
        for (const ordered_json& jn : doc.at("nodes")) {
            Node n;
            n.id = json_string(jn, "id");
            if (n.id.empty()) throw IoError("node with empty id");
            const std::string kind = json_string(jn, "kind");
            const std::optional<NodeKind> k = node_kind_from_string(kind);
            if (!k) throw IoError("node " + n.id + ": unknown kind '" + kind + "'");
            n.kind = *k;
            const std::optional<double> lon = json_number(jn, "lon");
            const std::optional<double> lat = json_number(jn, "lat");
            if (lon && lat) n.coord = LonLat{*lon, *lat};
            net.nodes.push_back(std::move(n));
        }
        for (const ordered_json& jl : doc.at("links")) {
            Link l;
            l.id = json_string(jl, "id");
            if (l.id.empty()) throw IoError("link with empty id");
            l.from = json_string(jl, "from");
            l.to = json_string(jl, "to");
            const std::string kind = json_string(jl, "kind");
            const std::optional<LinkKind> k = link_kind_from_string(kind);
            if (!k) throw IoError("link " + l.id + ": unknown kind '" + kind + "'");
            l.kind = *k;
            const std::optional<double> length = json_number(jl, "length");
            if (!length) throw IoError("link " + l.id + ": missing length");
            l.length = *length;
            l.twin_id = json_string(jl, "twin_id");
            l.beta = json_number(jl, "beta");
            finish_link(l, json_number(jl, "free_flow_time"), json_number(jl, "capacity"),
                        json_number(jl, "speed_limit"), json_string(jl, "control_type"),
                        json_number(jl, "tracks"), rail_caps, "link " + l.id);
            net.links.push_back(std::move(l));
        }
        if (doc.contains("restricted_links"))
            for (const ordered_json& r : doc.at("restricted_links"))
                net.restricted_links.push_back(r.get<std::string>());
        if (doc.contains("terminal_whitelist")) {
            for (const ordered_json& jw : doc.at("terminal_whitelist")) {
                WhitelistEntry e;
                e.origin = json_string(jw, "origin");
                e.destination = json_string(jw, "destination");
                if (jw.contains("terminals"))
                    for (const ordered_json& t : jw.at("terminals"))
                        e.terminals.push_back(t.get<std::string>());
                net.terminal_whitelist.push_back(std::move(e));
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path.string() + ": " + e.what());
    } catch (const IoError& e) {
        throw IoError(path.string() + ": " + e.what());
    }
    return net;
}

Network load_network_csv(const std::filesystem::path& dir, const RailCapacityTable* rail_caps) {
    const CsvTable nodes = load_csv(dir / "nodes.csv");
    const CsvTable links = load_csv(dir / "links.csv");
    Network net;

    const int n_id = nodes.require_column("id");
    const int n_kind = nodes.require_column("kind");
    const int n_lon = nodes.column("lon");
    const int n_lat = nodes.column("lat");
    for (std::size_t r = 0; r < nodes.rows.size(); ++r) {
        Node n;
        n.id = nodes.field(r, n_id);
        if (n.id.empty())
            throw IoError(nodes.path.string() + ":" + std::to_string(nodes.line_numbers[r]) +
                          ": empty node id");
        const std::string kind = nodes.field(r, n_kind);
        const std::optional<NodeKind> k = node_kind_from_string(kind);
        if (!k)
            throw IoError(nodes.path.string() + ":" + std::to_string(nodes.line_numbers[r]) +
                          ": unknown node kind '" + kind + "'");
        n.kind = *k;
        const std::optional<double> lon = parse_number(nodes.field(r, n_lon));
        const std::optional<double> lat = parse_number(nodes.field(r, n_lat));
        if (lon && lat) n.coord = LonLat{*lon, *lat};
        net.nodes.push_back(std::move(n));
    }

    const int l_id = links.require_column("id");
    const int l_from = links.require_column("from");
    const int l_to = links.require_column("to");
    const int l_kind = links.require_column("kind");
    const int l_length = links.require_column("length");
    const int l_fft = links.column("free_flow_time");
    const int l_cap = links.column("capacity");
    const int l_twin = links.column("twin_id");
    const int l_beta = links.column("beta");
    const int l_speed = links.column("speed_limit");
    const int l_control = links.column("control_type");
    const int l_tracks = links.column("tracks");
    for (std::size_t r = 0; r < links.rows.size(); ++r) {
        const std::string context =
            links.path.string() + ":" + std::to_string(links.line_numbers[r]);
        Link l;
        l.id = links.field(r, l_id);
        if (l.id.empty()) throw IoError(context + ": empty link id");
        l.from = links.field(r, l_from);
        l.to = links.field(r, l_to);
        const std::string kind = links.field(r, l_kind);
        const std::optional<LinkKind> k = link_kind_from_string(kind);
        if (!k) throw IoError(context + ": unknown link kind '" + kind + "'");
        l.kind = *k;
        l.length = require_number(links, r, l_length, "length");
        l.twin_id = links.field(r, l_twin);
        l.beta = parse_number(links.field(r, l_beta));
        finish_link(l, parse_number(links.field(r, l_fft)), parse_number(links.field(r, l_cap)),
                    parse_number(links.field(r, l_speed)), links.field(r, l_control),
                    parse_number(links.field(r, l_tracks)), rail_caps, context);
        net.links.push_back(std::move(l));
    }
    return net;
}

}  // namespace

RailCapacityTable load_rail_capacity_table(const std::filesystem::path& path) {
    const ordered_json doc = parse_json_file(path);
    RailCapacityTable table;
    try {
        for (const auto& [control, by_tracks] : doc.items())
            for (const auto& [tracks, trains] : by_tracks.items())
                table.trains_per_day[control][std::stoi(tracks)] = trains.get<double>();
    } catch (const std::exception& e) {
        throw IoError(path.string() + ": " + e.what());
    }
    return table;
}

Network load_network(const std::filesystem::path& path, const RailCapacityTable* rail_caps) {
    if (std::filesystem::is_directory(path)) return load_network_csv(path, rail_caps);
    if (path.extension() == ".json") return load_network_json(path, rail_caps);
    throw IoError(path.string() + ": expected a .json file or a directory with nodes.csv/links.csv");
}

void write_network_json(const Network& net, const std::filesystem::path& path) {
    ordered_json doc;
    doc["nodes"] = ordered_json::array();
    for (const Node& n : net.nodes) {
        ordered_json jn;
        jn["id"] = n.id;
        jn["kind"] = to_string(n.kind);
        if (n.coord) {
            jn["lon"] = n.coord->lon;
            jn["lat"] = n.coord->lat;
        }
        doc["nodes"].push_back(std::move(jn));
    }
    doc["links"] = ordered_json::array();
    for (const Link& l : net.links) {
        ordered_json jl;
        jl["id"] = l.id;
        jl["from"] = l.from;
        jl["to"] = l.to;
        jl["kind"] = to_string(l.kind);
        jl["length"] = l.length;
        jl["free_flow_time"] = l.free_flow_time;
        jl["capacity"] = l.capacity;
        if (!l.twin_id.empty()) jl["twin_id"] = l.twin_id;
        if (l.beta) jl["beta"] = *l.beta;
        doc["links"].push_back(std::move(jl));
    }
    if (!net.restricted_links.empty()) doc["restricted_links"] = net.restricted_links;
    if (!net.terminal_whitelist.empty()) {
        doc["terminal_whitelist"] = ordered_json::array();
        for (const WhitelistEntry& e : net.terminal_whitelist) {
            ordered_json jw;
            jw["origin"] = e.origin;
            jw["destination"] = e.destination;
            jw["terminals"] = e.terminals;
            doc["terminal_whitelist"].push_back(std::move(jw));
        }
    }
    atomic_write(path, doc.dump(2) + "\n");
}

void write_network_csv(const Network& net, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::ostringstream nodes;
    nodes << "id,kind,lon,lat\n";
    for (const Node& n : net.nodes) {
        nodes << n.id << ',' << to_string(n.kind) << ',';
        if (n.coord) nodes << fmt_g9(n.coord->lon) << ',' << fmt_g9(n.coord->lat);
        else nodes << ',';
        nodes << '\n';
    }
    atomic_write(dir / "nodes.csv", nodes.str());

    std::ostringstream links;
    links << "id,from,to,kind,length,free_flow_time,capacity,twin_id,beta\n";
    for (const Link& l : net.links) {
        links << l.id << ',' << l.from << ',' << l.to << ',' << to_string(l.kind) << ','
              << fmt_g9(l.length) << ',' << fmt_g9(l.free_flow_time) << ',' << fmt_g9(l.capacity)
              << ',' << l.twin_id << ',' << (l.beta ? fmt_g9(*l.beta) : "") << '\n';
    }
    atomic_write(dir / "links.csv", links.str());
}

DemandTable load_demand_csv(const std::filesystem::path& path) {
    const CsvTable csv = load_csv(path);
    const int c_o = csv.require_column("origin");
    const int c_d = csv.require_column("destination");
    const int c_t = csv.require_column("q_truck");
    const int c_r = csv.require_column("q_rail");
    const int c_i = csv.require_column("q_intermodal");
    DemandTable table;
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
        DemandCell cell;
        cell.origin = csv.field(r, c_o);
        cell.destination = csv.field(r, c_d);
        if (cell.origin.empty() || cell.destination.empty())
            throw IoError(path.string() + ":" + std::to_string(csv.line_numbers[r]) +
                          ": empty origin or destination");
        cell.truck = require_number(csv, r, c_t, "q_truck");
        cell.rail = require_number(csv, r, c_r, "q_rail");
        cell.intermodal = require_number(csv, r, c_i, "q_intermodal");
        if (cell.truck < 0 || cell.rail < 0 || cell.intermodal < 0)
            throw IoError(path.string() + ":" + std::to_string(csv.line_numbers[r]) +
                          ": negative demand");
        DemandCell& slot = table.cell(cell.origin, cell.destination);
        slot.truck += cell.truck;
        slot.rail += cell.rail;
        slot.intermodal += cell.intermodal;
    }
    return table;
}

void write_demand_csv(const DemandTable& table, const std::filesystem::path& path) {
    std::ostringstream out;
    out << "origin,destination,q_truck,q_rail,q_intermodal\n";
    for (const DemandCell& c : table.cells)
        out << c.origin << ',' << c.destination << ',' << fmt_g9(c.truck) << ',' << fmt_g9(c.rail)
            << ',' << fmt_g9(c.intermodal) << '\n';
    atomic_write(path, out.str());
}

std::vector<ShipmentRecord> load_shipments_csv(const std::filesystem::path& path) {
    const CsvTable csv = load_csv(path);
    const int c_o = csv.require_column("origin");
    const int c_d = csv.require_column("destination");
    const int c_c = csv.require_column("commodity");
    const int c_t = csv.require_column("tons_per_year");
    const int c_m = csv.require_column("mode_category");
    std::vector<ShipmentRecord> records;
    records.reserve(csv.rows.size());
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
        ShipmentRecord rec;
        rec.origin = csv.field(r, c_o);
        rec.destination = csv.field(r, c_d);
        rec.commodity = csv.field(r, c_c);
        rec.tons_per_year = require_number(csv, r, c_t, "tons_per_year");
        const std::string cat = csv.field(r, c_m);
        const std::optional<ModeCategory> m = mode_category_from_string(cat);
        if (!m)
            throw IoError(path.string() + ":" + std::to_string(csv.line_numbers[r]) +
                          ": unknown mode_category '" + cat + "'");
        rec.mode_category = *m;
        records.push_back(std::move(rec));
    }
    return records;
}

FactorTables load_factor_tables(const std::filesystem::path& path) {
    const ordered_json doc = parse_json_file(path);
    FactorTables tables;
    try {
        if (doc.contains("truck_allocation")) {
            for (const ordered_json& jr : doc.at("truck_allocation")) {
                DistanceRange range;
                range.min_miles = jr.at("min_miles").get<double>();
                range.max_miles = jr.at("max_miles").get<double>();
                for (const auto& [type, share] : jr.at("shares").items())
                    range.shares[type] = share.get<double>();
                tables.truck_allocation.push_back(std::move(range));
            }
        }
        if (doc.contains("truck_equivalency"))
            for (const auto& [type, bodies] : doc.at("truck_equivalency").items())
                for (const auto& [body, tons] : bodies.items())
                    tables.truck_equivalency[type][body] = tons.get<double>();
        if (doc.contains("empty_truck"))
            for (const auto& [type, factor] : doc.at("empty_truck").items())
                tables.empty_truck[type] = factor.get<double>();
        if (doc.contains("commodity_group"))
            for (const auto& [commodity, group] : doc.at("commodity_group").items())
                tables.commodity_group[commodity] = group.get<std::string>();
        if (doc.contains("group_trainload_tons"))
            for (const auto& [group, tons] : doc.at("group_trainload_tons").items())
                tables.group_trainload_tons[group] = tons.get<double>();
        if (doc.contains("intermodal_eligible"))
            for (const ordered_json& c : doc.at("intermodal_eligible"))
                tables.intermodal_eligible.insert(c.get<std::string>());
        if (doc.contains("container_load")) tables.container_load = doc.at("container_load").get<double>();
        if (doc.contains("train_length")) tables.train_length = doc.at("train_length").get<double>();
        if (doc.contains("min_intermodal_distance"))
            tables.min_intermodal_distance = doc.at("min_intermodal_distance").get<double>();
        if (doc.contains("days_per_year")) tables.days_per_year = doc.at("days_per_year").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path.string() + ": " + e.what());
    }
    return tables;
}

std::string fmt_g9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError(tmp.string() + ": cannot open for writing");
        out << content;
        if (!out) throw IoError(tmp.string() + ": write failed");
    }
    std::filesystem::rename(tmp, path);
}

namespace {

struct LinkFlowRow {
    double flow = 0;
    double ratio = 0;
    double time = 0;
};

LinkFlowRow flow_row(const Network& net, const LpfTable& lpfs, const AssignmentResult& result,
                     int32_t a) {
    LinkFlowRow row;
    row.flow = result.link_flows[static_cast<std::size_t>(a)];
    const int32_t w = net.twin(a);
    const double opp = w >= 0 ? result.link_flows[static_cast<std::size_t>(w)] : 0.0;
    row.time = lpfs.time(a, row.flow, opp);
    const Link& l = net.link(a);
    if (l.capacity > 0) {
        const double volume = l.kind == LinkKind::rail ? row.flow + opp : row.flow;
        row.ratio = volume / l.capacity;
    }
    return row;
}

}  // namespace

void write_flows_csv(const std::filesystem::path& path, const Network& net, const LpfTable& lpfs,
                     const AssignmentResult& result) {
    std::ostringstream out;
    out << "link_id,kind,flow,capacity,volume_capacity_ratio,travel_time_hours\n";
    for (std::size_t i = 0; i < net.link_count(); ++i) {
        const int32_t a = static_cast<int32_t>(i);
        const LinkFlowRow row = flow_row(net, lpfs, result, a);
        const Link& l = net.link(a);
        out << l.id << ',' << to_string(l.kind) << ',' << fmt_g9(row.flow) << ','
            << fmt_g9(l.capacity) << ',' << fmt_g9(row.ratio) << ',' << fmt_g9(row.time) << '\n';
    }
    atomic_write(path, out.str());
}

bool geometry_complete(const Network& net) {
    if (!net.indexed()) throw std::logic_error("geometry_complete: network not indexed");
    for (std::size_t i = 0; i < net.link_count(); ++i) {
        const int32_t a = static_cast<int32_t>(i);
        if (!net.node(net.link_from(a)).coord || !net.node(net.link_to(a)).coord) return false;
    }
    return true;
}

void write_flows_geojson(const std::filesystem::path& path, const Network& net,
                         const LpfTable& lpfs, const AssignmentResult& result) {
    if (!geometry_complete(net))
        throw IoError("flows geojson: network geometry is incomplete");
    ordered_json doc;
    doc["type"] = "FeatureCollection";
    doc["features"] = ordered_json::array();
    for (std::size_t i = 0; i < net.link_count(); ++i) {
        const int32_t a = static_cast<int32_t>(i);
        const Link& l = net.link(a);
        const LinkFlowRow row = flow_row(net, lpfs, result, a);
        const LonLat& from = *net.node(net.link_from(a)).coord;
        const LonLat& to = *net.node(net.link_to(a)).coord;
        ordered_json feature;
        feature["type"] = "Feature";
        feature["geometry"]["type"] = "LineString";
        feature["geometry"]["coordinates"] = {{from.lon, from.lat}, {to.lon, to.lat}};
        feature["properties"]["link_id"] = l.id;
        feature["properties"]["kind"] = to_string(l.kind);
        feature["properties"]["flow"] = row.flow;
        feature["properties"]["capacity"] = l.capacity;
        feature["properties"]["volume_capacity_ratio"] = row.ratio;
        feature["properties"]["travel_time_hours"] = row.time;
        doc["features"].push_back(std::move(feature));
    }
    atomic_write(path, doc.dump(2) + "\n");
}

std::vector<RunReport::CongestedLink> congested_link_table(const Network& net,
                                                           const LpfTable& lpfs,
                                                           const AssignmentResult& result,
                                                           int top_n) {
    std::vector<RunReport::CongestedLink> rows;
    for (std::size_t i = 0; i < net.link_count(); ++i) {
        const int32_t a = static_cast<int32_t>(i);
        const Link& l = net.link(a);
        if (l.kind != LinkKind::road && l.kind != LinkKind::rail) continue;
        if (!(l.capacity > 0)) continue;
        const int32_t w = net.twin(a);
        const double opp = w >= 0 ? result.link_flows[static_cast<std::size_t>(w)] : 0.0;
        const double volume = l.kind == LinkKind::rail
                                  ? result.link_flows[i] + opp
                                  : result.link_flows[i];
        if (volume <= l.capacity) continue;
        RunReport::CongestedLink row;
        row.link_id = l.id;
        row.pct_over_capacity = 100.0 * (volume - l.capacity) / l.capacity;
        row.travel_time = lpfs.time(a, result.link_flows[i], opp);
        rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end(),
              [](const RunReport::CongestedLink& a, const RunReport::CongestedLink& b) {
                  if (a.pct_over_capacity != b.pct_over_capacity)
                      return a.pct_over_capacity > b.pct_over_capacity;
                  return a.link_id < b.link_id;
              });
    if (top_n >= 0 && rows.size() > static_cast<std::size_t>(top_n))
        rows.resize(static_cast<std::size_t>(top_n));
    return rows;
}

void write_report_json(const std::filesystem::path& path, const RunReport& report) {
    ordered_json doc;
    doc["algorithm"] = report.algorithm;
    doc["iterations"] = report.iterations;
    doc["converged"] = report.converged;
    doc["deterministic"] = report.deterministic;
    doc["objective_hours"] = report.objective_hours;
    doc["raw_objective"] = report.raw_objective;
    doc["ue_cost_spread_hours"] = report.ue_cost_spread_hours;
    doc["gap_trace"] = report.gap_trace;
    doc["objective_trace"] = report.objective_trace;
    doc["wall_clock_seconds"] = report.wall_clock_seconds;
    if (report.ton_miles) {
        doc["ton_miles"]["road"] = report.ton_miles->road;
        doc["ton_miles"]["rail"] = report.ton_miles->rail;
    }
    doc["congested_links"] = ordered_json::array();
    for (const RunReport::CongestedLink& row : report.congested_links) {
        ordered_json jr;
        jr["link_id"] = row.link_id;
        jr["pct_over_capacity"] = row.pct_over_capacity;
        jr["travel_time_hours"] = row.travel_time;
        doc["congested_links"].push_back(std::move(jr));
    }
    atomic_write(path, doc.dump(2) + "\n");
}

void write_beta_sweep_csv(const std::filesystem::path& path,
                          std::span<const BetaSweepRow> rows) {
    std::ostringstream out;
    out << "beta,link_id,pct_over_capacity,travel_time_hours\n";
    for (const BetaSweepRow& row : rows)
        out << fmt_g9(row.beta) << ',' << row.link_id << ',' << fmt_g9(row.pct_over_capacity)
            << ',' << fmt_g9(row.travel_time) << '\n';
    atomic_write(path, out.str());
}

}  // namespace freight
