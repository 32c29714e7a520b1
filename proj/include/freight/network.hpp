#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace freight {

enum class NodeKind { centroid, road_junction, rail_junction };
enum class LinkKind { road, rail, terminal, road_connector, rail_connector };
enum class Mode { truck = 0, rail = 1, intermodal = 2 };

const char* to_string(NodeKind k);
const char* to_string(LinkKind k);
const char* to_string(Mode m);
std::optional<NodeKind> node_kind_from_string(const std::string& s);
std::optional<LinkKind> link_kind_from_string(const std::string& s);
std::optional<Mode> mode_from_string(const std::string& s);

struct LonLat {
    double lon = 0;
    double lat = 0;
    bool operator==(const LonLat&) const = default;
};

struct Node {
    std::string id;
    NodeKind kind = NodeKind::road_junction;
    std::optional<LonLat> coord;
};

/// Directed link. Rail links come in opposite-direction twin pairs sharing
/// one physical track; terminal links carry a fixed transfer delay and join
/// a road junction to a rail junction. Connectors attach centroids.
struct Link {
    std::string id;
    std::string from;
    std::string to;
    LinkKind kind = LinkKind::road;
    double length = 0;           // miles
    double free_flow_time = 0;   // hours; fixed delay for terminal/connector
    double capacity = 0;         // vehicles/day or trains/day; unused for terminal/connector
    std::string twin_id;         // rail only: the opposite-direction link
    std::optional<double> beta;  // optional per-link rail penalty override
};

struct Violation {
    std::string subject;  // node or link id ("" for global issues)
    std::string message;
};

using ValidationReport = std::vector<Violation>;

struct WhitelistEntry {
    std::string origin;
    std::string destination;
    std::vector<std::string> terminals;  // allowed terminal link ids for this O-D pair
};

class Network {
public:
    std::vector<Node> nodes;
    std::vector<Link> links;
    std::vector<std::string> restricted_links;        // excluded from every mode's link set
    std::vector<WhitelistEntry> terminal_whitelist;   // per-O-D allowed terminal sets

    /// Builds dense node/link indexes and adjacency. Must be called after the
    /// tables are populated and validated; throws on duplicate ids or dangling
    /// endpoint references. The network is immutable once indexed.
    void build_index();
    bool indexed() const { return indexed_; }

    std::size_t node_count() const { return nodes.size(); }
    std::size_t link_count() const { return links.size(); }

    int32_t node_idx(const std::string& id) const;  // -1 if unknown
    int32_t link_idx(const std::string& id) const;  // -1 if unknown
    const Node& node(int32_t i) const { return nodes[static_cast<std::size_t>(i)]; }
    const Link& link(int32_t i) const { return links[static_cast<std::size_t>(i)]; }

    /// Twin link index for rail links, -1 otherwise.
    int32_t twin(int32_t link) const { return twin_[static_cast<std::size_t>(link)]; }
    int32_t link_from(int32_t link) const { return from_[static_cast<std::size_t>(link)]; }
    int32_t link_to(int32_t link) const { return to_[static_cast<std::size_t>(link)]; }
    bool is_restricted(int32_t link) const { return restricted_[static_cast<std::size_t>(link)]; }

    /// Outgoing links of a node, ordered by link id for deterministic scans.
    const std::vector<int32_t>& out_links(int32_t node) const {
        return out_links_[static_cast<std::size_t>(node)];
    }

    std::vector<int32_t> centroid_indices() const;

    /// Allowed terminal set for an O-D pair, or nullptr when unrestricted.
    const std::set<int32_t>* whitelist_for(int32_t origin, int32_t destination) const;

private:
    bool indexed_ = false;
    std::unordered_map<std::string, int32_t> node_index_;
    std::unordered_map<std::string, int32_t> link_index_;
    std::vector<int32_t> twin_;
    std::vector<int32_t> from_;
    std::vector<int32_t> to_;
    std::vector<char> restricted_;
    std::vector<std::vector<int32_t>> out_links_;
    std::map<std::pair<int32_t, int32_t>, std::set<int32_t>> whitelist_;
};

/// Checks every structural invariant of the network tables and returns one
/// entry per breach. An empty report means the network is fit for assignment.
/// Works on the raw tables; the network does not need to be indexed.
ValidationReport validate_network(const Network& net);

/// Links usable by a mode: truck = road + road_connector, rail = rail +
/// rail_connector, intermodal = everything. Restricted links are dropped.
std::vector<std::string> mode_link_set(const Network& net, Mode mode);

/// Dense per-link mask of mode_link_set; requires an indexed network.
std::vector<char> mode_link_mask(const Network& net, Mode mode);

/// The opposite-direction link of a rail link. Throws std::invalid_argument
/// for unknown or non-rail links.
const Link& twin_of(const Network& net, const std::string& rail_link_id);

}  // namespace freight
