#include "freight/network.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace freight {

const char* to_string(NodeKind k) {
    switch (k) {
        case NodeKind::centroid: return "centroid";
        case NodeKind::road_junction: return "road_junction";
        case NodeKind::rail_junction: return "rail_junction";
    }
    return "?";
}

const char* to_string(LinkKind k) {
    switch (k) {
        case LinkKind::road: return "road";
        case LinkKind::rail: return "rail";
        case LinkKind::terminal: return "terminal";
        case LinkKind::road_connector: return "road_connector";
        case LinkKind::rail_connector: return "rail_connector";
    }
    return "?";
}

const char* to_string(Mode m) {
    switch (m) {
        case Mode::truck: return "truck";
        case Mode::rail: return "rail";
        case Mode::intermodal: return "intermodal";
    }
    return "?";
}

std::optional<NodeKind> node_kind_from_string(const std::string& s) {
    if (s == "centroid") return NodeKind::centroid;
    if (s == "road_junction") return NodeKind::road_junction;
    if (s == "rail_junction") return NodeKind::rail_junction;
    return std::nullopt;
}

std::optional<LinkKind> link_kind_from_string(const std::string& s) {
    if (s == "road") return LinkKind::road;
    if (s == "rail") return LinkKind::rail;
    if (s == "terminal") return LinkKind::terminal;
    if (s == "road_connector") return LinkKind::road_connector;
    if (s == "rail_connector") return LinkKind::rail_connector;
    return std::nullopt;
}

std::optional<Mode> mode_from_string(const std::string& s) {
    if (s == "truck") return Mode::truck;
    if (s == "rail") return Mode::rail;
    if (s == "intermodal") return Mode::intermodal;
    return std::nullopt;
}

void Network::build_index() {
    node_index_.clear();
    link_index_.clear();
    node_index_.reserve(nodes.size());
    link_index_.reserve(links.size());

    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!node_index_.emplace(nodes[i].id, static_cast<int32_t>(i)).second)
            throw std::invalid_argument("duplicate node id: " + nodes[i].id);
    }
    for (std::size_t i = 0; i < links.size(); ++i) {
        if (!link_index_.emplace(links[i].id, static_cast<int32_t>(i)).second)
            throw std::invalid_argument("duplicate link id: " + links[i].id);
    }

    from_.assign(links.size(), -1);
    to_.assign(links.size(), -1);
    twin_.assign(links.size(), -1);
    restricted_.assign(links.size(), 0);
    out_links_.assign(nodes.size(), {});

    for (std::size_t i = 0; i < links.size(); ++i) {
        const Link& l = links[i];
        auto f = node_index_.find(l.from);
        auto t = node_index_.find(l.to);
        if (f == node_index_.end() || t == node_index_.end())
            throw std::invalid_argument("link " + l.id + " references a missing node");
        from_[i] = f->second;
        to_[i] = t->second;
        out_links_[static_cast<std::size_t>(f->second)].push_back(static_cast<int32_t>(i));
        if (!l.twin_id.empty()) {
            auto w = link_index_.find(l.twin_id);
            if (w == link_index_.end())
                throw std::invalid_argument("link " + l.id + " names a missing twin " + l.twin_id);
            twin_[i] = w->second;
        }
    }

    // Deterministic relaxation order regardless of file order.
    for (auto& out : out_links_)
        std::sort(out.begin(), out.end(), [this](int32_t a, int32_t b) {
            return links[static_cast<std::size_t>(a)].id < links[static_cast<std::size_t>(b)].id;
        });

    for (const std::string& id : restricted_links) {
        auto it = link_index_.find(id);
        if (it == link_index_.end())
            throw std::invalid_argument("restricted link list names a missing link: " + id);
        restricted_[static_cast<std::size_t>(it->second)] = 1;
    }

    whitelist_.clear();
    for (const WhitelistEntry& e : terminal_whitelist) {
        auto o = node_index_.find(e.origin);
        auto d = node_index_.find(e.destination);
        if (o == node_index_.end() || d == node_index_.end())
            throw std::invalid_argument("terminal whitelist names a missing node");
        std::set<int32_t>& allowed = whitelist_[{o->second, d->second}];
        for (const std::string& id : e.terminals) {
            auto it = link_index_.find(id);
            if (it == link_index_.end())
                throw std::invalid_argument("terminal whitelist names a missing link: " + id);
            allowed.insert(it->second);
        }
    }

    indexed_ = true;
}

int32_t Network::node_idx(const std::string& id) const {
    auto it = node_index_.find(id);
    return it == node_index_.end() ? -1 : it->second;
}

int32_t Network::link_idx(const std::string& id) const {
    auto it = link_index_.find(id);
    return it == link_index_.end() ? -1 : it->second;
}

std::vector<int32_t> Network::centroid_indices() const {
    std::vector<int32_t> out;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].kind == NodeKind::centroid) out.push_back(static_cast<int32_t>(i));
    return out;
}

const std::set<int32_t>* Network::whitelist_for(int32_t origin, int32_t destination) const {
    auto it = whitelist_.find({origin, destination});
    return it == whitelist_.end() ? nullptr : &it->second;
}

namespace {

bool finite_ge(double v, double lo) { return std::isfinite(v) && v >= lo; }
bool finite_gt(double v, double lo) { return std::isfinite(v) && v > lo; }

}  // namespace

ValidationReport validate_network(const Network& net) {
    ValidationReport report;
    auto flag = [&report](const std::string& subject, std::string message) {
        report.push_back({subject, std::move(message)});
    };

    std::unordered_map<std::string, const Node*> node_by_id;
    std::unordered_set<std::string> dup_nodes;
    for (const Node& n : net.nodes) {
        if (!node_by_id.emplace(n.id, &n).second && dup_nodes.insert(n.id).second)
            flag(n.id, "duplicate node id");
    }

    std::unordered_map<std::string, const Link*> link_by_id;
    std::unordered_set<std::string> dup_links;
    for (const Link& l : net.links) {
        if (!link_by_id.emplace(l.id, &l).second && dup_links.insert(l.id).second)
            flag(l.id, "duplicate link id");
    }

    auto kind_of = [&node_by_id](const std::string& id) -> std::optional<NodeKind> {
        auto it = node_by_id.find(id);
        if (it == node_by_id.end()) return std::nullopt;
        return it->second->kind;
    };

    for (const Link& l : net.links) {
        const auto from_kind = kind_of(l.from);
        const auto to_kind = kind_of(l.to);
        if (!from_kind) flag(l.id, "from node '" + l.from + "' does not exist");
        if (!to_kind) flag(l.id, "to node '" + l.to + "' does not exist");

        if (!finite_ge(l.length, 0)) flag(l.id, "length must be >= 0");
        const bool congestible = l.kind == LinkKind::road || l.kind == LinkKind::rail;
        if (congestible) {
            if (!finite_gt(l.free_flow_time, 0)) flag(l.id, "free_flow_time must be > 0");
            if (!finite_gt(l.capacity, 0)) flag(l.id, "capacity must be > 0");
        } else if (!finite_ge(l.free_flow_time, 0)) {
            flag(l.id, "fixed delay must be >= 0");
        }
        if (l.kind == LinkKind::rail && l.beta && !(std::isfinite(*l.beta) && *l.beta >= 1))
            flag(l.id, "beta override must be >= 1");
        if (l.kind != LinkKind::rail && !l.twin_id.empty())
            flag(l.id, "only rail links may name a twin");

        if (!from_kind || !to_kind) continue;
        const NodeKind fk = *from_kind;
        const NodeKind tk = *to_kind;
        switch (l.kind) {
            case LinkKind::road:
                if (fk != NodeKind::road_junction || tk != NodeKind::road_junction)
                    flag(l.id, "road link must join two road junctions");
                break;
            case LinkKind::rail:
                if (fk != NodeKind::rail_junction || tk != NodeKind::rail_junction)
                    flag(l.id, "rail link must join two rail junctions");
                break;
            case LinkKind::terminal:
                if (!((fk == NodeKind::road_junction && tk == NodeKind::rail_junction) ||
                      (fk == NodeKind::rail_junction && tk == NodeKind::road_junction)))
                    flag(l.id, "terminal link must join one road junction and one rail junction");
                break;
            case LinkKind::road_connector:
                if (!((fk == NodeKind::centroid && tk == NodeKind::road_junction) ||
                      (fk == NodeKind::road_junction && tk == NodeKind::centroid)))
                    flag(l.id, "road connector must join a centroid and a road junction");
                break;
            case LinkKind::rail_connector:
                if (!((fk == NodeKind::centroid && tk == NodeKind::rail_junction) ||
                      (fk == NodeKind::rail_junction && tk == NodeKind::centroid)))
                    flag(l.id, "rail connector must join a centroid and a rail junction");
                break;
        }
    }

    // Twin pairing: symmetric, involutive, never self, opposite direction,
    // matching physical properties.
    for (const Link& l : net.links) {
        if (l.kind != LinkKind::rail) continue;
        if (l.twin_id.empty()) {
            flag(l.id, "rail link has no twin");
            continue;
        }
        auto it = link_by_id.find(l.twin_id);
        if (it == link_by_id.end()) {
            flag(l.id, "twin '" + l.twin_id + "' does not exist");
            continue;
        }
        const Link& w = *it->second;
        if (&w == &l) {
            flag(l.id, "rail link is its own twin");
            continue;
        }
        if (w.kind != LinkKind::rail) {
            flag(l.id, "twin '" + w.id + "' is not a rail link");
            continue;
        }
        if (w.twin_id != l.id) flag(l.id, "twin pairing is not symmetric");
        if (!(w.from == l.to && w.to == l.from))
            flag(l.id, "twin must run in the opposite direction");
        if (w.length != l.length || w.free_flow_time != l.free_flow_time ||
            w.capacity != l.capacity)
            flag(l.id, "twins must share length, free_flow_time, and capacity");
        if (l.beta.has_value() != w.beta.has_value() ||
            (l.beta && w.beta && *l.beta != *w.beta))
            flag(l.id, "twins must share the beta override");
    }

    for (const std::string& id : net.restricted_links)
        if (!link_by_id.count(id)) flag(id, "restricted link does not exist");

    for (const WhitelistEntry& e : net.terminal_whitelist) {
        for (const std::string& nid : {e.origin, e.destination}) {
            auto it = node_by_id.find(nid);
            if (it == node_by_id.end())
                flag(nid, "terminal whitelist names a missing node");
            else if (it->second->kind != NodeKind::centroid)
                flag(nid, "terminal whitelist endpoints must be centroids");
        }
        for (const std::string& lid : e.terminals) {
            auto it = link_by_id.find(lid);
            if (it == link_by_id.end())
                flag(lid, "terminal whitelist names a missing link");
            else if (it->second->kind != LinkKind::terminal)
                flag(lid, "terminal whitelist entries must be terminal links");
        }
    }

    return report;
}

namespace {

bool mode_allows(Mode mode, LinkKind kind) {
    switch (mode) {
        case Mode::truck:
            return kind == LinkKind::road || kind == LinkKind::road_connector;
        case Mode::rail:
            return kind == LinkKind::rail || kind == LinkKind::rail_connector;
        case Mode::intermodal:
            return true;
    }
    return false;
}

}  // namespace

std::vector<std::string> mode_link_set(const Network& net, Mode mode) {
    std::unordered_set<std::string> restricted(net.restricted_links.begin(),
                                               net.restricted_links.end());
    std::vector<std::string> out;
    for (const Link& l : net.links)
        if (mode_allows(mode, l.kind) && !restricted.count(l.id)) out.push_back(l.id);
    return out;
}

std::vector<char> mode_link_mask(const Network& net, Mode mode) {
    if (!net.indexed()) throw std::logic_error("mode_link_mask: network not indexed");
    std::vector<char> mask(net.link_count(), 0);
    for (std::size_t i = 0; i < net.link_count(); ++i) {
        const int32_t a = static_cast<int32_t>(i);
        mask[i] = mode_allows(mode, net.links[i].kind) && !net.is_restricted(a);
    }
    return mask;
}

const Link& twin_of(const Network& net, const std::string& rail_link_id) {
    if (!net.indexed()) throw std::logic_error("twin_of: network not indexed");
    const int32_t a = net.link_idx(rail_link_id);
    if (a < 0) throw std::invalid_argument("twin_of: unknown link " + rail_link_id);
    if (net.link(a).kind != LinkKind::rail)
        throw std::invalid_argument("twin_of: " + rail_link_id + " is not a rail link");
    const int32_t w = net.twin(a);
    if (w < 0) throw std::invalid_argument("twin_of: rail link " + rail_link_id + " has no twin");
    return net.link(w);
}

}  // namespace freight
