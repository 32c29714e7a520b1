#include "freight/shortest_path.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace freight {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

LinkTimeView free_flow_times(const Network& net, const LpfTable& lpfs) {
    LinkTimeView view;
    view.time.resize(net.link_count());
    for (std::size_t i = 0; i < net.link_count(); ++i)
        view.time[i] = lpfs.time(static_cast<int32_t>(i), 0.0, 0.0);
    return view;
}

LinkTimeView times_from_flows(const Network& net, const LpfTable& lpfs,
                              std::span<const double> flows, int threads) {
    if (flows.size() != net.link_count())
        throw std::invalid_argument("times_from_flows: flow vector size mismatch");
    LinkTimeView view;
    view.time.resize(net.link_count());
    const int64_t n = static_cast<int64_t>(net.link_count());

    // Each element depends only on its own (and twin's) flow, so the parallel
    // fill writes disjoint slots and matches the serial result bit for bit.
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(std::max(threads, 1)) if (threads > 1)
#endif
    for (int64_t i = 0; i < n; ++i) {
        const int32_t a = static_cast<int32_t>(i);
        const int32_t w = net.twin(a);
        const double opp = w >= 0 ? flows[static_cast<std::size_t>(w)] : 0.0;
        view.time[static_cast<std::size_t>(i)] = lpfs.time(a, flows[static_cast<std::size_t>(i)], opp);
    }
    return view;
}

LinkTimeView length_weights(const Network& net) {
    LinkTimeView view;
    view.time.resize(net.link_count());
    for (std::size_t i = 0; i < net.link_count(); ++i) view.time[i] = net.links[i].length;
    return view;
}

bool SpTree::reached(int32_t node) const {
    return dist[static_cast<std::size_t>(node)] < kInf;
}

namespace {

/// Link-id sequence from the tree origin to `node`, for lexicographic tie
/// comparison. Short paths only, so the walk-and-reverse cost is negligible.
std::vector<const std::string*> id_chain(const Network& net, const std::vector<int32_t>& pred_node,
                                         const std::vector<int32_t>& pred_link, int32_t node) {
    std::vector<const std::string*> ids;
    int32_t v = node;
    while (pred_link[static_cast<std::size_t>(v)] >= 0) {
        ids.push_back(&net.link(pred_link[static_cast<std::size_t>(v)]).id);
        v = pred_node[static_cast<std::size_t>(v)];
    }
    std::reverse(ids.begin(), ids.end());
    return ids;
}

bool lex_less(const std::vector<const std::string*>& a, const std::vector<const std::string*>& b) {
    return std::lexicographical_compare(
        a.begin(), a.end(), b.begin(), b.end(),
        [](const std::string* x, const std::string* y) { return *x < *y; });
}

}  // namespace

SpTree build_sp_tree(const Network& net, const LinkTimeView& view, std::span<const char> mask,
                     int32_t origin) {
    if (!net.indexed()) throw std::logic_error("build_sp_tree: network not indexed");
    if (origin < 0 || static_cast<std::size_t>(origin) >= net.node_count())
        throw std::invalid_argument("build_sp_tree: unknown origin");
    if (mask.size() != net.link_count() || view.time.size() != net.link_count())
        throw std::invalid_argument("build_sp_tree: mask/time size mismatch");

    const std::size_t n = net.node_count();
    SpTree tree;
    tree.origin = origin;
    tree.dist.assign(n, kInf);
    tree.hops.assign(n, 0);
    tree.pred_node.assign(n, -1);
    tree.pred_link.assign(n, -1);
    tree.dist[static_cast<std::size_t>(origin)] = 0.0;

    using Entry = std::pair<double, int32_t>;  // (dist, node); node index breaks heap ties
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pq;
    std::vector<char> settled(n, 0);
    pq.emplace(0.0, origin);

    while (!pq.empty()) {
        const auto [d, u] = pq.top();
        pq.pop();
        if (settled[static_cast<std::size_t>(u)]) continue;
        settled[static_cast<std::size_t>(u)] = 1;

        // Centroids terminate trips; never route through one.
        if (u != origin && net.node(u).kind == NodeKind::centroid) continue;

        for (int32_t a : net.out_links(u)) {
            if (!mask[static_cast<std::size_t>(a)]) continue;
            const double w = view.time[static_cast<std::size_t>(a)];
            const int32_t v = net.link_to(a);
            if (settled[static_cast<std::size_t>(v)]) continue;
            const double cand = d + w;
            double& best = tree.dist[static_cast<std::size_t>(v)];
            if (cand < best) {
                best = cand;
                tree.hops[static_cast<std::size_t>(v)] = tree.hops[static_cast<std::size_t>(u)] + 1;
                tree.pred_node[static_cast<std::size_t>(v)] = u;
                tree.pred_link[static_cast<std::size_t>(v)] = a;
                pq.emplace(cand, v);
            } else if (cand == best) {
                // Equal cost: prefer fewer links, then the lexicographically
                // smallest link-id sequence, so reruns pick the same tree.
                const int32_t cand_hops = tree.hops[static_cast<std::size_t>(u)] + 1;
                const int32_t best_hops = tree.hops[static_cast<std::size_t>(v)];
                bool take = false;
                if (cand_hops < best_hops) {
                    take = true;
                } else if (cand_hops == best_hops) {
                    auto cand_ids = id_chain(net, tree.pred_node, tree.pred_link, u);
                    cand_ids.push_back(&net.link(a).id);
                    auto best_ids = id_chain(net, tree.pred_node, tree.pred_link, v);
                    take = lex_less(cand_ids, best_ids);
                }
                if (take) {
                    tree.hops[static_cast<std::size_t>(v)] = cand_hops;
                    tree.pred_node[static_cast<std::size_t>(v)] = u;
                    tree.pred_link[static_cast<std::size_t>(v)] = a;
                }
            }
        }
    }
    return tree;
}

std::optional<Path> tree_path(const Network& net, const SpTree& tree, int32_t destination,
                              Mode mode) {
    if (destination < 0 || static_cast<std::size_t>(destination) >= net.node_count())
        throw std::invalid_argument("tree_path: unknown destination");
    if (!tree.reached(destination)) return std::nullopt;
    Path p;
    p.origin = tree.origin;
    p.destination = destination;
    p.mode = mode;
    int32_t v = destination;
    while (v != tree.origin) {
        const int32_t a = tree.pred_link[static_cast<std::size_t>(v)];
        p.links.push_back(a);
        v = tree.pred_node[static_cast<std::size_t>(v)];
    }
    std::reverse(p.links.begin(), p.links.end());
    return p;
}

std::vector<char> od_mode_mask(const Network& net, Mode mode, int32_t origin,
                               int32_t destination) {
    std::vector<char> mask = mode_link_mask(net, mode);
    if (mode != Mode::intermodal) return mask;
    const std::set<int32_t>* allowed = net.whitelist_for(origin, destination);
    if (!allowed) return mask;
    for (std::size_t i = 0; i < net.link_count(); ++i)
        if (net.links[i].kind == LinkKind::terminal && !allowed->count(static_cast<int32_t>(i)))
            mask[i] = 0;
    return mask;
}

std::optional<Path> shortest_path(const Network& net, const LinkTimeView& times, Mode mode,
                                  const std::string& origin, const std::string& destination) {
    const int32_t o = net.node_idx(origin);
    const int32_t d = net.node_idx(destination);
    if (o < 0) throw std::invalid_argument("shortest_path: unknown origin " + origin);
    if (d < 0) throw std::invalid_argument("shortest_path: unknown destination " + destination);
    if (o == d) throw std::invalid_argument("shortest_path: origin equals destination");
    if (net.node(o).kind != NodeKind::centroid || net.node(d).kind != NodeKind::centroid)
        throw std::invalid_argument("shortest_path: endpoints must be centroids");
    const std::vector<char> mask = od_mode_mask(net, mode, o, d);
    const SpTree tree = build_sp_tree(net, times, mask, o);
    return tree_path(net, tree, d, mode);
}

double path_time(const Path& path, const LinkTimeView& times) {
    double total = 0.0;
    for (int32_t a : path.links) total += times.at(a);
    return total;
}

std::vector<int32_t> symmetric_difference_links(const Path& p1, const Path& p2) {
    if (p1.origin != p2.origin || p1.destination != p2.destination || p1.mode != p2.mode)
        throw std::invalid_argument("symmetric_difference_links: paths are not comparable");
    std::vector<int32_t> a = p1.links;
    std::vector<int32_t> b = p2.links;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::vector<int32_t> out;
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

}  // namespace freight
