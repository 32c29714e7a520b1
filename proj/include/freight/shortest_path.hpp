#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "freight/link_performance.hpp"
#include "freight/network.hpp"

namespace freight {

/// Immutable per-link travel time (or generic weight) snapshot. Built once,
/// then read concurrently by any number of searches.
struct LinkTimeView {
    std::vector<double> time;  // hours, by link index

    double at(int32_t a) const {
        if (a < 0 || static_cast<std::size_t>(a) >= time.size())
            throw std::invalid_argument("LinkTimeView: unknown link");
        return time[static_cast<std::size_t>(a)];
    }
};

/// Times at zero flow everywhere.
LinkTimeView free_flow_times(const Network& net, const LpfTable& lpfs);

/// Times at the given link flows; rail links see their twin's flow as the
/// opposite direction. Parallelized over links when threads > 1 with
/// per-element writes, so the result is identical for any thread count.
LinkTimeView times_from_flows(const Network& net, const LpfTable& lpfs,
                              std::span<const double> flows, int threads = 1);

/// Per-link lengths as a weight view (for distance-shortest searches).
LinkTimeView length_weights(const Network& net);

struct Path {
    int32_t origin = -1;
    int32_t destination = -1;
    Mode mode = Mode::truck;
    std::vector<int32_t> links;

    bool same_links(const Path& other) const { return links == other.links; }
};

/// One-to-all label-setting search tree from a single origin over the links
/// enabled in `mask`. Centroids other than the origin are never expanded, so
/// paths cannot shortcut through a demand zone. Ties are broken by fewer
/// links, then by lexicographically smallest link-id sequence.
struct SpTree {
    int32_t origin = -1;
    std::vector<double> dist;
    std::vector<int32_t> hops;
    std::vector<int32_t> pred_node;
    std::vector<int32_t> pred_link;

    bool reached(int32_t node) const;
};

SpTree build_sp_tree(const Network& net, const LinkTimeView& view,
                     std::span<const char> mask, int32_t origin);

/// Path from the tree's origin to `destination`, or nullopt when unreachable.
std::optional<Path> tree_path(const Network& net, const SpTree& tree, int32_t destination,
                              Mode mode);

/// Least-travel-time simple path between two centroids for a mode, honoring
/// restricted links and (for intermodal) the O-D pair's terminal whitelist.
/// Returns nullopt when no path exists.
std::optional<Path> shortest_path(const Network& net, const LinkTimeView& times, Mode mode,
                                  const std::string& origin, const std::string& destination);

/// Mode mask for one O-D pair: the plain mode mask, with terminal links
/// outside the pair's whitelist (if any) removed for intermodal searches.
std::vector<char> od_mode_mask(const Network& net, Mode mode, int32_t origin,
                               int32_t destination);

/// Sum of link times along the path, fixed delays included.
double path_time(const Path& path, const LinkTimeView& times);

/// Links on exactly one of the two paths. Both paths must share origin,
/// destination, and mode.
std::vector<int32_t> symmetric_difference_links(const Path& p1, const Path& p2);

}  // namespace freight
