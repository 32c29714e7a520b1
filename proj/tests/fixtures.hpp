#pragma once

// Shared test fixtures: small networks with known structure and, where
// possible, analytically known equilibria.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "freight/demand.hpp"
#include "freight/network.hpp"

namespace fixtures {

using freight::DemandTable;
using freight::Link;
using freight::LinkKind;
using freight::Network;
using freight::Node;
using freight::NodeKind;

struct Fixture {
    Network net;
    DemandTable demand;
};

inline void add_node(Network& net, const std::string& id, NodeKind kind,
                     std::optional<freight::LonLat> coord = std::nullopt) {
    net.nodes.push_back({id, kind, coord});
}

inline void add_link(Network& net, const std::string& id, const std::string& from,
                     const std::string& to, LinkKind kind, double length, double fft, double cap,
                     const std::string& twin = "",
                     std::optional<double> beta = std::nullopt) {
    net.links.push_back({id, from, to, kind, length, fft, cap, twin, beta});
}

/// Adds a rail twin pair a<->b with shared physical properties.
inline void add_rail_pair(Network& net, const std::string& base, const std::string& a,
                          const std::string& b, double length, double fft, double cap,
                          std::optional<double> beta = std::nullopt) {
    add_link(net, base + "_f", a, b, LinkKind::rail, length, fft, cap, base + "_r", beta);
    add_link(net, base + "_r", b, a, LinkKind::rail, length, fft, cap, base + "_f", beta);
}

// ---------------------------------------------------------------------------
// Two parallel road links; t0 = 1, capacities (20, 10), q_truck = 30.
// Equal BPR times force the split (20, 10): both links run exactly at
// capacity with time 1.15 h.
// ---------------------------------------------------------------------------
inline Fixture two_parallel_links(double q = 30.0) {
    Fixture fx;
    Network& net = fx.net;
    add_node(net, "A", NodeKind::centroid);
    add_node(net, "B", NodeKind::centroid);
    add_node(net, "r1", NodeKind::road_junction);
    add_node(net, "r2", NodeKind::road_junction);
    add_link(net, "cA", "A", "r1", LinkKind::road_connector, 0.0, 0.0, 0.0);
    add_link(net, "cB", "r2", "B", LinkKind::road_connector, 0.0, 0.0, 0.0);
    add_link(net, "p_wide", "r1", "r2", LinkKind::road, 10.0, 1.0, 20.0);
    add_link(net, "p_narrow", "r1", "r2", LinkKind::road, 10.0, 1.0, 10.0);
    net.build_index();
    fx.demand.cell("A", "B").truck = q;
    return fx;
}

// ---------------------------------------------------------------------------
// Three parallel road links with staggered free-flow times and capacities.
// No closed form; the equilibrium is pinned by the grid-search oracle.
// ---------------------------------------------------------------------------
inline Fixture three_parallel_links(double q = 40.0) {
    Fixture fx;
    Network& net = fx.net;
    add_node(net, "A", NodeKind::centroid);
    add_node(net, "B", NodeKind::centroid);
    add_node(net, "r1", NodeKind::road_junction);
    add_node(net, "r2", NodeKind::road_junction);
    add_link(net, "cA", "A", "r1", LinkKind::road_connector, 0.0, 0.0, 0.0);
    add_link(net, "cB", "r2", "B", LinkKind::road_connector, 0.0, 0.0, 0.0);
    add_link(net, "p1", "r1", "r2", LinkKind::road, 10.0, 1.0, 15.0);
    add_link(net, "p2", "r1", "r2", LinkKind::road, 12.0, 1.2, 20.0);
    add_link(net, "p3", "r1", "r2", LinkKind::road, 15.0, 1.5, 25.0);
    net.build_index();
    fx.demand.cell("A", "B").truck = q;
    return fx;
}

// ---------------------------------------------------------------------------
// Intermodal chain: a long all-road route (10 h) against a
// terminal-rail-terminal route (6 h including both transfer delays). Rail
// is reachable only through the terminals, so intermodal demand must cross
// them while trucks are confined to the road route.
//
//   O --cOa--> a ==road_long==> b --cbD--> D         (road route, 10 h)
//   a --term_a--> u ==rail==> v --term_b--> b        (rail leg, twinned)
// ---------------------------------------------------------------------------
inline Fixture intermodal_chain() {
    Fixture fx;
    Network& net = fx.net;
    add_node(net, "O", NodeKind::centroid, freight::LonLat{-90.0, 35.0});
    add_node(net, "D", NodeKind::centroid, freight::LonLat{-80.0, 35.0});
    add_node(net, "a", NodeKind::road_junction, freight::LonLat{-89.9, 35.0});
    add_node(net, "b", NodeKind::road_junction, freight::LonLat{-80.1, 35.0});
    add_node(net, "u", NodeKind::rail_junction, freight::LonLat{-89.9, 35.1});
    add_node(net, "v", NodeKind::rail_junction, freight::LonLat{-80.1, 35.1});
    add_link(net, "cOa", "O", "a", LinkKind::road_connector, 5.0, 0.0, 0.0);
    add_link(net, "cbD", "b", "D", LinkKind::road_connector, 5.0, 0.0, 0.0);
    add_link(net, "road_long", "a", "b", LinkKind::road, 600.0, 10.0, 2000.0);
    add_link(net, "term_a", "a", "u", LinkKind::terminal, 0.0, 0.5, 0.0);
    add_link(net, "term_b", "v", "b", LinkKind::terminal, 0.0, 0.5, 0.0);
    add_rail_pair(net, "rail_uv", "u", "v", 600.0, 5.0, 50.0);
    net.build_index();
    return fx;
}

// ---------------------------------------------------------------------------
// Congested rail corridor: a short bottleneck track (C = 10) against a long
// two-segment bypass with ample capacity. Rail demand of 30 trains/day
// forces the bottleneck over capacity; raising the penalty rate pushes
// traffic onto the bypass.
// ---------------------------------------------------------------------------
inline Fixture rail_corridor(double q_rail = 30.0) {
    Fixture fx;
    Network& net = fx.net;
    add_node(net, "O", NodeKind::centroid);
    add_node(net, "D", NodeKind::centroid);
    add_node(net, "u", NodeKind::rail_junction);
    add_node(net, "v", NodeKind::rail_junction);
    add_node(net, "w", NodeKind::rail_junction);
    add_link(net, "rO_out", "O", "u", LinkKind::rail_connector, 0.0, 0.01, 0.0);
    add_link(net, "rO_in", "u", "O", LinkKind::rail_connector, 0.0, 0.01, 0.0);
    add_link(net, "rD_out", "v", "D", LinkKind::rail_connector, 0.0, 0.01, 0.0);
    add_link(net, "rD_in", "D", "v", LinkKind::rail_connector, 0.0, 0.01, 0.0);
    add_rail_pair(net, "bottleneck", "u", "v", 200.0, 1.0, 10.0);
    add_rail_pair(net, "bypass_a", "u", "w", 300.0, 1.5, 100.0);
    add_rail_pair(net, "bypass_b", "w", "v", 300.0, 1.5, 100.0);
    net.build_index();
    fx.demand.cell("O", "D").rail = q_rail;
    return fx;
}

// ---------------------------------------------------------------------------
// Twinned rail chain with equal opposing demands and a unique path per
// direction: the UE flows on each twin pair are exactly the class demands,
// so directional symmetry must hold to machine precision.
// ---------------------------------------------------------------------------
inline Fixture twin_symmetric(double q_each_way = 7.0) {
    Fixture fx;
    Network& net = fx.net;
    add_node(net, "O", NodeKind::centroid);
    add_node(net, "D", NodeKind::centroid);
    add_node(net, "u", NodeKind::rail_junction);
    add_node(net, "m", NodeKind::rail_junction);
    add_node(net, "v", NodeKind::rail_junction);
    add_link(net, "rO_out", "O", "u", LinkKind::rail_connector, 0.0, 0.01, 0.0);
    add_link(net, "rO_in", "u", "O", LinkKind::rail_connector, 0.0, 0.01, 0.0);
    add_link(net, "rD_out", "v", "D", LinkKind::rail_connector, 0.0, 0.01, 0.0);
    add_link(net, "rD_in", "D", "v", LinkKind::rail_connector, 0.0, 0.01, 0.0);
    add_rail_pair(net, "seg1", "u", "m", 150.0, 1.0, 12.0);
    add_rail_pair(net, "seg2", "m", "v", 150.0, 1.0, 12.0);
    net.build_index();
    fx.demand.cell("O", "D").rail = q_each_way;
    fx.demand.cell("D", "O").rail = q_each_way;
    return fx;
}

// ---------------------------------------------------------------------------
// Congested multi-class fixture: an n x n road grid, a twinned rail
// mainline along the bottom edge with terminals every other column, and
// `centroids` zones along the top row. Demands come from a portable linear
// congruential draw so every platform builds the same table.
// ---------------------------------------------------------------------------
inline std::string grid_node(int i, int j) {
    return "g" + std::to_string(i) + "_" + std::to_string(j);
}

inline Fixture congested_grid(int n = 6, int centroids = 20, unsigned seed = 2024,
                              double road_cap = 600.0, double truck_lo = 20.0,
                              double truck_hi = 80.0) {
    Fixture fx;
    Network& net = fx.net;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) add_node(net, grid_node(i, j), NodeKind::road_junction);
    for (int j = 0; j < n; ++j) add_node(net, "l" + std::to_string(j), NodeKind::rail_junction);

    // Roads are 10-mile links at 50 mph free flow; rails run at 60.
    auto add_road_pair = [&net, road_cap](const std::string& a, const std::string& b) {
        add_link(net, "road_" + a + "_" + b, a, b, LinkKind::road, 10.0, 0.2, road_cap);
        add_link(net, "road_" + b + "_" + a, b, a, LinkKind::road, 10.0, 0.2, road_cap);
    };
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (j + 1 < n) add_road_pair(grid_node(i, j), grid_node(i, j + 1));
            if (i + 1 < n) add_road_pair(grid_node(i, j), grid_node(i + 1, j));
        }
    }
    for (int j = 0; j + 1 < n; ++j)
        add_rail_pair(net, "rail_" + std::to_string(j), "l" + std::to_string(j),
                      "l" + std::to_string(j + 1), 10.0, 10.0 / 60.0, 40.0);
    for (int j = 0; j < n; j += 2) {
        const std::string road = grid_node(n - 1, j);
        const std::string rail = "l" + std::to_string(j);
        add_link(net, "term_" + std::to_string(j) + "_out", road, rail, LinkKind::terminal, 0.0,
                 0.05, 0.0);
        add_link(net, "term_" + std::to_string(j) + "_in", rail, road, LinkKind::terminal, 0.0,
                 0.05, 0.0);
    }
    // Direct rail access only at every third zone: everywhere else
    // intermodal units must reach the mainline by road through a terminal.
    const auto rail_access = [](int c) { return c % 3 == 0; };
    for (int c = 0; c < centroids; ++c) {
        const std::string id = "z" + std::to_string(c);
        const int col = (c * (n - 1)) / std::max(centroids - 1, 1);
        // Alternate zones between the top row and the bottom (rail-side) row
        // so the mainline competes with the road grid for intermodal units.
        const int row = (c % 2 == 0) ? 0 : n - 1;
        const std::string road = grid_node(row, col);
        const std::string rail = "l" + std::to_string(col);
        add_node(net, id, NodeKind::centroid);
        add_link(net, "con_" + id + "_out", id, road, LinkKind::road_connector, 0.0, 0.01, 0.0);
        add_link(net, "con_" + id + "_in", road, id, LinkKind::road_connector, 0.0, 0.01, 0.0);
        if (rail_access(c)) {
            add_link(net, "rcon_" + id + "_out", id, rail, LinkKind::rail_connector, 0.0, 0.02,
                     0.0);
            add_link(net, "rcon_" + id + "_in", rail, id, LinkKind::rail_connector, 0.0, 0.02,
                     0.0);
        }
    }
    net.build_index();

    // Portable deterministic demand: raw LCG draws mapped to [0, 1). Train
    // demand only joins zones that both sit on the rail network.
    std::minstd_rand rng(seed);
    auto unit = [&rng]() { return static_cast<double>(rng() % 100000) / 100000.0; };
    for (int a = 0; a < centroids; ++a) {
        for (int b = 0; b < centroids; ++b) {
            if (a == b) continue;
            freight::DemandCell& cell =
                fx.demand.cell("z" + std::to_string(a), "z" + std::to_string(b));
            cell.truck = truck_lo + (truck_hi - truck_lo) * unit();
            if (rail_access(a) && rail_access(b)) cell.rail = 0.5 + 1.5 * unit();
            if ((a * 7 + b) % 5 == 0) cell.intermodal = 0.25;
        }
    }
    return fx;
}

// ---------------------------------------------------------------------------
// A congested trunk corridor with a ladder of market-specific relief routes.
// Eight shipper zones feed one three-segment trunk toward a shared terminal
// market, and each shipper also owns a private bypass whose free-flow time
// sits on its own rung, either clearly below or clearly above the loaded
// trunk time. At equilibrium the trunk runs at half again its capacity
// carrying the five markets whose bypasses are slow, the three fast bypasses
// pull their markets off, and every market strictly prefers its settled
// route by several minutes. The all-or-nothing start floods the trunk, so a
// solver has to peel the ladder back one band at a time before the routing
// locks in. A rail mainline loaded past its capacity and an intermodal hub
// pair (dray leg, terminal dwell, two rail segments, dray leg) supply the
// other two demand classes; both ride fixed corridors, so all of the route
// choice lives in the truck ladder.
// ---------------------------------------------------------------------------
inline Fixture bypass_ladder() {
    Fixture fx;
    Network& net = fx.net;
    // Bypass free-flow times in hours. The trunk path costs about 1.31 h
    // loaded at equilibrium, so the first three rungs win their markets away
    // from the trunk and the last five lose.
    const double rung[] = {0.91, 1.02, 1.13, 1.35, 1.46, 1.57, 1.68, 1.79};
    const int markets = static_cast<int>(sizeof(rung) / sizeof(rung[0]));
    const double q_truck = 90.0;

    for (int j = 0; j < 4; ++j)
        add_node(net, "c" + std::to_string(j), NodeKind::road_junction);
    for (int j = 0; j < 3; ++j)
        add_link(net, "main_" + std::to_string(j), "c" + std::to_string(j),
                 "c" + std::to_string(j + 1), LinkKind::road, 12.0, 0.24, 300.0);

    for (int k = 0; k < markets; ++k) {
        const std::string tag = std::to_string(k);
        add_node(net, "on" + tag, NodeKind::road_junction);
        add_link(net, "ramp_" + tag, "on" + tag, "c0", LinkKind::road, 1.0, 0.02, 1200.0);
        add_link(net, "bypass_" + tag, "on" + tag, "c3", LinkKind::road, 50.0 * rung[k],
                 rung[k], 900.0);
        add_node(net, "zT" + tag, NodeKind::centroid);
        add_node(net, "wT" + tag, NodeKind::centroid);
        add_link(net, "con_zT" + tag, "zT" + tag, "on" + tag, LinkKind::road_connector, 0.0,
                 0.01, 0.0);
        add_link(net, "con_wT" + tag, "c3", "wT" + tag, LinkKind::road_connector, 0.0, 0.01,
                 0.0);
    }

    // Rail mainline and hub zones: two 40-mile segments driven past capacity
    // by train demand and shared with the intermodal movements below.
    for (int j = 0; j < 3; ++j)
        add_node(net, "r" + std::to_string(j), NodeKind::rail_junction);
    add_rail_pair(net, "rail_0", "r0", "r1", 40.0, 40.0 / 60.0, 40.0);
    add_rail_pair(net, "rail_1", "r1", "r2", 40.0, 40.0 / 60.0, 40.0);
    add_node(net, "zR0", NodeKind::centroid);
    add_node(net, "zR1", NodeKind::centroid);
    add_link(net, "rcon_zR0_out", "zR0", "r0", LinkKind::rail_connector, 0.0, 0.02, 0.0);
    add_link(net, "rcon_zR0_in", "r0", "zR0", LinkKind::rail_connector, 0.0, 0.02, 0.0);
    add_link(net, "rcon_zR1_out", "zR1", "r2", LinkKind::rail_connector, 0.0, 0.02, 0.0);
    add_link(net, "rcon_zR1_in", "r2", "zR1", LinkKind::rail_connector, 0.0, 0.02, 0.0);

    // Intermodal hub pair: drayage stubs and terminal dwells on each end of
    // the rail mainline. The stubs touch nothing else, so every container
    // movement has exactly one feasible routing.
    add_node(net, "d0", NodeKind::road_junction);
    add_node(net, "g0", NodeKind::road_junction);
    add_node(net, "d1", NodeKind::road_junction);
    add_node(net, "g1", NodeKind::road_junction);
    add_link(net, "dray_w_out", "d0", "g0", LinkKind::road, 6.0, 0.12, 400.0);
    add_link(net, "dray_w_in", "g0", "d0", LinkKind::road, 6.0, 0.12, 400.0);
    add_link(net, "dray_e_out", "d1", "g1", LinkKind::road, 6.0, 0.12, 400.0);
    add_link(net, "dray_e_in", "g1", "d1", LinkKind::road, 6.0, 0.12, 400.0);
    add_link(net, "term_w_load", "g0", "r0", LinkKind::terminal, 0.0, 0.3, 0.0);
    add_link(net, "term_w_drop", "r0", "g0", LinkKind::terminal, 0.0, 0.3, 0.0);
    add_link(net, "term_e_load", "g1", "r2", LinkKind::terminal, 0.0, 0.3, 0.0);
    add_link(net, "term_e_drop", "r2", "g1", LinkKind::terminal, 0.0, 0.3, 0.0);
    add_node(net, "zI0", NodeKind::centroid);
    add_node(net, "zI1", NodeKind::centroid);
    add_link(net, "con_zI0_out", "zI0", "d0", LinkKind::road_connector, 0.0, 0.01, 0.0);
    add_link(net, "con_zI0_in", "d0", "zI0", LinkKind::road_connector, 0.0, 0.01, 0.0);
    add_link(net, "con_zI1_out", "zI1", "d1", LinkKind::road_connector, 0.0, 0.01, 0.0);
    add_link(net, "con_zI1_in", "d1", "zI1", LinkKind::road_connector, 0.0, 0.01, 0.0);
    net.build_index();

    for (int k = 0; k < markets; ++k) {
        const std::string tag = std::to_string(k);
        fx.demand.cell("zT" + tag, "wT" + tag).truck = q_truck;
    }
    fx.demand.cell("zR0", "zR1").rail = 46.0;
    fx.demand.cell("zR1", "zR0").rail = 12.0;
    fx.demand.cell("zI0", "zI1").intermodal = 0.8;
    fx.demand.cell("zI1", "zI0").intermodal = 0.6;
    return fx;
}

// ---------------------------------------------------------------------------
// Two centroids joined by a single road of chosen length, with coordinates.
// Used for distance-dependent demand conversion and geo output.
// ---------------------------------------------------------------------------
inline Fixture distance_pair(double road_miles, double lon_a = -95.0, double lon_b = -87.0) {
    Fixture fx;
    Network& net = fx.net;
    add_node(net, "A", NodeKind::centroid, freight::LonLat{lon_a, 40.0});
    add_node(net, "B", NodeKind::centroid, freight::LonLat{lon_b, 40.0});
    add_node(net, "r1", NodeKind::road_junction, freight::LonLat{lon_a + 0.1, 40.0});
    add_node(net, "r2", NodeKind::road_junction, freight::LonLat{lon_b - 0.1, 40.0});
    add_link(net, "cA", "A", "r1", LinkKind::road_connector, 0.0, 0.01, 0.0);
    add_link(net, "cB", "r2", "B", LinkKind::road_connector, 0.0, 0.01, 0.0);
    add_link(net, "hwy", "r1", "r2", LinkKind::road, road_miles, road_miles / 55.0, 4000.0);
    net.build_index();
    return fx;
}

}  // namespace fixtures
