// Benchmark: serial reference vs OpenMP kernels (time updates, tree builds
// inside FW/GP). FW must be bit-identical for any thread count; the parallel
// GP schedule is allowed to drift within convergence tolerance.

#include <chrono>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "freight/equilibrium.hpp"
#include "freight/network.hpp"

using namespace freight;

namespace {

std::string grid_node(int i, int j) { return "r" + std::to_string(i) + "_" + std::to_string(j); }

/// n x n road grid, a twinned rail mainline along the bottom edge with
/// terminals every other column, and centroids (road + rail connectors)
/// spread over the top row.
Network make_grid(int n, int centroids) {
    Network net;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            net.nodes.push_back({grid_node(i, j), NodeKind::road_junction, std::nullopt});
    for (int j = 0; j < n; ++j)
        net.nodes.push_back({"l" + std::to_string(j), NodeKind::rail_junction, std::nullopt});

    auto add_road = [&net](const std::string& a, const std::string& b) {
        const std::string id = "road_" + a + "_" + b;
        net.links.push_back({id, a, b, LinkKind::road, 10.0, 0.2, 1200.0, "", std::nullopt});
    };
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (j + 1 < n) {
                add_road(grid_node(i, j), grid_node(i, j + 1));
                add_road(grid_node(i, j + 1), grid_node(i, j));
            }
            if (i + 1 < n) {
                add_road(grid_node(i, j), grid_node(i + 1, j));
                add_road(grid_node(i + 1, j), grid_node(i, j));
            }
        }
    }

    for (int j = 0; j + 1 < n; ++j) {
        const std::string a = "l" + std::to_string(j);
        const std::string b = "l" + std::to_string(j + 1);
        const std::string fwd = "rail_" + a + "_" + b;
        const std::string rev = "rail_" + b + "_" + a;
        net.links.push_back({fwd, a, b, LinkKind::rail, 10.0, 10.0 / 60.0, 40.0, rev, std::nullopt});
        net.links.push_back({rev, b, a, LinkKind::rail, 10.0, 10.0 / 60.0, 40.0, fwd, std::nullopt});
    }
    for (int j = 0; j < n; j += 2) {
        const std::string road = grid_node(n - 1, j);
        const std::string rail = "l" + std::to_string(j);
        net.links.push_back({"term_" + std::to_string(j) + "_out", road, rail, LinkKind::terminal,
                             0.0, 0.05, 0.0, "", std::nullopt});
        net.links.push_back({"term_" + std::to_string(j) + "_in", rail, road, LinkKind::terminal,
                             0.0, 0.05, 0.0, "", std::nullopt});
    }

    for (int c = 0; c < centroids; ++c) {
        const std::string id = "z" + std::to_string(c);
        const std::string road = grid_node(0, (c * (n - 1)) / std::max(centroids - 1, 1));
        net.nodes.push_back({id, NodeKind::centroid, std::nullopt});
        net.links.push_back({"con_" + id + "_out", id, road, LinkKind::road_connector, 0.0, 0.01,
                             0.0, "", std::nullopt});
        net.links.push_back({"con_" + id + "_in", road, id, LinkKind::road_connector, 0.0, 0.01,
                             0.0, "", std::nullopt});
        const std::string rail = "l" + std::to_string((c * (n - 1)) / std::max(centroids - 1, 1));
        net.links.push_back({"rcon_" + id + "_out", id, rail, LinkKind::rail_connector, 0.0, 0.02,
                             0.0, "", std::nullopt});
        net.links.push_back({"rcon_" + id + "_in", rail, id, LinkKind::rail_connector, 0.0, 0.02,
                             0.0, "", std::nullopt});
    }
    net.build_index();
    return net;
}

DemandTable make_demand(int centroids, unsigned seed) {
    std::minstd_rand rng(seed);
    std::uniform_real_distribution<double> truck(50.0, 400.0);
    std::uniform_real_distribution<double> rail(1.0, 8.0);
    DemandTable table;
    for (int a = 0; a < centroids; ++a) {
        for (int b = 0; b < centroids; ++b) {
            if (a == b) continue;
            DemandCell& cell =
                table.cell("z" + std::to_string(a), "z" + std::to_string(b));
            cell.truck = truck(rng);
            if ((a + b) % 3 == 0) cell.rail = rail(rng);
            if ((a * 7 + b) % 5 == 0) cell.intermodal = 0.5;
        }
    }
    return table;
}

template <typename F>
double timed(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    int grid = 12;
    int centroids = 8;
    int iterations = 15;
    int threads =
#ifdef _OPENMP
        omp_get_max_threads();
#else
        1;
#endif
    CLI::App app{"serial vs parallel kernel benchmark"};
    app.add_option("--grid", grid, "road grid dimension");
    app.add_option("--centroids", centroids, "demand zones");
    app.add_option("--iterations", iterations, "fixed outer iterations per run");
    app.add_option("--threads", threads, "parallel thread count");
    CLI11_PARSE(app, argc, argv);

    const Network net = make_grid(grid, centroids);
    const DemandTable demand = make_demand(centroids, 99);
    std::cout << "network: " << net.node_count() << " nodes, " << net.link_count() << " links, "
              << demand.cells.size() << " demand cells\n";

    SolverConfig serial;
    serial.max_iterations = iterations;
    serial.rel_gap_tol = 0.0;  // run the full budget so both runs do equal work
    SolverConfig parallel = serial;
    parallel.threads = threads;

    AssignmentResult fw1, fwp, gp1, gpp;
    const double t_fw1 = timed([&] { fw1 = solve_fw(net, demand, serial); });
    const double t_fwp = timed([&] { fwp = solve_fw(net, demand, parallel); });
    const double t_gp1 = timed([&] { gp1 = solve_gp(net, demand, serial); });
    const double t_gpp = timed([&] { gpp = solve_gp(net, demand, parallel); });

    bool fw_identical = fw1.link_flows == fwp.link_flows;
    std::cout << "fw  serial " << t_fw1 << " s, " << threads << " threads " << t_fwp
              << " s, link flows " << (fw_identical ? "bit-identical" : "DIFFER (BUG)") << "\n";
    const double gp_rel =
        std::abs(gp1.objective_trace.back() - gpp.objective_trace.back()) /
        gp1.objective_trace.back();
    std::cout << "gp  serial " << t_gp1 << " s, " << threads << " threads " << t_gpp
              << " s, objective drift " << gp_rel << " (snapshot schedule)\n";

    const LpfTable lpfs(net, serial.beta);
    const int reps = 2000;
    std::vector<double> flows = fw1.link_flows;
    double sink = 0;
    const double t_k1 = timed([&] {
        for (int r = 0; r < reps; ++r) sink += times_from_flows(net, lpfs, flows, 1).time[0];
    });
    const double t_kp = timed([&] {
        for (int r = 0; r < reps; ++r)
            sink += times_from_flows(net, lpfs, flows, threads).time[0];
    });
    std::cout << "times_from_flows x" << reps << ": serial " << t_k1 << " s, " << threads
              << " threads " << t_kp << " s (checksum " << sink << ")\n";
    return fw_identical ? 0 : 1;
}
