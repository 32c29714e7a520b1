#pragma once

#include <span>
#include <string>
#include <vector>

#include "freight/demand.hpp"
#include "freight/link_performance.hpp"
#include "freight/network.hpp"
#include "freight/shortest_path.hpp"

namespace freight {

struct SolverConfig {
    double step_size = 1.0;    // alpha in the projection move
    double rel_gap_tol = 1e-4;
    int max_iterations = 100;
    double beta = 4.0;         // rail penalty rate (per-link overrides win)
    double intermodal_road_factor = 1.0;  // trucks per intermodal unit on road links
    double intermodal_rail_factor = 1.0;  // trains per intermodal unit on rail links
    bool normalize = true;     // report and stop on the demand-normalized objective
    int threads = 1;           // >1 enables the OpenMP kernels
};

/// One stored path and its flow (class units: trucks, trains, or intermodal
/// units per day).
struct PathFlow {
    std::vector<int32_t> links;
    double flow = 0;
};

/// The solver's primary state for one (origin, destination, class): every
/// used path with positive flow. Flows sum to the class demand.
struct PathSet {
    int32_t origin = -1;
    int32_t destination = -1;
    Mode mode = Mode::truck;
    double demand = 0;
    std::vector<PathFlow> paths;

    double flow_sum() const;
};

struct AssignmentResult {
    std::string algorithm;  // "gp" or "fw"
    std::vector<double> link_flows;  // class-weighted, by link index
    std::vector<PathSet> path_sets;
    std::vector<double> objective_trace;  // reporting objective per outer iteration (index 0 = after initialization)
    std::vector<double> raw_objective_trace;
    std::vector<double> gap_trace;        // relative objective change per iteration
    int iterations = 0;
    bool converged = false;
    /// False for the snapshot-parallel gradient-projection schedule, whose
    /// results may differ from the serial reference sweep.
    bool deterministic = true;

    // Invariants tracked while solving (see the conservation test suite).
    double max_conservation_error = 0;  // max |sum(flows) - demand| / max(demand, 1)
    double min_path_flow = 0;           // most negative path flow ever stored
    double max_consistency_error = 0;   // incremental vs recomputed link flows
};

/// Initialization failure: some demand entry has no usable path for its class.
class UnreachableDemand : public std::runtime_error {
public:
    struct Entry {
        std::string origin;
        std::string destination;
        Mode mode;
    };
    explicit UnreachableDemand(std::vector<Entry> entries);
    const std::vector<Entry>& entries() const { return entries_; }

private:
    std::vector<Entry> entries_;
};

/// Class weight a path flow carries on a given link kind: trucks and trains
/// count as themselves; intermodal units are converted by the configured
/// factors on road/rail links and pass through terminals at face value.
double class_weight(Mode mode, LinkKind kind, const SolverConfig& config);

/// Link flows accumulated from path flows (the definitional constraints).
/// Terminal and connector links accumulate flow for reporting only.
std::vector<double> accumulate_link_flows(const Network& net, std::span<const PathSet> sets,
                                          const SolverConfig& config);

struct Objective {
    double raw = 0;         // vehicle-hours/day + train-hours/day
    double normalized = 0;  // hours, per the demand normalization
};

/// The convex objective: BPR integrals over road links plus shared-track
/// integrals counted once per unordered rail twin pair. The normalized form
/// divides the road term by total truck-equivalent demand and the rail term
/// by total train-equivalent demand.
Objective objective(const Network& net, const LpfTable& lpfs, std::span<const double> link_flows,
                    const DemandTable& demand, const SolverConfig& config);

/// |z_prev - z_curr| / z_prev. Requires z_prev > 0.
double relative_gap(double z_prev, double z_curr);

/// All-or-nothing seeding at free-flow times: one shortest path per O-D pair
/// and class with positive demand. Throws UnreachableDemand listing every
/// entry whose class has no path.
std::vector<PathSet> initialize(const Network& net, const LpfTable& lpfs,
                                const DemandTable& demand, const SolverConfig& config);

struct GpUpdateStats {
    bool added_candidate = false;
    double shifted = 0;   // total flow moved onto the shortest path
    int dropped = 0;      // paths retired at zero flow
};

/// One gradient-projection move for a single path set: tag the cheapest path
/// at current flows, shift every other path toward it by the scaled cost
/// difference (projected at zero), give the remainder to the cheapest path,
/// and update link flows incrementally. `candidate` is the current shortest
/// path for the class (added to the set if new).
GpUpdateStats gp_inner_update(const Network& net, const LpfTable& lpfs, PathSet& set,
                              const Path& candidate, std::vector<double>& link_flows,
                              const SolverConfig& config);

/// Path-based gradient-projection user-equilibrium assignment over the three
/// demand classes. Serial schedule (threads <= 1): Gauss-Seidel sweep in
/// ascending (origin id, destination id, mode) order, one search tree per
/// (origin, mode) refreshed at each origin block. threads > 1 computes all
/// direction trees from a sweep-start snapshot in parallel; moves stay
/// serialized in the same order, and the result is flagged non-deterministic
/// relative to the serial reference.
AssignmentResult solve_gp(const Network& net, const DemandTable& demand,
                          const SolverConfig& config);

/// Link-based Frank-Wolfe baseline with exact bisection line search. Keeps a
/// convex-combination path decomposition so the result contract (path sets
/// consistent with link flows) matches solve_gp. Bit-identical for any thread
/// count.
AssignmentResult solve_fw(const Network& net, const DemandTable& demand,
                          const SolverConfig& config);

struct CostSpreadRow {
    std::string origin;
    std::string destination;
    Mode mode;
    double spread = 0;  // max - min used-path time, hours
};

struct CostSpread {
    double overall = 0;
    std::vector<CostSpreadRow> rows;
};

/// Used-path travel-time spread per O-D class at the given times (equal used
/// costs is the equilibrium condition).
CostSpread ue_cost_spread(const Network& net, const AssignmentResult& result,
                          const LinkTimeView& times);

struct PayloadFactors {
    double tons_per_truck = 0;
    double tons_per_train = 0;
};

struct TonMiles {
    double road = 0;  // ton-miles/day moved on road links
    double rail = 0;  // ton-miles/day moved on rail links
};

/// Flow * length * payload summed over road and rail links. Link flows
/// already combine the own-class and intermodal contributions.
TonMiles ton_miles(const AssignmentResult& result, const Network& net,
                   const PayloadFactors& payloads);

struct BetaSweepRow {
    double beta = 0;
    std::string link_id;
    double pct_over_capacity = 0;  // 100 * (x + x_twin - C) / C, clamped at 0
    double travel_time = 0;        // hours at converged flows
};

/// Re-solves per beta and tabulates over-capacity percentage and travel time
/// for the tracked rail links. With no explicit tracking list, tracks every
/// rail link that ends over capacity under any of the betas.
std::vector<BetaSweepRow> beta_sweep(const Network& net, const DemandTable& demand,
                                     const SolverConfig& config, std::span<const double> betas,
                                     std::span<const std::string> tracked_links = {});

}  // namespace freight
