#include "freight/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace freight {

double PathSet::flow_sum() const {
    double s = 0;
    for (const PathFlow& p : paths) s += p.flow;
    return s;
}

namespace {

std::string unreachable_message(const std::vector<UnreachableDemand::Entry>& entries) {
    std::ostringstream os;
    os << entries.size() << " demand entr" << (entries.size() == 1 ? "y has" : "ies have")
       << " no usable path";
    if (!entries.empty()) {
        os << " (first: " << entries.front().origin << " -> " << entries.front().destination
           << ", " << to_string(entries.front().mode) << ")";
    }
    return os.str();
}

}  // namespace

UnreachableDemand::UnreachableDemand(std::vector<Entry> entries)
    : std::runtime_error(unreachable_message(entries)), entries_(std::move(entries)) {}

double class_weight(Mode mode, LinkKind kind, const SolverConfig& config) {
    if (mode != Mode::intermodal) return 1.0;
    switch (kind) {
        case LinkKind::road: return config.intermodal_road_factor;
        case LinkKind::rail: return config.intermodal_rail_factor;
        default: return 1.0;
    }
}

std::vector<double> accumulate_link_flows(const Network& net, std::span<const PathSet> sets,
                                          const SolverConfig& config) {
    std::vector<double> flows(net.link_count(), 0.0);
    for (const PathSet& set : sets)
        for (const PathFlow& pf : set.paths)
            for (int32_t a : pf.links)
                flows[static_cast<std::size_t>(a)] +=
                    pf.flow * class_weight(set.mode, net.link(a).kind, config);
    return flows;
}

Objective objective(const Network& net, const LpfTable& lpfs, std::span<const double> link_flows,
                    const DemandTable& demand, const SolverConfig& config) {
    if (link_flows.size() != net.link_count())
        throw std::invalid_argument("objective: flow vector size mismatch");

    double road_term = 0.0;
    double rail_term = 0.0;
    for (std::size_t i = 0; i < net.link_count(); ++i) {
        const int32_t a = static_cast<int32_t>(i);
        switch (lpfs.kind(a)) {
            case LinkKind::road:
                road_term += road_time_integral(RoadLpf{lpfs.t0(a), lpfs.capacity(a)},
                                                link_flows[i]);
                break;
            case LinkKind::rail: {
                // One shared-track integral per unordered twin pair.
                const int32_t w = net.twin(a);
                if (w >= 0 && w < a) break;
                const double opp = w >= 0 ? link_flows[static_cast<std::size_t>(w)] : 0.0;
                rail_term += rail_time_integral(RailLpf{lpfs.t0(a), lpfs.capacity(a), lpfs.beta(a)},
                                                link_flows[i] + opp);
                break;
            }
            default:
                break;
        }
    }

    Objective z;
    z.raw = road_term + rail_term;
    const double road_demand =
        demand.total_truck() + config.intermodal_road_factor * demand.total_intermodal();
    const double rail_demand =
        demand.total_rail() + config.intermodal_rail_factor * demand.total_intermodal();
    if (road_term > 0 && !(road_demand > 0))
        throw std::invalid_argument("objective: road flow present but road demand is zero");
    if (rail_term > 0 && !(rail_demand > 0))
        throw std::invalid_argument("objective: rail flow present but rail demand is zero");
    z.normalized = (road_demand > 0 ? road_term / road_demand : 0.0) +
                   (rail_demand > 0 ? rail_term / rail_demand : 0.0);
    return z;
}

double relative_gap(double z_prev, double z_curr) {
    if (!(z_prev > 0)) throw std::invalid_argument("relative_gap: previous objective must be > 0");
    return std::abs(z_prev - z_curr) / z_prev;
}

namespace {

/// Search-tree cache for one snapshot of link times. Shared trees are keyed
/// by (origin, mode); intermodal pairs with a terminal whitelist get their
/// own entry keyed by (origin, destination).
class TreeCache {
public:
    TreeCache(const Network& net, const LinkTimeView& view) : net_(net), view_(view) {}

    const SpTree& tree_for(int32_t origin, int32_t destination, Mode mode) {
        const bool pair_specific =
            mode == Mode::intermodal && net_.whitelist_for(origin, destination) != nullptr;
        const Key key{origin, pair_specific ? destination : -1, mode};
        auto it = trees_.find(key);
        if (it == trees_.end()) {
            const std::vector<char> mask = od_mode_mask(net_, mode, origin, destination);
            it = trees_.emplace(key, build_sp_tree(net_, view_, mask, origin)).first;
        }
        return it->second;
    }

private:
    using Key = std::tuple<int32_t, int32_t, Mode>;
    const Network& net_;
    const LinkTimeView& view_;
    std::map<Key, SpTree> trees_;
};

double path_cost(const Network& net, const LpfTable& lpfs, std::span<const double> flows,
                 const std::vector<int32_t>& links) {
    double cost = 0.0;
    for (int32_t a : links) {
        const int32_t w = net.twin(a);
        const double opp = w >= 0 ? flows[static_cast<std::size_t>(w)] : 0.0;
        cost += lpfs.time(a, flows[static_cast<std::size_t>(a)], opp);
    }
    return cost;
}

struct ClassDemand {
    std::size_t cell = 0;
    Mode mode = Mode::truck;
    double demand = 0;
};

/// Demand classes in sweep order: cells are already sorted by (origin,
/// destination); modes ascend truck < rail < intermodal.
std::vector<ClassDemand> class_demands(const DemandTable& demand) {
    std::vector<ClassDemand> out;
    for (std::size_t i = 0; i < demand.cells.size(); ++i) {
        const DemandCell& c = demand.cells[i];
        if (c.truck > 0) out.push_back({i, Mode::truck, c.truck});
        if (c.rail > 0) out.push_back({i, Mode::rail, c.rail});
        if (c.intermodal > 0) out.push_back({i, Mode::intermodal, c.intermodal});
    }
    return out;
}

}  // namespace

std::vector<PathSet> initialize(const Network& net, const LpfTable& lpfs,
                                const DemandTable& demand, const SolverConfig&) {
    const LinkTimeView view = free_flow_times(net, lpfs);
    TreeCache cache(net, view);

    std::vector<PathSet> sets;
    std::vector<UnreachableDemand::Entry> unreachable;
    for (const ClassDemand& cd : class_demands(demand)) {
        const DemandCell& cell = demand.cells[cd.cell];
        const int32_t o = net.node_idx(cell.origin);
        const int32_t d = net.node_idx(cell.destination);
        if (o < 0 || d < 0 || net.node(o).kind != NodeKind::centroid ||
            net.node(d).kind != NodeKind::centroid) {
            unreachable.push_back({cell.origin, cell.destination, cd.mode});
            continue;
        }
        const SpTree& tree = cache.tree_for(o, d, cd.mode);
        std::optional<Path> p = tree_path(net, tree, d, cd.mode);
        if (!p) {
            unreachable.push_back({cell.origin, cell.destination, cd.mode});
            continue;
        }
        PathSet set;
        set.origin = o;
        set.destination = d;
        set.mode = cd.mode;
        set.demand = cd.demand;
        set.paths.push_back({std::move(p->links), cd.demand});
        sets.push_back(std::move(set));
    }
    if (!unreachable.empty()) throw UnreachableDemand(std::move(unreachable));
    return sets;
}

GpUpdateStats gp_inner_update(const Network& net, const LpfTable& lpfs, PathSet& set,
                              const Path& candidate, std::vector<double>& link_flows,
                              const SolverConfig& config) {
    GpUpdateStats stats;

    std::size_t cand_idx = set.paths.size();
    for (std::size_t k = 0; k < set.paths.size(); ++k) {
        if (set.paths[k].links == candidate.links) {
            cand_idx = k;
            break;
        }
    }
    const bool appended = cand_idx == set.paths.size();
    if (appended) set.paths.push_back({candidate.links, 0.0});

    // Costs for every stored path at the flows as they stand right now.
    std::vector<double> cost(set.paths.size());
    for (std::size_t k = 0; k < set.paths.size(); ++k)
        cost[k] = path_cost(net, lpfs, link_flows, set.paths[k].links);

    std::size_t best = 0;
    for (std::size_t k = 1; k < set.paths.size(); ++k)
        if (cost[k] < cost[best]) best = k;

    std::vector<int32_t> best_sorted = set.paths[best].links;
    std::sort(best_sorted.begin(), best_sorted.end());

    double moved_total = 0.0;
    for (std::size_t k = 0; k < set.paths.size(); ++k) {
        if (k == best) continue;
        PathFlow& pf = set.paths[k];
        const double diff = cost[k] - cost[best];
        if (!(diff > 0)) continue;

        // Second-derivative scale: sum of own-flow time slopes over the links
        // the two paths do not share, weighted by what one unit of this class
        // adds to each link's flow.
        std::vector<int32_t> k_sorted = pf.links;
        std::sort(k_sorted.begin(), k_sorted.end());
        std::vector<int32_t> symdiff;
        std::set_symmetric_difference(k_sorted.begin(), k_sorted.end(), best_sorted.begin(),
                                      best_sorted.end(), std::back_inserter(symdiff));
        double s = 0.0;
        for (int32_t a : symdiff) {
            const int32_t w = net.twin(a);
            const double opp = w >= 0 ? link_flows[static_cast<std::size_t>(w)] : 0.0;
            const double slope = lpfs.deriv(a, link_flows[static_cast<std::size_t>(a)], opp);
            s += slope * class_weight(set.mode, net.link(a).kind, config);
        }

        // Newton-style projected shift; a flat cost difference (s == 0) moves
        // everything in one step.
        double delta = s > 0 ? config.step_size * diff / s : pf.flow;
        delta = std::min(delta, pf.flow);
        if (!(delta > 0)) continue;

        // Apply on the symmetric difference so shared links keep their flow
        // bits untouched.
        std::vector<int32_t> only_k;
        std::set_difference(k_sorted.begin(), k_sorted.end(), best_sorted.begin(),
                            best_sorted.end(), std::back_inserter(only_k));
        std::vector<int32_t> only_best;
        std::set_difference(best_sorted.begin(), best_sorted.end(), k_sorted.begin(),
                            k_sorted.end(), std::back_inserter(only_best));
        for (int32_t a : only_k) {
            double& lf = link_flows[static_cast<std::size_t>(a)];
            lf -= delta * class_weight(set.mode, net.link(a).kind, config);
            // Draining a path can leave the accumulated link flow a few ulps
            // below zero; the periodic consistency check bounds real drift.
            if (lf < 0) lf = 0;
        }
        for (int32_t a : only_best)
            link_flows[static_cast<std::size_t>(a)] +=
                delta * class_weight(set.mode, net.link(a).kind, config);

        pf.flow -= delta;
        if (pf.flow < 0) pf.flow = 0;  // exact-arithmetic floor, defensive only
        moved_total += delta;
    }
    set.paths[best].flow += moved_total;
    stats.shifted = moved_total;

    bool cand_survives = false;
    std::vector<PathFlow> kept;
    kept.reserve(set.paths.size());
    for (std::size_t k = 0; k < set.paths.size(); ++k) {
        if (set.paths[k].flow > 0) {
            if (appended && k == cand_idx) cand_survives = true;
            kept.push_back(std::move(set.paths[k]));
        } else if (!(appended && k == cand_idx)) {
            ++stats.dropped;  // a real path drained dry; a no-flow candidate was only provisional
        }
    }
    set.paths = std::move(kept);
    stats.added_candidate = appended && cand_survives;
    return stats;
}

namespace {

struct InvariantTracker {
    double max_conservation = 0;
    double min_flow = 0;
    double max_consistency = 0;

    void after_sweep(const Network& net, const std::vector<PathSet>& sets,
                     const std::vector<double>& link_flows, const SolverConfig& config,
                     bool check_consistency) {
        for (const PathSet& set : sets) {
            const double err =
                std::abs(set.flow_sum() - set.demand) / std::max(set.demand, 1.0);
            max_conservation = std::max(max_conservation, err);
            for (const PathFlow& pf : set.paths) min_flow = std::min(min_flow, pf.flow);
        }
        if (check_consistency) {
            const std::vector<double> recomputed = accumulate_link_flows(net, sets, config);
            for (std::size_t i = 0; i < link_flows.size(); ++i) {
                const double err = std::abs(recomputed[i] - link_flows[i]) /
                                   std::max(std::abs(recomputed[i]), 1.0);
                max_consistency = std::max(max_consistency, err);
            }
        }
    }

    void store(AssignmentResult& result) const {
        result.max_conservation_error = max_conservation;
        result.min_path_flow = min_flow;
        result.max_consistency_error = max_consistency;
    }
};

double reporting_objective(const Objective& z, const SolverConfig& config) {
    return config.normalize ? z.normalized : z.raw;
}

void push_objective(AssignmentResult& result, const Objective& z, const SolverConfig& config) {
    result.objective_trace.push_back(reporting_objective(z, config));
    result.raw_objective_trace.push_back(z.raw);
}

void check_config(const SolverConfig& config, const char* fn) {
    if (!(config.step_size > 0))
        throw std::invalid_argument(std::string(fn) + ": step_size must be > 0");
    if (!(config.rel_gap_tol >= 0))
        throw std::invalid_argument(std::string(fn) + ": rel_gap_tol must be >= 0");
    if (config.max_iterations < 0)
        throw std::invalid_argument(std::string(fn) + ": max_iterations must be >= 0");
    if (!(config.intermodal_road_factor >= 0) || !(config.intermodal_rail_factor >= 0))
        throw std::invalid_argument(std::string(fn) + ": intermodal factors must be >= 0");
}

}  // namespace

AssignmentResult solve_gp(const Network& net, const DemandTable& demand,
                          const SolverConfig& config) {
    if (!net.indexed()) throw std::logic_error("solve_gp: network not indexed");
    check_config(config, "solve_gp");
    const LpfTable lpfs(net, config.beta);
    const bool parallel = config.threads > 1;

    AssignmentResult result;
    result.algorithm = "gp";
    result.deterministic = !parallel;
    result.path_sets = initialize(net, lpfs, demand, config);
    result.link_flows = accumulate_link_flows(net, result.path_sets, config);

    Objective z = objective(net, lpfs, result.link_flows, demand, config);
    push_objective(result, z, config);
    double z_prev = reporting_objective(z, config);

    if (!(z_prev > 0)) {  // nothing movable; an all-zero problem is already settled
        result.converged = true;
        return result;
    }

    InvariantTracker tracker;

    for (int n = 1; n <= config.max_iterations; ++n) {
        if (parallel) {
            // Snapshot schedule: all direction trees come from the flows as
            // they stood when the sweep began, so tree builds parallelize.
            const LinkTimeView view =
                times_from_flows(net, lpfs, result.link_flows, config.threads);
            std::vector<std::optional<Path>> candidates(result.path_sets.size());
            struct Job {
                int32_t origin;
                int32_t destination;
                Mode mode;
                std::vector<std::size_t> set_indices;
            };
            std::map<std::tuple<int32_t, int32_t, Mode>, std::size_t> job_index;
            std::vector<Job> jobs;
            for (std::size_t i = 0; i < result.path_sets.size(); ++i) {
                const PathSet& set = result.path_sets[i];
                const bool pair_specific =
                    set.mode == Mode::intermodal &&
                    net.whitelist_for(set.origin, set.destination) != nullptr;
                const auto key = std::make_tuple(set.origin,
                                                 pair_specific ? set.destination : -1, set.mode);
                auto it = job_index.find(key);
                if (it == job_index.end()) {
                    it = job_index.emplace(key, jobs.size()).first;
                    jobs.push_back({set.origin, pair_specific ? set.destination : -1, set.mode, {}});
                }
                jobs[it->second].set_indices.push_back(i);
            }
            const int64_t job_count = static_cast<int64_t>(jobs.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(std::max(config.threads, 1))
#endif
            for (int64_t j = 0; j < job_count; ++j) {
                const Job& job = jobs[static_cast<std::size_t>(j)];
                const int32_t mask_dest = job.destination >= 0 ? job.destination : job.origin;
                const std::vector<char> mask = od_mode_mask(net, job.mode, job.origin, mask_dest);
                const SpTree tree = build_sp_tree(net, view, mask, job.origin);
                for (std::size_t i : job.set_indices) {
                    const PathSet& set = result.path_sets[i];
                    candidates[i] = tree_path(net, tree, set.destination, set.mode);
                }
            }
            for (std::size_t i = 0; i < result.path_sets.size(); ++i) {
                PathSet& set = result.path_sets[i];
                Path candidate;
                candidate.origin = set.origin;
                candidate.destination = set.destination;
                candidate.mode = set.mode;
                candidate.links = candidates[i] ? candidates[i]->links : set.paths.front().links;
                gp_inner_update(net, lpfs, set, candidate, result.link_flows, config);
            }
        } else {
            // Serial reference: Gauss-Seidel over path sets in sweep order,
            // rebuilding the time snapshot whenever the origin changes.
            std::size_t i = 0;
            while (i < result.path_sets.size()) {
                const int32_t block_origin = result.path_sets[i].origin;
                const LinkTimeView view = times_from_flows(net, lpfs, result.link_flows, 1);
                TreeCache cache(net, view);
                for (; i < result.path_sets.size() &&
                       result.path_sets[i].origin == block_origin;
                     ++i) {
                    PathSet& set = result.path_sets[i];
                    const SpTree& tree = cache.tree_for(set.origin, set.destination, set.mode);
                    std::optional<Path> p = tree_path(net, tree, set.destination, set.mode);
                    Path candidate;
                    candidate.origin = set.origin;
                    candidate.destination = set.destination;
                    candidate.mode = set.mode;
                    candidate.links = p ? std::move(p->links) : set.paths.front().links;
                    gp_inner_update(net, lpfs, set, candidate, result.link_flows, config);
                }
            }
        }

        result.iterations = n;
        const bool check_consistency = n % 10 == 0 || n == config.max_iterations;
        tracker.after_sweep(net, result.path_sets, result.link_flows, config, check_consistency);

        z = objective(net, lpfs, result.link_flows, demand, config);
        push_objective(result, z, config);
        const double z_curr = reporting_objective(z, config);
        const double gap = relative_gap(z_prev, z_curr);
        result.gap_trace.push_back(gap);
        z_prev = z_curr;
        if (gap <= config.rel_gap_tol) {
            result.converged = true;
            break;
        }
    }

    tracker.after_sweep(net, result.path_sets, result.link_flows, config, true);
    tracker.store(result);
    return result;
}

namespace {

/// Directional derivative of the assignment objective along (y - x) at
/// x + theta (y - x); fixed-delay links never enter the objective.
double objective_slope(const Network& net, const LpfTable& lpfs, std::span<const double> x,
                       std::span<const double> y, double theta) {
    double slope = 0.0;
    for (std::size_t i = 0; i < net.link_count(); ++i) {
        const int32_t a = static_cast<int32_t>(i);
        if (!lpfs.flow_dependent(a)) continue;
        const double d = y[i] - x[i];
        const double xa = x[i] + theta * d;
        double opp = 0.0;
        const int32_t w = net.twin(a);
        if (w >= 0) {
            const std::size_t wi = static_cast<std::size_t>(w);
            opp = x[wi] + theta * (y[wi] - x[wi]);
        }
        slope += lpfs.time(a, xa, opp) * d;
    }
    return slope;
}

double bisect_step(const Network& net, const LpfTable& lpfs, std::span<const double> x,
                   std::span<const double> y) {
    const double g0 = objective_slope(net, lpfs, x, y, 0.0);
    if (g0 >= 0) return 0.0;
    const double g1 = objective_slope(net, lpfs, x, y, 1.0);
    if (g1 <= 0) return 1.0;
    double lo = 0.0;
    double hi = 1.0;
    for (int it = 0; it < 64 && hi - lo > 1e-8; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (objective_slope(net, lpfs, x, y, mid) > 0)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

AssignmentResult solve_fw(const Network& net, const DemandTable& demand,
                          const SolverConfig& config) {
    if (!net.indexed()) throw std::logic_error("solve_fw: network not indexed");
    check_config(config, "solve_fw");
    const LpfTable lpfs(net, config.beta);

    AssignmentResult result;
    result.algorithm = "fw";
    result.deterministic = true;
    result.path_sets = initialize(net, lpfs, demand, config);
    result.link_flows = accumulate_link_flows(net, result.path_sets, config);

    Objective z = objective(net, lpfs, result.link_flows, demand, config);
    push_objective(result, z, config);
    double z_prev = reporting_objective(z, config);

    if (!(z_prev > 0)) {
        result.converged = true;
        return result;
    }

    InvariantTracker tracker;

    for (int n = 1; n <= config.max_iterations; ++n) {
        // All-or-nothing target at current times. Tree builds can run in
        // parallel; flows are always accumulated serially in sweep order, so
        // the result is bit-identical for any thread count.
        const LinkTimeView view = times_from_flows(net, lpfs, result.link_flows, config.threads);
        std::vector<std::optional<Path>> aon_paths(result.path_sets.size());
        {
            struct Job {
                int32_t origin;
                int32_t destination;  // -1 for a shared tree
                Mode mode;
                std::vector<std::size_t> set_indices;
            };
            std::map<std::tuple<int32_t, int32_t, Mode>, std::size_t> job_index;
            std::vector<Job> jobs;
            for (std::size_t i = 0; i < result.path_sets.size(); ++i) {
                const PathSet& set = result.path_sets[i];
                const bool pair_specific =
                    set.mode == Mode::intermodal &&
                    net.whitelist_for(set.origin, set.destination) != nullptr;
                const auto key = std::make_tuple(set.origin,
                                                 pair_specific ? set.destination : -1, set.mode);
                auto it = job_index.find(key);
                if (it == job_index.end()) {
                    it = job_index.emplace(key, jobs.size()).first;
                    jobs.push_back({set.origin, pair_specific ? set.destination : -1, set.mode, {}});
                }
                jobs[it->second].set_indices.push_back(i);
            }
            const int64_t job_count = static_cast<int64_t>(jobs.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(std::max(config.threads, 1)) \
    if (config.threads > 1)
#endif
            for (int64_t j = 0; j < job_count; ++j) {
                const Job& job = jobs[static_cast<std::size_t>(j)];
                const int32_t mask_dest = job.destination >= 0 ? job.destination : job.origin;
                const std::vector<char> mask = od_mode_mask(net, job.mode, job.origin, mask_dest);
                const SpTree tree = build_sp_tree(net, view, mask, job.origin);
                for (std::size_t i : job.set_indices)
                    aon_paths[i] =
                        tree_path(net, tree, result.path_sets[i].destination,
                                  result.path_sets[i].mode);
            }
        }

        std::vector<double> y(net.link_count(), 0.0);
        for (std::size_t i = 0; i < result.path_sets.size(); ++i) {
            const PathSet& set = result.path_sets[i];
            const std::vector<int32_t>& links =
                aon_paths[i] ? aon_paths[i]->links : set.paths.front().links;
            for (int32_t a : links)
                y[static_cast<std::size_t>(a)] +=
                    set.demand * class_weight(set.mode, net.link(a).kind, config);
        }

        const double theta = bisect_step(net, lpfs, result.link_flows, y);

        for (std::size_t i = 0; i < net.link_count(); ++i)
            result.link_flows[i] = (1.0 - theta) * result.link_flows[i] + theta * y[i];

        // Convex-combination path bookkeeping keeps the path sets summing to
        // exactly the link flows the iteration produced.
        for (std::size_t i = 0; i < result.path_sets.size(); ++i) {
            PathSet& set = result.path_sets[i];
            for (PathFlow& pf : set.paths) pf.flow *= 1.0 - theta;
            const std::vector<int32_t>& links =
                aon_paths[i] ? aon_paths[i]->links : set.paths.front().links;
            bool merged = false;
            for (PathFlow& pf : set.paths) {
                if (pf.links == links) {
                    pf.flow += theta * set.demand;
                    merged = true;
                    break;
                }
            }
            if (!merged) set.paths.push_back({links, theta * set.demand});
            for (std::size_t k = set.paths.size(); k-- > 0;)
                if (set.paths[k].flow <= 0.0)
                    set.paths.erase(set.paths.begin() + static_cast<std::ptrdiff_t>(k));
        }

        result.iterations = n;
        const bool check_consistency = n % 10 == 0 || n == config.max_iterations;
        tracker.after_sweep(net, result.path_sets, result.link_flows, config, check_consistency);

        z = objective(net, lpfs, result.link_flows, demand, config);
        push_objective(result, z, config);
        const double z_curr = reporting_objective(z, config);
        const double gap = relative_gap(z_prev, z_curr);
        result.gap_trace.push_back(gap);
        z_prev = z_curr;
        if (gap <= config.rel_gap_tol) {
            result.converged = true;
            break;
        }
    }

    tracker.after_sweep(net, result.path_sets, result.link_flows, config, true);
    tracker.store(result);
    return result;
}

CostSpread ue_cost_spread(const Network& net, const AssignmentResult& result,
                          const LinkTimeView& times) {
    CostSpread spread;
    for (const PathSet& set : result.path_sets) {
        if (set.paths.empty()) continue;
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        for (const PathFlow& pf : set.paths) {
            double t = 0.0;
            for (int32_t a : pf.links) t += times.at(a);
            lo = std::min(lo, t);
            hi = std::max(hi, t);
        }
        CostSpreadRow row;
        row.origin = net.node(set.origin).id;
        row.destination = net.node(set.destination).id;
        row.mode = set.mode;
        row.spread = hi - lo;
        spread.overall = std::max(spread.overall, row.spread);
        spread.rows.push_back(std::move(row));
    }
    return spread;
}

TonMiles ton_miles(const AssignmentResult& result, const Network& net,
                   const PayloadFactors& payloads) {
    if (!(payloads.tons_per_truck > 0) || !(payloads.tons_per_train > 0))
        throw std::invalid_argument("ton_miles: payload factors must be positive");
    TonMiles tm;
    for (std::size_t i = 0; i < net.link_count(); ++i) {
        const Link& l = net.links[i];
        if (l.kind == LinkKind::road)
            tm.road += result.link_flows[i] * l.length * payloads.tons_per_truck;
        else if (l.kind == LinkKind::rail)
            tm.rail += result.link_flows[i] * l.length * payloads.tons_per_train;
    }
    return tm;
}

std::vector<BetaSweepRow> beta_sweep(const Network& net, const DemandTable& demand,
                                     const SolverConfig& config, std::span<const double> betas,
                                     std::span<const std::string> tracked_links) {
    std::vector<int32_t> tracked;
    for (const std::string& id : tracked_links) {
        const int32_t a = net.link_idx(id);
        if (a < 0) throw std::invalid_argument("beta_sweep: unknown tracked link " + id);
        tracked.push_back(a);
    }

    struct Solved {
        double beta;
        LpfTable lpfs;
        std::vector<double> flows;
    };
    std::vector<Solved> solved;
    solved.reserve(betas.size());
    for (double beta : betas) {
        SolverConfig cfg = config;
        cfg.beta = beta;
        AssignmentResult r = solve_gp(net, demand, cfg);
        solved.push_back({beta, LpfTable(net, beta), std::move(r.link_flows)});
    }

    if (tracked.empty()) {
        // Track every rail link that ends up over capacity under any beta.
        std::set<int32_t> over;
        for (const Solved& s : solved) {
            for (std::size_t i = 0; i < net.link_count(); ++i) {
                const int32_t a = static_cast<int32_t>(i);
                if (net.links[i].kind != LinkKind::rail) continue;
                const int32_t w = net.twin(a);
                const double opp = w >= 0 ? s.flows[static_cast<std::size_t>(w)] : 0.0;
                if (s.flows[i] + opp > net.links[i].capacity) over.insert(a);
            }
        }
        tracked.assign(over.begin(), over.end());
        std::sort(tracked.begin(), tracked.end(), [&net](int32_t a, int32_t b) {
            return net.link(a).id < net.link(b).id;
        });
    }

    std::vector<BetaSweepRow> rows;
    for (const Solved& s : solved) {
        for (int32_t a : tracked) {
            const Link& l = net.link(a);
            const int32_t w = net.twin(a);
            const double opp = w >= 0 ? s.flows[static_cast<std::size_t>(w)] : 0.0;
            const double combined =
                l.kind == LinkKind::rail ? s.flows[static_cast<std::size_t>(a)] + opp
                                         : s.flows[static_cast<std::size_t>(a)];
            BetaSweepRow row;
            row.beta = s.beta;
            row.link_id = l.id;
            row.pct_over_capacity =
                l.capacity > 0 ? std::max(0.0, 100.0 * (combined - l.capacity) / l.capacity) : 0.0;
            row.travel_time = s.lpfs.time(a, s.flows[static_cast<std::size_t>(a)], opp);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

}  // namespace freight
