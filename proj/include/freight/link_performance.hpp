#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "freight/network.hpp"

namespace freight {

/// Flow beyond this multiple of capacity is refused instead of risking a
/// non-finite power evaluation.
inline constexpr double kSaturationCap = 1e6;

class SaturationError : public std::domain_error {
public:
    explicit SaturationError(const std::string& what) : std::domain_error(what) {}
};

struct RoadLpf {
    double t0 = 0;        // free-flow hours
    double capacity = 0;  // vehicles/day
    static constexpr double coefficient = 0.15;
    static constexpr double exponent = 4.0;
};

struct RailLpf {
    double t0 = 0;        // free-flow hours
    double capacity = 0;  // trains/day
    double beta = 4.0;    // penalty rate, >= 1
};

struct FixedDelay {
    double t0 = 0;  // hours
};

namespace detail {
inline void check_flow(double x, const char* fn) {
    if (!(x >= 0)) throw std::invalid_argument(std::string(fn) + ": negative flow");
}
inline void check_saturation(double x, double capacity, const char* fn) {
    if (x > kSaturationCap * capacity)
        throw SaturationError(std::string(fn) + ": flow exceeds saturation cap");
}
}  // namespace detail

/// BPR travel time t0 * (1 + 0.15 (x/C)^4).
inline double road_time(const RoadLpf& lpf, double x) {
    detail::check_flow(x, "road_time");
    detail::check_saturation(x, lpf.capacity, "road_time");
    const double q = x / lpf.capacity;
    const double q2 = q * q;
    return lpf.t0 * (1.0 + RoadLpf::coefficient * q2 * q2);
}

/// d(road_time)/dx = 0.6 t0 x^3 / C^4.
inline double road_time_deriv(const RoadLpf& lpf, double x) {
    detail::check_flow(x, "road_time_deriv");
    detail::check_saturation(x, lpf.capacity, "road_time_deriv");
    const double q = x / lpf.capacity;
    return lpf.t0 * 4.0 * RoadLpf::coefficient * q * q * q / lpf.capacity;
}

/// Closed form of the BPR integral: t0 (x + 0.03 x^5 / C^4).
inline double road_time_integral(const RoadLpf& lpf, double x) {
    detail::check_flow(x, "road_time_integral");
    detail::check_saturation(x, lpf.capacity, "road_time_integral");
    const double q = x / lpf.capacity;
    const double q2 = q * q;
    return lpf.t0 * (x + RoadLpf::coefficient / 5.0 * x * q2 * q2);
}

/// Shared-track rail delay t0 * (1 + ((x + x_opp)/C)^beta); the twin link's
/// flow congests this direction too.
inline double rail_time(const RailLpf& lpf, double x, double x_opp) {
    detail::check_flow(x, "rail_time");
    detail::check_flow(x_opp, "rail_time");
    const double sum = x + x_opp;
    detail::check_saturation(sum, lpf.capacity, "rail_time");
    return lpf.t0 * (1.0 + std::pow(sum / lpf.capacity, lpf.beta));
}

/// Partial derivative of rail_time with respect to the own-direction flow:
/// t0 beta (x + x_opp)^(beta-1) / C^beta.
inline double rail_time_deriv(const RailLpf& lpf, double x, double x_opp) {
    detail::check_flow(x, "rail_time_deriv");
    detail::check_flow(x_opp, "rail_time_deriv");
    const double sum = x + x_opp;
    detail::check_saturation(sum, lpf.capacity, "rail_time_deriv");
    // pow(0, 0) == 1 keeps the beta == 1 case exact (constant slope t0/C).
    return lpf.t0 * lpf.beta * std::pow(sum / lpf.capacity, lpf.beta - 1.0) / lpf.capacity;
}

/// Integral of rail_time over combined flow: t0 (y + y^(beta+1) / ((beta+1) C^beta)).
inline double rail_time_integral(const RailLpf& lpf, double combined) {
    detail::check_flow(combined, "rail_time_integral");
    detail::check_saturation(combined, lpf.capacity, "rail_time_integral");
    const double q = std::pow(combined / lpf.capacity, lpf.beta);
    return lpf.t0 * (combined + q * combined / (lpf.beta + 1.0));
}

/// Per-link delay parameters compiled from the network, indexed densely.
/// Freely shared across threads once built.
class LpfTable {
public:
    LpfTable() = default;

    /// Compiles one row per link; rail links take `default_beta` unless they
    /// carry a per-link override. Requires an indexed network.
    LpfTable(const Network& net, double default_beta) {
        if (!net.indexed()) throw std::logic_error("LpfTable: network not indexed");
        if (!(std::isfinite(default_beta) && default_beta >= 1.0))
            throw std::invalid_argument("LpfTable: beta must be >= 1");
        const std::size_t n = net.link_count();
        kind_.resize(n);
        t0_.resize(n);
        capacity_.resize(n);
        beta_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const Link& l = net.links[i];
            kind_[i] = l.kind;
            t0_[i] = l.free_flow_time;
            capacity_[i] = l.capacity;
            beta_[i] = l.kind == LinkKind::rail ? l.beta.value_or(default_beta) : 0.0;
        }
    }

    LinkKind kind(int32_t a) const { return kind_[static_cast<std::size_t>(a)]; }
    double t0(int32_t a) const { return t0_[static_cast<std::size_t>(a)]; }
    double capacity(int32_t a) const { return capacity_[static_cast<std::size_t>(a)]; }
    double beta(int32_t a) const { return beta_[static_cast<std::size_t>(a)]; }

    /// Travel time at own flow x and (for rail) opposite-direction flow x_opp.
    double time(int32_t a, double x, double x_opp) const {
        switch (kind(a)) {
            case LinkKind::road:
                return road_time(RoadLpf{t0(a), capacity(a)}, x);
            case LinkKind::rail:
                return rail_time(RailLpf{t0(a), capacity(a), beta(a)}, x, x_opp);
            default:
                return t0(a);
        }
    }

    /// d(time)/d(own flow); zero for fixed-delay links.
    double deriv(int32_t a, double x, double x_opp) const {
        switch (kind(a)) {
            case LinkKind::road:
                return road_time_deriv(RoadLpf{t0(a), capacity(a)}, x);
            case LinkKind::rail:
                return rail_time_deriv(RailLpf{t0(a), capacity(a), beta(a)}, x, x_opp);
            default:
                return 0.0;
        }
    }

    bool flow_dependent(int32_t a) const {
        return kind(a) == LinkKind::road || kind(a) == LinkKind::rail;
    }

private:
    std::vector<LinkKind> kind_;
    std::vector<double> t0_;
    std::vector<double> capacity_;
    std::vector<double> beta_;
};

}  // namespace freight
