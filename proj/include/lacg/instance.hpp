#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lacg/errors.hpp"

#include "json.hpp"

namespace lacg {

using CustomerId = int;

// The depot is one physical location but plays two roles in a route: every
// route leaves from -1 and ends at -2. dist(-1, -2) is therefore 0.
inline constexpr int kDepotSource = -1;
inline constexpr int kDepotSink = -2;

enum class DistanceRounding {
    kExactEuclidean,   // c_uv = sqrt((x_u-x_v)^2 + (y_u-y_v)^2)
    kNearestInteger,   // CVRPLIB convention: nint of the euclidean distance
};

enum class DemandMode {
    kUnit,             // every customer demands exactly 1
    kUniform1To10,     // integer demands drawn uniformly from [1, 10]
};

// A CVRP instance: customer sites with integer demands, one depot, a vehicle
// capacity and a fleet bound. Customers are identified by dense ids
// 0..num_customers()-1; the depot is addressed through the sentinels above.
class Instance {
public:
    Instance(std::vector<double> xs,
             std::vector<double> ys,
             std::vector<int> demands,
             double depot_x,
             double depot_y,
             int capacity,
             int fleet_bound,  // pass 0 to default to the customer count
             DistanceRounding rounding);

    // Returns the number of customers (the depot is not counted).
    int num_customers() const { return n_; }

    // Returns the vehicle capacity d_0.
    int capacity() const { return capacity_; }

    // Returns the maximum number of routes an LP solution may use.
    int fleet_bound() const { return fleet_; }

    // Returns the demand of customer u; the depot sentinels have demand 0.
    int demand(int u) const { return u >= 0 ? demands_[u] : 0; }

    // Returns the travel cost between two sites; either argument may be a
    // customer id or a depot sentinel.
    double dist(int a, int b) const { return cost_(site(a), site(b)); }

    // Returns the full cost matrix; row/column num_customers() is the depot.
    const Eigen::MatrixXd& cost_matrix() const { return cost_; }

    double x(int a) const { return xs_[site(a)]; }
    double y(int a) const { return ys_[site(a)]; }

    DistanceRounding rounding() const { return rounding_; }

    // Returns the largest pairwise travel cost; used to price the artificial
    // column prohibitively.
    double max_distance() const { return max_dist_; }

    nlohmann::ordered_json to_json() const;
    static Instance from_json(const nlohmann::json& j);

    // Stable fingerprint of the instance content (sites, demands, capacity,
    // fleet bound and rounding mode); keys the arc cache.
    std::uint64_t content_hash() const;

private:
    int site(int a) const { return a >= 0 ? a : n_; }

    int n_;
    int capacity_;
    int fleet_;
    DistanceRounding rounding_;
    std::vector<double> xs_, ys_;   // size n_+1, last entry is the depot
    std::vector<int> demands_;      // size n_
    Eigen::MatrixXd cost_;          // (n_+1) x (n_+1)
    double max_dist_ = 0.0;
};

// Reads a CVRPLIB/TSPLIB file (EDGE_WEIGHT_TYPE EUC_2D). The depot is the
// node named in DEPOT_SECTION, or the unique zero-demand node when that
// section is absent. Throws ParseError naming the offending line.
Instance parse_cvrplib(std::istream& in,
                       DistanceRounding rounding = DistanceRounding::kNearestInteger);
Instance parse_cvrplib_file(const std::string& path,
                            DistanceRounding rounding = DistanceRounding::kNearestInteger);

// Draws customer and depot coordinates uniformly from the unit square.
// Deterministic for a fixed seed, independent of platform.
Instance generate_synthetic(int num_customers,
                            int capacity,
                            DemandMode mode,
                            std::uint64_t seed);

// Divides all demands and the capacity by `divisor`, rounding up.
Instance apply_demand_divisor(const Instance& inst, int divisor);

}  // namespace lacg
