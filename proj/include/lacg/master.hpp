#pragma once

#include <limits>
#include <ostream>
#include <vector>

#include "lacg/cuts.hpp"
#include "lacg/duals.hpp"
#include "lacg/lp_backend.hpp"
#include "lacg/pricing.hpp"

namespace lacg {

// One explicit column of the set-cover master: a capacity-feasible visit
// sequence with its cost and arc decomposition. Cut-row coefficients are not
// stored; they are recomputed from `arcs` against whatever cut pool is active
// so a column can never go stale when new cuts arrive.
struct Route {
    std::vector<CustomerId> visits;
    std::vector<int> arcs;       // indexes into the arc library
    double cost = 0.0;
    Eigen::VectorXi coverage;    // visit count per customer
};

// Validates the sequence, prices its cost from raw distances and decomposes
// it. Throws SolveError on unknown customers or a capacity violation.
Route make_route(const std::vector<CustomerId>& visits, const ArcLibrary& lib);

// Row coefficients of a column in the pool's active cut rows.
double sri_route_coeff(const Route& route, const CutPool& pool, int cut);
double rci_route_coeff(const Route& route, const CutPool& pool, int cut);

struct RmpResult {
    double objective = 0.0;
    Eigen::VectorXd theta;       // one weight per input column
    double artificial = 0.0;     // weight left on the feasibility column
    DualSolution duals;
    long long simplex_iterations = 0;
};

// LP optimum of  min c'theta  over per-customer covering rows (>= 1), the
// fleet row (sum theta <= fleet bound) and the pool's cut rows. A high-cost
// feasibility column covering every customer once is appended internally so
// any column set, including the empty one, yields a feasible LP; its weight
// is zero whenever the real columns can cover on their own.
RmpResult solve_rmp(const std::vector<Route>& columns, const CutPool& pool);

struct CgConfig {
    double epsilon = 1e-6;       // stop once no column prices below -epsilon
    double time_cap_seconds = std::numeric_limits<double>::infinity();
    DssrConfig pricing;          // its epsilon is overridden by the one above
    std::ostream* trace = nullptr;  // CSV: iteration,objective,min_rc,bound,seconds
};

struct CgIteration {
    double objective = 0.0;
    double min_reduced_cost = 0.0;  // relaxation optimum, a valid pricing bound
    double lower_bound = 0.0;
    double seconds = 0.0;           // elapsed since the loop started
};

struct CgResult {
    double objective = 0.0;
    double lower_bound = -std::numeric_limits<double>::infinity();
    std::vector<Route> columns;
    Eigen::VectorXd theta;
    double artificial = 0.0;
    DualSolution duals;
    int iterations = 0;
    bool hit_time_cap = false;
    std::vector<CgIteration> history;
    double pricing_seconds = 0.0;
    double lp_seconds = 0.0;
};

// Plain column generation: resolve the master, price the lowest reduced cost
// column, add it, repeat until nothing prices below -epsilon or the time cap
// hits. Starts from `initial` columns (possibly none) plus the internal
// feasibility column; adds one column per iteration.
CgResult solve_cg_baseline(const CutPool& pool, const CgConfig& config = {},
                           std::vector<Route> initial = {});

}  // namespace lacg
