#include "lacg/master.hpp"

#include <chrono>
#include <set>
#include <utility>

namespace lacg {

namespace {

double elapsed_seconds(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

// Row layout of the master LP: covering rows first, then the fleet row,
// then one row per active cut, subset-row before capacity.
struct RowLayout {
    int n = 0;
    int nsri = 0;
    int nrci = 0;
    int fleet() const { return n; }
    int sri(int i) const { return n + 1 + i; }
    int rci(int i) const { return n + 1 + nsri + i; }
};

RowLayout add_master_rows(LpModel& model, const CutPool& pool) {
    const Instance& inst = pool.library().instance();
    RowLayout rows;
    rows.n = inst.num_customers();
    rows.nsri = static_cast<int>(pool.sri().size());
    rows.nrci = static_cast<int>(pool.rci().size());
    for (int u = 0; u < rows.n; ++u) model.add_row(RowSense::kGe, 1.0);
    model.add_row(RowSense::kLe, inst.fleet_bound());
    for (const SubsetRowCut& cut : pool.sri()) model.add_row(RowSense::kLe, cut.rhs());
    for (const RciCut& cut : pool.rci()) model.add_row(RowSense::kGe, cut.rhs);
    return rows;
}

// Feasibility column: covers every customer once at a prohibitive cost and
// satisfies every entering-count row on its own, so the LP stays feasible
// no matter which real columns exist yet. It never binds a subset-row cut.
void add_artificial_column(LpModel& model, const CutPool& pool, const RowLayout& rows) {
    const Instance& inst = pool.library().instance();
    const int col = model.add_var(rows.n * (2.0 * inst.max_distance()) * 10.0);
    for (int u = 0; u < rows.n; ++u) model.set_coeff(u, col, 1.0);
    model.set_coeff(rows.fleet(), col, 1.0);
    for (int i = 0; i < rows.nrci; ++i)
        model.set_coeff(rows.rci(i), col, pool.rci()[i].rhs);
}

void add_route_column(LpModel& model, const Route& route, const CutPool& pool,
                      const RowLayout& rows) {
    const int col = model.add_var(route.cost);
    for (int u = 0; u < rows.n; ++u)
        if (route.coverage(u) > 0) model.set_coeff(u, col, route.coverage(u));
    model.set_coeff(rows.fleet(), col, 1.0);
    for (int i = 0; i < rows.nsri; ++i)
        if (const double a = sri_route_coeff(route, pool, i); a != 0.0)
            model.set_coeff(rows.sri(i), col, a);
    for (int i = 0; i < rows.nrci; ++i)
        if (const double a = rci_route_coeff(route, pool, i); a != 0.0)
            model.set_coeff(rows.rci(i), col, a);
}

// Covering and capacity rows are >=, the fleet and subset rows are <=; all
// four dual blocks are reported as the magnitudes the pricing formula uses.
DualSolution extract_duals(const LpResult& res, const RowLayout& rows) {
    DualSolution duals;
    duals.pi = res.duals.segment(0, rows.n);
    duals.pi0 = -res.duals(rows.fleet());
    duals.sri = -res.duals.segment(rows.n + 1, rows.nsri);
    duals.rci = res.duals.segment(rows.n + 1 + rows.nsri, rows.nrci);
    return duals;
}

}  // namespace

Route make_route(const std::vector<CustomerId>& visits, const ArcLibrary& lib) {
    const Instance& inst = lib.instance();
    if (visits.empty()) throw SolveError("a route must visit at least one customer");
    int demand = 0;
    for (CustomerId u : visits) {
        if (u < 0 || u >= inst.num_customers())
            throw SolveError("route visits an unknown customer");
        demand += inst.demand(u);
    }
    if (demand > inst.capacity()) throw SolveError("route demand exceeds vehicle capacity");

    Route route;
    route.visits = visits;
    route.cost = inst.dist(kDepotSource, visits.front());
    for (std::size_t k = 0; k + 1 < visits.size(); ++k)
        route.cost += inst.dist(visits[k], visits[k + 1]);
    route.cost += inst.dist(visits.back(), kDepotSink);
    route.arcs.reserve(visits.size());
    for (const LaArc* arc : decompose(visits, lib))
        route.arcs.push_back(static_cast<int>(arc - lib.arcs().data()));
    route.coverage = Eigen::VectorXi::Zero(inst.num_customers());
    for (CustomerId u : visits) route.coverage(u) += 1;
    return route;
}

double sri_route_coeff(const Route& route, const CutPool& pool, int cut) {
    const auto& arcs = pool.library().arcs();
    int total = 0;
    for (int a : route.arcs) total += sri_arc_coeff(pool.sri()[cut], arcs[a]);
    return total;
}

double rci_route_coeff(const Route& route, const CutPool& pool, int cut) {
    const auto& arcs = pool.library().arcs();
    int total = 0;
    for (int a : route.arcs) total += rci_arc_coeff(pool.rci()[cut], arcs[a]);
    return total;
}

RmpResult solve_rmp(const std::vector<Route>& columns, const CutPool& pool) {
    LpModel model;
    const RowLayout rows = add_master_rows(model, pool);
    add_artificial_column(model, pool, rows);
    for (const Route& route : columns) add_route_column(model, route, pool, rows);

    const LpResult res = solve_lp(model);
    if (res.status != LpStatus::kOptimal)
        throw SolveError("master LP did not reach an optimum");

    RmpResult out;
    out.objective = res.objective;
    out.artificial = res.x(0);
    out.theta = res.x.tail(static_cast<Eigen::Index>(columns.size()));
    out.duals = extract_duals(res, rows);
    out.simplex_iterations = res.simplex_iterations;
    return out;
}

CgResult solve_cg_baseline(const CutPool& pool, const CgConfig& config,
                           std::vector<Route> initial) {
    const auto start = std::chrono::steady_clock::now();
    const Instance& inst = pool.library().instance();
    const int n = inst.num_customers();

    LpModel model;
    const RowLayout rows = add_master_rows(model, pool);
    add_artificial_column(model, pool, rows);

    CgResult result;
    result.columns = std::move(initial);
    std::set<std::vector<CustomerId>> known;
    for (const Route& route : result.columns) {
        add_route_column(model, route, pool, rows);
        known.insert(route.visits);
    }

    BuiltinSimplexBackend backend;
    const auto lp = backend.attach(&model);
    DssrConfig pricing = config.pricing;
    pricing.epsilon = config.epsilon;
    if (config.trace) {
        config.trace->precision(17);
        *config.trace << "iteration,objective,min_reduced_cost,lower_bound,seconds\n";
    }

    while (true) {
        const auto lp_clock = std::chrono::steady_clock::now();
        const LpResult res = lp->resolve();
        result.lp_seconds += elapsed_seconds(lp_clock);
        if (res.status != LpStatus::kOptimal)
            throw SolveError("master LP did not reach an optimum");

        result.objective = res.objective;
        result.artificial = res.x(0);
        result.theta = res.x.tail(static_cast<Eigen::Index>(result.columns.size()));
        result.duals = extract_duals(res, rows);

        if (elapsed_seconds(start) > config.time_cap_seconds) {
            result.hit_time_cap = true;
            break;
        }

        const auto price_clock = std::chrono::steady_clock::now();
        DssrStats stats;
        const LaRoute priced = dssr_solve(pool, result.duals, pricing, &stats);
        result.pricing_seconds += elapsed_seconds(price_clock);

        // Any relaxation optimum bounds the best true column, so the dual
        // bound holds even when pricing exited early.
        const double bound = res.objective + n * std::min(0.0, stats.last_relaxed_value);
        result.lower_bound = std::max(result.lower_bound, bound);
        ++result.iterations;
        result.history.push_back({res.objective, stats.last_relaxed_value, bound,
                                  elapsed_seconds(start)});
        if (config.trace)
            *config.trace << result.iterations << ',' << res.objective << ','
                          << stats.last_relaxed_value << ',' << bound << ','
                          << result.history.back().seconds << '\n';

        if (priced.reduced_cost >= -config.epsilon) break;

        if (!known.insert(priced.visits).second)
            throw SolveError("pricing produced an existing column below -epsilon");
        Route column = make_route(priced.visits, pool.library());
        add_route_column(model, column, pool, rows);
        result.columns.push_back(std::move(column));
    }
    return result;
}

}  // namespace lacg
