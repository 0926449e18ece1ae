#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <sstream>

#include "lacg/master.hpp"

using namespace lacg;

namespace {

// Every elementary route of the instance, as master columns.
void permute(const ArcLibrary& lib, std::vector<CustomerId>& prefix, int demand,
             std::vector<Route>& out) {
    const Instance& inst = lib.instance();
    for (CustomerId u = 0; u < inst.num_customers(); ++u) {
        if (std::find(prefix.begin(), prefix.end(), u) != prefix.end()) continue;
        if (demand + inst.demand(u) > inst.capacity()) continue;
        prefix.push_back(u);
        out.push_back(make_route(prefix, lib));
        permute(lib, prefix, demand + inst.demand(u), out);
        prefix.pop_back();
    }
}

std::vector<Route> all_elementary_routes(const ArcLibrary& lib) {
    std::vector<Route> out;
    std::vector<CustomerId> prefix;
    permute(lib, prefix, 0, out);
    return out;
}

Instance remote_trio() {
    return Instance({50.0, 50.0, 50.0}, {0.0, 0.0, 0.0}, {1, 1, 1}, 0.0, 0.0, 2, 0,
                    DistanceRounding::kExactEuclidean);
}

}  // namespace

TEST_CASE("column construction: cost, coverage, decomposition, guards") {
    const Instance inst({3.0, 3.0}, {4.0, -4.0}, {1, 1}, 0.0, 0.0, 3, 0,
                        DistanceRounding::kExactEuclidean);
    const ArcLibrary lib(inst, 1);

    const Route route = make_route({0, 1}, lib);
    CHECK(route.cost == doctest::Approx(5.0 + 8.0 + 5.0).epsilon(1e-12));
    CHECK(route.coverage(0) == 1);
    CHECK(route.coverage(1) == 1);
    CHECK(!route.arcs.empty());
    double arc_cost = inst.dist(kDepotSource, 0);
    for (int a : route.arcs) arc_cost += lib.arcs()[a].cost;
    CHECK(arc_cost == doctest::Approx(route.cost).epsilon(1e-12));

    CHECK_THROWS_AS(make_route({}, lib), SolveError);
    CHECK_THROWS_AS(make_route({0, 7}, lib), SolveError);
    CHECK_THROWS_AS(make_route({0, 1, 0, 1}, lib), SolveError);  // demand 4 > 3
}

TEST_CASE("master LP over single-customer columns prices out-and-back trips") {
    const Instance inst = generate_synthetic(5, 4, DemandMode::kUnit, 21);
    const ArcLibrary lib(inst, 2);
    const CutPool pool(lib);

    std::vector<Route> columns;
    double expect = 0.0;
    for (CustomerId u = 0; u < 5; ++u) {
        columns.push_back(make_route({u}, lib));
        expect += inst.dist(kDepotSource, u) + inst.dist(u, kDepotSink);
    }
    const RmpResult rmp = solve_rmp(columns, pool);
    CHECK(rmp.objective == doctest::Approx(expect).epsilon(1e-9));
    CHECK(rmp.artificial == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rmp.theta.sum() == doctest::Approx(5.0).epsilon(1e-9));
    for (int u = 0; u < 5; ++u) CHECK(rmp.duals.pi(u) >= -1e-9);
    CHECK(rmp.duals.pi0 >= -1e-9);
}

TEST_CASE("three remote co-located customers: halves beat singles until the subset row") {
    const Instance inst = remote_trio();
    const ArcLibrary lib(inst, 2);
    CutPool pool(lib);

    std::vector<Route> columns;
    columns.push_back(make_route({0, 1}, lib));
    columns.push_back(make_route({0, 2}, lib));
    columns.push_back(make_route({1, 2}, lib));
    for (CustomerId u = 0; u < 3; ++u) columns.push_back(make_route({u}, lib));

    const RmpResult loose = solve_rmp(columns, pool);
    CHECK(loose.objective == doctest::Approx(150.0).epsilon(1e-9));
    CHECK(loose.theta.sum() == doctest::Approx(1.5).epsilon(1e-9));
    for (int c = 0; c < 3; ++c) CHECK(loose.theta(c) == doctest::Approx(0.5).epsilon(1e-9));

    // Pair routes decompose into one arc serving two members, so each counts
    // once toward the subset row; the row then admits at most one pair.
    pool.add(SubsetRowCut{{0, 1, 2}, 2});
    for (int c = 0; c < 3; ++c) CHECK(sri_route_coeff(columns[c], pool, 0) == 1.0);
    for (int c = 3; c < 6; ++c) CHECK(sri_route_coeff(columns[c], pool, 0) == 0.0);

    const RmpResult tight = solve_rmp(columns, pool);
    CHECK(tight.objective == doctest::Approx(200.0).epsilon(1e-9));
    CHECK(tight.theta.sum() == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(tight.duals.sri(0) >= -1e-9);
}

TEST_CASE("column generation on a single customer stops immediately") {
    const Instance inst = generate_synthetic(1, 3, DemandMode::kUnit, 2);
    const ArcLibrary lib(inst, 0);
    const CutPool pool(lib);

    const CgResult run = solve_cg_baseline(pool);
    CHECK(run.iterations <= 2);
    CHECK(run.objective ==
          doctest::Approx(inst.dist(kDepotSource, 0) + inst.dist(0, kDepotSink))
              .epsilon(1e-9));
    CHECK(run.artificial == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(!run.hit_time_cap);
}

TEST_CASE("column generation matches the LP over every elementary route") {
    for (int seed : {3, 4}) {
        const Instance inst = generate_synthetic(seed == 3 ? 5 : 6, 3, DemandMode::kUnit,
                                                 40 + seed);
        const ArcLibrary lib(inst, 2);
        CutPool pool(lib);
        if (seed == 4) {
            // Equality must survive active cut rows of both kinds.
            pool.add(SubsetRowCut{{0, 1, 2}, 2});
            pool.add(RciCut{{0, 3}, rci_bound(inst, {0, 3})});
        }

        const RmpResult oracle = solve_rmp(all_elementary_routes(lib), pool);

        std::ostringstream trace;
        CgConfig config;
        config.trace = &trace;
        const CgResult run = solve_cg_baseline(pool, config);

        CHECK(run.objective == doctest::Approx(oracle.objective).epsilon(1e-6));
        CHECK(run.artificial == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(run.lower_bound <= run.objective + 1e-9);
        CHECK(run.lower_bound >=
              run.objective - inst.num_customers() * config.epsilon - 1e-9);

        for (std::size_t i = 0; i + 1 < run.history.size(); ++i)
            CHECK(run.history[i + 1].objective <= run.history[i].objective + 1e-9);
        for (const CgIteration& it : run.history) {
            CHECK(it.lower_bound <= it.objective + 1e-9);
            CHECK(it.min_reduced_cost <= 1e-9);
        }
        for (const Route& col : run.columns) CHECK(is_elementary(col.visits));

        // One header plus one row per pricing round.
        const std::string csv = trace.str();
        CHECK(std::count(csv.begin(), csv.end(), '\n') ==
              static_cast<long>(run.iterations) + 1);
        CHECK(csv.rfind("iteration,objective,", 0) == 0);
    }
}

TEST_CASE("a zero time cap returns the artificial solution flagged") {
    const Instance inst = generate_synthetic(4, 3, DemandMode::kUnit, 8);
    const ArcLibrary lib(inst, 2);
    const CutPool pool(lib);

    CgConfig config;
    config.time_cap_seconds = 0.0;
    const CgResult run = solve_cg_baseline(pool, config);
    CHECK(run.hit_time_cap);
    CHECK(run.iterations == 0);
    CHECK(run.artificial == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(run.objective ==
          doctest::Approx(4 * (2.0 * inst.max_distance()) * 10.0).epsilon(1e-9));
}
