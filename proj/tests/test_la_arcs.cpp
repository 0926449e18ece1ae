#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "lacg/la_arcs.hpp"

using namespace lacg;

namespace {

// Eight customers on a unit circle, depot at the center.
Instance clock_instance() {
    std::vector<double> xs, ys;
    for (int i = 0; i < 8; ++i) {
        const double a = i * std::numbers::pi / 4.0;
        xs.push_back(std::cos(a));
        ys.push_back(std::sin(a));
    }
    return Instance(std::move(xs), std::move(ys), std::vector<int>(8, 1), 0.0, 0.0, 8, 0,
                    DistanceRounding::kExactEuclidean);
}

// Cheapest order of `inters` between `first` and `last` by brute force,
// ties toward the lexicographically smallest sequence.
std::pair<double, std::vector<CustomerId>> brute_force_order(const Instance& inst,
                                                             CustomerId first, int last,
                                                             std::vector<CustomerId> inters) {
    std::sort(inters.begin(), inters.end());
    double best = std::numeric_limits<double>::infinity();
    std::vector<CustomerId> best_order;
    do {
        double cost = 0.0;
        int cur = first;
        for (CustomerId w : inters) {
            cost += inst.dist(cur, w);
            cur = w;
        }
        cost += inst.dist(cur, last);
        if (cost < best) {
            best = cost;
            best_order = inters;
        }
    } while (std::next_permutation(inters.begin(), inters.end()));
    return {best, best_order};
}

}  // namespace

TEST_CASE("local areas pick the nearest customers with id tie-breaks") {
    const Instance inst = clock_instance();
    const auto nb = build_la_neighbors(inst, 4);
    CHECK(nb[3] == std::vector<CustomerId>{1, 2, 4, 5});
    CHECK(nb[0] == std::vector<CustomerId>{1, 2, 6, 7});

    // Equidistant candidates go to the lower id: 1 and 2 are both two away
    // from 0.
    const Instance tie({0.0, 2.0, -2.0}, {0.0, 0.0, 0.0}, {1, 1, 1}, 0, 1, 3, 0,
                       DistanceRounding::kExactEuclidean);
    const auto tnb = build_la_neighbors(tie, 1);
    CHECK(tnb[0] == std::vector<CustomerId>{1});
    CHECK(tnb[1] == std::vector<CustomerId>{0});

    // More neighbors than customers exist is fine, but the arc library
    // refuses local areas it cannot enumerate subsets of.
    const auto all = build_la_neighbors(tie, 6);
    CHECK(all[0] == std::vector<CustomerId>{1, 2});
    const Instance big = generate_synthetic(12, 30, DemandMode::kUnit, 1);
    CHECK_THROWS_AS(ArcLibrary(big, 9), ConfigError);
}

TEST_CASE("arc costs and orders match brute force") {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        const Instance inst = generate_synthetic(9, 30, DemandMode::kUniform1To10, seed);
        const ArcLibrary lib(inst, 5);
        for (const LaArc& arc : lib.arcs()) {
            std::vector<CustomerId> inters;
            for (CustomerId w : arc.order)
                if (w != arc.first) inters.push_back(w);
            const auto [cost, order] = brute_force_order(inst, arc.first, arc.last, inters);
            CHECK(arc.cost == doctest::Approx(cost).epsilon(1e-12));
            std::vector<CustomerId> expected{arc.first};
            expected.insert(expected.end(), order.begin(), order.end());
            CHECK(arc.order == expected);
        }
    }
}

TEST_CASE("the library is exhaustive over feasible intermediate sets") {
    const Instance inst = generate_synthetic(8, 20, DemandMode::kUniform1To10, 11);
    const ArcLibrary lib(inst, 4);
    const int n = inst.num_customers();

    std::size_t expected = 0;
    for (CustomerId u = 0; u < n; ++u) {
        const auto& nb = lib.neighbors(u);
        for (int last = 0; last <= n; ++last) {
            if (last < n &&
                (last == u || std::binary_search(nb.begin(), nb.end(), last)))
                continue;
            const int limit = inst.capacity() - (last < n ? inst.demand(last) : 0);
            for (std::uint32_t mask = 0; mask < (1u << nb.size()); ++mask) {
                int demand = inst.demand(u);
                for (std::size_t i = 0; i < nb.size(); ++i)
                    if (mask & (1u << i)) demand += inst.demand(nb[i]);
                if (demand <= limit) ++expected;
            }
        }
    }
    CHECK(lib.arcs().size() == expected);

    // No duplicate (first, last, set) triples.
    std::set<std::tuple<int, int, std::uint32_t>> keys;
    for (const LaArc& arc : lib.arcs()) keys.insert({arc.first, arc.last, arc.inter_mask});
    CHECK(keys.size() == lib.arcs().size());

    for (const LaArc& arc : lib.arcs()) {
        CHECK(arc.demand <= inst.capacity());
        if (arc.last != kDepotSink) {
            CHECK(arc.demand + inst.demand(arc.last) <= inst.capacity());
            CHECK(!std::binary_search(lib.neighbors(arc.first).begin(),
                                      lib.neighbors(arc.first).end(), arc.last));
        }
        CHECK(arc.order.front() == arc.first);
        std::vector<CustomerId> sorted = arc.order;
        std::sort(sorted.begin(), sorted.end());
        CHECK(sorted == arc.cover);
    }
}

TEST_CASE("lookup by intermediate set") {
    const Instance inst = generate_synthetic(8, 25, DemandMode::kUniform1To10, 2);
    const ArcLibrary lib(inst, 4);

    for (const LaArc& arc : lib.arcs()) {
        std::vector<CustomerId> inters;
        for (CustomerId w : arc.cover)
            if (w != arc.first) inters.push_back(w);
        CHECK(lib.find(arc.first, arc.last, inters) == &arc);
    }

    // An intermediate outside the local area has no arc.
    const auto& nb = lib.neighbors(0);
    for (CustomerId w = 1; w < inst.num_customers(); ++w) {
        if (std::binary_search(nb.begin(), nb.end(), w)) continue;
        CHECK(lib.find(0, kDepotSink, {w}) == nullptr);
        break;
    }
}

TEST_CASE("special indexes walk the local-area boundaries") {
    // Areas: 0 -> {1, 2}, others empty.
    const std::vector<std::vector<CustomerId>> areas{{1, 2}, {}, {}, {}};
    CHECK(special_indexes({0, 1, 2, 3}, areas) == std::vector<int>{0, 3});
    CHECK(special_indexes({3, 0, 1, 2}, areas) == std::vector<int>{0, 1});
    CHECK(special_indexes({1, 2, 3}, areas) == std::vector<int>{0, 1, 2});
    CHECK(special_indexes({0, 1, 2}, areas) == std::vector<int>{0});
}

TEST_CASE("route decomposition splits at special indexes") {
    std::mt19937_64 rng(17);
    const Instance inst = generate_synthetic(10, 35, DemandMode::kUniform1To10, 23);
    const ArcLibrary lib(inst, 4);

    for (int trial = 0; trial < 40; ++trial) {
        std::vector<CustomerId> pool(inst.num_customers());
        for (int u = 0; u < inst.num_customers(); ++u) pool[u] = u;
        for (std::size_t i = pool.size(); i > 1; --i)
            std::swap(pool[i - 1], pool[rng() % i]);
        std::vector<CustomerId> visits;
        int demand = 0;
        for (CustomerId u : pool) {
            if (demand + inst.demand(u) > inst.capacity()) break;
            demand += inst.demand(u);
            visits.push_back(u);
        }
        if (visits.empty()) continue;

        const auto arcs = decompose(visits, lib);
        REQUIRE(!arcs.empty());
        CHECK(arcs.front()->first == visits.front());
        CHECK(arcs.back()->last == kDepotSink);
        int total = 0;
        std::vector<CustomerId> covered;
        for (std::size_t j = 0; j < arcs.size(); ++j) {
            total += arcs[j]->demand;
            covered.insert(covered.end(), arcs[j]->cover.begin(), arcs[j]->cover.end());
            if (j + 1 < arcs.size()) CHECK(arcs[j]->last == arcs[j + 1]->first);
        }
        CHECK(total == demand);
        std::sort(covered.begin(), covered.end());
        std::vector<CustomerId> expected = visits;
        std::sort(expected.begin(), expected.end());
        CHECK(covered == expected);

        // Arc orders are the cheap orders, so their sum cannot exceed the
        // cost of walking the route as given.
        double walked = 0.0;
        for (std::size_t i = 0; i + 1 < visits.size(); ++i)
            walked += inst.dist(visits[i], visits[i + 1]);
        walked += inst.dist(visits.back(), kDepotSink);
        double arc_sum = 0.0;
        for (const LaArc* arc : arcs) arc_sum += arc->cost;
        CHECK(arc_sum <= walked + 1e-9);
    }
}

TEST_CASE("route class predicates") {
    CHECK(is_elementary({0, 1, 2}));
    CHECK(!is_elementary({0, 1, 0}));

    // A repeat three positions apart is fine for Q-routes but not with a
    // two-cycle ban.
    CHECK(bans_repeats_within({0, 1, 2, 0}, 2));
    CHECK(!bans_repeats_within({0, 1, 2, 0}, 3));
    CHECK(!bans_repeats_within({0, 1, 0}, 2));
    CHECK(bans_repeats_within({0, 1, 0}, 1));
    CHECK(!bans_repeats_within({0, 0}, 1));

    const std::vector<std::vector<CustomerId>> memory{{1}, {0}, {}};
    CHECK(ng_feasible({0, 2, 0}, memory));   // 2 does not remember 0
    CHECK(!ng_feasible({0, 1, 0}, memory));  // 1 remembers 0
    CHECK(ng_feasible({0, 1, 2, 0}, memory));
}

TEST_CASE("a cycle can be ng-feasible yet cross no special index") {
    const Instance inst = clock_instance();
    const auto areas = build_la_neighbors(inst, 4);
    const std::vector<CustomerId> route{2, 0, 4, 0};

    CHECK(special_indexes(route, areas) == std::vector<int>{0});
    CHECK(ng_feasible(route, areas));
    CHECK(!la_feasible(route, areas));

    // Local-area feasibility is still implied by elementarity and implies
    // ng-feasibility on the same sets.
    std::mt19937_64 rng(3);
    const Instance rnd = generate_synthetic(7, 25, DemandMode::kUniform1To10, 9);
    const auto rnd_areas = build_la_neighbors(rnd, 3);
    for (int trial = 0; trial < 400; ++trial) {
        std::vector<CustomerId> visits(2 + rng() % 5);
        for (auto& v : visits) v = rng() % rnd.num_customers();
        if (la_feasible(visits, rnd_areas)) CHECK(ng_feasible(visits, rnd_areas));
        if (is_elementary(visits)) {
            CHECK(la_feasible(visits, rnd_areas));
            CHECK(bans_repeats_within(visits, visits.size()));
        }
    }
}

TEST_CASE("arc cache round trip") {
    const Instance inst = generate_synthetic(7, 20, DemandMode::kUniform1To10, 31);
    const ArcLibrary lib(inst, 3);

    std::stringstream buffer;
    lib.save(buffer);
    const auto loaded = ArcLibrary::load(buffer, inst, 3);
    REQUIRE(loaded.has_value());
    REQUIRE(loaded->arcs().size() == lib.arcs().size());
    for (std::size_t i = 0; i < lib.arcs().size(); ++i) {
        CHECK(loaded->arcs()[i].first == lib.arcs()[i].first);
        CHECK(loaded->arcs()[i].last == lib.arcs()[i].last);
        CHECK(loaded->arcs()[i].cost == lib.arcs()[i].cost);
        CHECK(loaded->arcs()[i].order == lib.arcs()[i].order);
    }
    CHECK(loaded->la_neighbors() == lib.la_neighbors());

    // Stale caches are rejected: wrong k, wrong instance, truncated data.
    buffer.clear();
    buffer.seekg(0);
    CHECK(!ArcLibrary::load(buffer, inst, 4).has_value());
    buffer.clear();
    buffer.seekg(0);
    const Instance other = generate_synthetic(7, 20, DemandMode::kUniform1To10, 32);
    CHECK(!ArcLibrary::load(buffer, other, 3).has_value());
    std::stringstream truncated(buffer.str().substr(0, 40));
    CHECK(!ArcLibrary::load(truncated, inst, 3).has_value());
}
