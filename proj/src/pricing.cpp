#include "lacg/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <queue>
#include <tuple>

#include "lacg/errors.hpp"

namespace lacg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t pack_key(CustomerId u, std::uint32_t mem, int d) {
    return (static_cast<std::uint64_t>(u + 2) << 48) |
           (static_cast<std::uint64_t>(d) << 32) | mem;
}

int checked_demand(const std::vector<CustomerId>& visits, const Instance& inst) {
    if (visits.empty()) throw SolveError("empty visit sequence is not a route");
    int demand = 0;
    for (CustomerId u : visits) {
        if (u < 0 || u >= inst.num_customers())
            throw SolveError("visit sequence contains unknown customer " + std::to_string(u));
        demand += inst.demand(u);
    }
    if (demand > inst.capacity())
        throw SolveError("visit sequence demand " + std::to_string(demand) +
                         " exceeds capacity " + std::to_string(inst.capacity()));
    return demand;
}

}  // namespace

RouteClasses classify_route(const std::vector<CustomerId>& visits, const Instance& inst,
                            const std::vector<std::vector<CustomerId>>& la_neighbors,
                            const MemorySets& memory, int K) {
    checked_demand(visits, inst);
    RouteClasses c;
    c.elementary = is_elementary(visits);
    c.kq = bans_repeats_within(visits, K + 1);
    c.ng = ng_feasible(visits, memory);
    c.la = la_feasible(visits, la_neighbors, memory);
    return c;
}

int PricingGraph::node_index(CustomerId u, std::uint32_t mem, int d) const {
    const std::uint64_t key = pack_key(u, mem, d);
    const auto it = std::lower_bound(key_index.begin(), key_index.end(), key,
                                     [](const auto& a, std::uint64_t k) { return a.first < k; });
    if (it == key_index.end() || it->first != key) return -1;
    return it->second;
}

double compute_eta(const DualSolution& duals, const CutPool& pool) {
    const Eigen::VectorXd rc = arc_reduced_costs(duals, pool);
    const auto& arcs = pool.library().arcs();
    double worst = 0.0;
    for (std::size_t i = 0; i < arcs.size(); ++i)
        worst = std::min(worst, rc(static_cast<int>(i)) / arcs[i].demand);
    return -worst;
}

PricingGraph build_pricing_graph(const CutPool& pool, const MemorySets& memory,
                                 const DualSolution& duals, bool dominance_form) {
    const ArcLibrary& lib = pool.library();
    const Instance& inst = lib.instance();
    const int n = inst.num_customers();
    const int d0 = inst.capacity();
    if (static_cast<int>(memory.size()) != n)
        throw ConfigError("memory sets must cover every customer");

    const Eigen::VectorXd rc = arc_reduced_costs(duals, pool);

    PricingGraph g;
    g.lib = &lib;
    g.dominance_form = dominance_form;
    g.eta = dominance_form ? compute_eta(duals, pool) : 0.0;

    // Topological node order: source, customers by decreasing remaining
    // capacity, sink. Every customer-to-customer edge strictly burns demand.
    g.nodes.push_back({kDepotSource, 0, d0});
    for (int d = d0; d >= 1; --d)
        for (CustomerId u = 0; u < n; ++u) {
            if (inst.demand(u) > d) continue;
            const auto& mem = memory[u];
            const int bits = static_cast<int>(mem.size());
            if (bits > 20)
                throw SolveError("memory set of customer " + std::to_string(u) +
                                 " grew past 20 entries; state space too large");
            for (std::uint32_t m = 0; m < (1u << bits); ++m) {
                int spare = d0;
                for (int b = 0; b < bits; ++b)
                    if (m & (1u << b)) spare -= inst.demand(mem[b]);
                if (d <= spare) g.nodes.push_back({u, m, d});
            }
        }
    g.nodes.push_back({kDepotSink, 0, 0});
    g.source = 0;
    g.sink = static_cast<int>(g.nodes.size()) - 1;

    g.key_index.reserve(g.nodes.size());
    for (int i = 0; i < static_cast<int>(g.nodes.size()); ++i)
        g.key_index.emplace_back(pack_key(g.nodes[i].u, g.nodes[i].mem, g.nodes[i].d), i);
    std::sort(g.key_index.begin(), g.key_index.end());

    const auto in_mem = [&](CustomerId holder, std::uint32_t mask, CustomerId w) {
        const auto& mem = memory[holder];
        const auto it = std::lower_bound(mem.begin(), mem.end(), w);
        if (it == mem.end() || *it != w) return false;
        return (mask & (1u << (it - mem.begin()))) != 0;
    };

    g.out_begin.assign(g.nodes.size() + 1, 0);
    for (int i = 0; i < static_cast<int>(g.nodes.size()); ++i) {
        g.out_begin[i] = static_cast<int>(g.edges.size());
        const PricingNode& node = g.nodes[i];
        if (node.u == kDepotSink) continue;

        if (node.u == kDepotSource) {
            // Leaving the depot picks the first customer; the plain form also
            // picks the route's total demand here.
            for (CustomerId u = 0; u < n; ++u) {
                const double w = inst.dist(kDepotSource, u) + duals.pi0;
                if (dominance_form) {
                    const int j = g.node_index(u, 0, d0);
                    if (j >= 0) g.edges.push_back({i, j, -1, w});
                } else {
                    for (int d = inst.demand(u); d <= d0; ++d) {
                        const int j = g.node_index(u, 0, d);
                        if (j >= 0) g.edges.push_back({i, j, -1, w});
                    }
                }
            }
            continue;
        }

        // Cheapest edge per reachable node; later arcs with the same target
        // state only replace on a strict win, so ties keep the lowest index.
        std::map<int, std::pair<double, int>> best;
        for (int last = 0; last <= n; ++last) {
            const int target = last == n ? kDepotSink : last;
            if (target != kDepotSink && in_mem(node.u, node.mem, target)) continue;
            for (const LaArc& arc : lib.from(node.u, target)) {
                bool blocked = false;
                for (CustomerId w : arc.cover)
                    if (w != node.u && in_mem(node.u, node.mem, w)) {
                        blocked = true;
                        break;
                    }
                if (blocked) continue;
                const int arc_idx = static_cast<int>(&arc - lib.arcs().data());

                if (target == kDepotSink) {
                    if (dominance_form) continue;  // closed below via the cheapest arc
                    if (arc.demand != node.d) continue;
                    const double w = rc(arc_idx);
                    auto [it, inserted] = best.try_emplace(g.sink, w, arc_idx);
                    if (!inserted && w < it->second.first) it->second = {w, arc_idx};
                    continue;
                }

                const int d2 = node.d - arc.demand;
                if (d2 < inst.demand(target)) continue;
                std::uint32_t m2 = 0;
                const auto& tmem = memory[target];
                for (int b = 0; b < static_cast<int>(tmem.size()); ++b) {
                    const CustomerId w = tmem[b];
                    const bool carried = in_mem(node.u, node.mem, w);
                    const bool served = std::binary_search(arc.cover.begin(), arc.cover.end(), w);
                    if (carried || served) m2 |= 1u << b;
                }
                const int j = g.node_index(target, m2, d2);
                if (j < 0) continue;
                const double w = rc(arc_idx) + (dominance_form ? g.eta * arc.demand : 0.0);
                auto [it, inserted] = best.try_emplace(j, w, arc_idx);
                if (!inserted && w < it->second.first) it->second = {w, arc_idx};
            }
        }

        if (dominance_form) {
            // Eq.-style closing edge: the cheapest way home from this state,
            // allowed to leave capacity unused.
            double w = kInf;
            int arc_idx = -1;
            for (const LaArc& arc : lib.from(node.u, kDepotSink)) {
                if (arc.demand > node.d) continue;
                bool blocked = false;
                for (CustomerId v : arc.cover)
                    if (v != node.u && in_mem(node.u, node.mem, v)) {
                        blocked = true;
                        break;
                    }
                if (blocked) continue;
                const int idx = static_cast<int>(&arc - lib.arcs().data());
                if (rc(idx) < w) {
                    w = rc(idx);
                    arc_idx = idx;
                }
            }
            if (arc_idx >= 0) best[g.sink] = {w + g.eta * node.d, arc_idx};
        }

        for (const auto& [j, wa] : best) g.edges.push_back({i, j, wa.second, wa.first});
    }
    g.out_begin[g.nodes.size()] = static_cast<int>(g.edges.size());
    return g;
}

void dump_dot(const PricingGraph& g, std::ostream& out) {
    out << "digraph pricing {\n  rankdir=LR;\n";
    for (int i = 0; i < static_cast<int>(g.nodes.size()); ++i) {
        const PricingNode& node = g.nodes[i];
        out << "  n" << i << " [label=\"";
        if (node.u == kDepotSource)
            out << "source";
        else if (node.u == kDepotSink)
            out << "sink";
        else
            out << node.u << "|" << node.mem << "|" << node.d;
        out << "\"];\n";
    }
    for (const PricingEdge& e : g.edges)
        out << "  n" << e.from << " -> n" << e.to << " [label=\"" << e.weight << "\"];\n";
    out << "}\n";
}

namespace {

// Shared decode: walk predecessor edges from the sink, stitch arc orders
// into the visit sequence, and restate the reduced cost without the offset.
LaRoute decode_path(const PricingGraph& g, const std::vector<int>& pred_edge,
                    double path_cost) {
    const ArcLibrary& lib = *g.lib;
    const Instance& inst = lib.instance();
    std::vector<int> chain;
    for (int at = g.sink; at != g.source;) {
        const int e = pred_edge[at];
        if (e < 0) throw SolveError("pricing graph sink is unreachable");
        chain.push_back(e);
        at = g.edges[e].from;
    }
    std::reverse(chain.begin(), chain.end());

    LaRoute route;
    for (int e : chain) {
        const int arc_idx = g.edges[e].arc;
        if (arc_idx < 0) continue;  // source edge
        const LaArc& arc = lib.arcs()[arc_idx];
        route.arcs.push_back(arc_idx);
        route.visits.insert(route.visits.end(), arc.order.begin(), arc.order.end());
        route.cost += arc.cost;
    }
    if (route.visits.empty()) throw SolveError("pricing graph produced an empty route");
    route.cost += inst.dist(kDepotSource, route.visits.front());
    route.specials = special_indexes(route.visits, lib.la_neighbors());
    route.reduced_cost =
        path_cost - (g.dominance_form ? g.eta * inst.capacity() : 0.0);
    return route;
}

}  // namespace

LaRoute bellman_ford_price(const PricingGraph& g, long long* relaxations) {
    const int nn = static_cast<int>(g.nodes.size());
    std::vector<double> dist(nn, kInf);
    std::vector<int> hops(nn, 0), pred(nn, -1);
    dist[g.source] = 0.0;
    long long relaxed = 0;
    for (int i = 0; i < nn; ++i) {
        if (dist[i] == kInf) continue;
        for (int e = g.out_begin[i]; e < g.out_begin[i + 1]; ++e) {
            const PricingEdge& edge = g.edges[e];
            ++relaxed;
            const double cand = dist[i] + edge.weight;
            // The sweep visits sources in node order, so on an exact tie the
            // incumbent already has the lexicographically first predecessor.
            const bool better = cand < dist[edge.to] ||
                                (cand == dist[edge.to] && hops[i] + 1 < hops[edge.to]);
            if (better) {
                dist[edge.to] = cand;
                hops[edge.to] = hops[i] + 1;
                pred[edge.to] = e;
            }
        }
    }
    if (relaxations) *relaxations += relaxed;
    if (dist[g.sink] == kInf) throw SolveError("pricing graph sink is unreachable");
    return decode_path(g, pred, dist[g.sink]);
}

Heuristic compute_heuristic(const PricingGraph& g0) {
    const int nn = static_cast<int>(g0.nodes.size());
    std::vector<double> to_sink(nn, kInf);
    to_sink[g0.sink] = 0.0;
    for (int i = nn - 1; i >= 0; --i)
        for (int e = g0.out_begin[i]; e < g0.out_begin[i + 1]; ++e)
            to_sink[i] = std::min(to_sink[i], g0.edges[e].weight + to_sink[g0.edges[e].to]);

    int n = 0, d0 = 0;
    for (const PricingNode& node : g0.nodes) {
        n = std::max(n, node.u + 1);
        d0 = std::max(d0, node.d);
    }
    Heuristic h;
    h.h = Eigen::MatrixXd::Constant(n, d0 + 1, kInf);
    for (int i = 0; i < nn; ++i) {
        const PricingNode& node = g0.nodes[i];
        if (node.u >= 0) h.h(node.u, node.d) = to_sink[i];
    }
    return h;
}

LaRoute astar_price(const PricingGraph& g, const Heuristic& h, long long* expansions,
                    bool use_dominance) {
    const int nn = static_cast<int>(g.nodes.size());
    const auto node_h = [&](int i) -> double {
        const PricingNode& node = g.nodes[i];
        if (node.u < 0) return 0.0;
        return h.h(node.u, node.d);
    };

    std::vector<double> dist(nn, kInf);
    std::vector<int> pred(nn, -1);
    std::vector<char> closed(nn, 0);
    // Expanded (memory, capacity, offset-corrected cost) triples per customer,
    // for the skip rule. Comparing g + eta*d compares the real reduced cost
    // accumulated so far, since every path to capacity level d has absorbed
    // exactly eta*(d0 - d) of offset.
    int max_u = 0;
    for (const PricingNode& node : g.nodes) max_u = std::max(max_u, node.u + 1);
    std::vector<std::vector<std::tuple<std::uint32_t, int, double>>> expanded(max_u);

    using Entry = std::tuple<double, int, double>;  // f, node, g at push
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> open;
    dist[g.source] = 0.0;
    open.emplace(node_h(g.source), g.source, 0.0);
    long long expanded_count = 0;

    while (!open.empty()) {
        const int i = std::get<1>(open.top());
        const double gi = std::get<2>(open.top());
        open.pop();
        if (closed[i] || gi != dist[i]) continue;
        closed[i] = 1;
        if (i == g.sink) {
            if (expansions) *expansions += expanded_count;
            return decode_path(g, pred, dist[i]);
        }
        const PricingNode& node = g.nodes[i];
        if (use_dominance && node.u >= 0) {
            // A state is dominated when an expanded one at the same customer
            // remembers no more, has at least as much capacity left, and paid
            // no more to get there: any completion of the popped state is then
            // feasible for the expanded one at no greater total cost.
            const double paid = gi + g.eta * node.d;
            bool dominated = false;
            for (const auto& [mem1, d1, paid1] : expanded[node.u])
                if ((mem1 & node.mem) == mem1 && d1 >= node.d && paid1 <= paid) {
                    dominated = true;
                    break;
                }
            if (dominated) continue;
            expanded[node.u].emplace_back(node.mem, node.d, paid);
        }
        ++expanded_count;
        for (int e = g.out_begin[i]; e < g.out_begin[i + 1]; ++e) {
            const PricingEdge& edge = g.edges[e];
            if (closed[edge.to]) continue;
            const double cand = dist[i] + edge.weight;
            if (cand < dist[edge.to]) {
                dist[edge.to] = cand;
                pred[edge.to] = e;
                open.emplace(cand + node_h(edge.to), edge.to, cand);
            }
        }
    }
    throw SolveError("pricing graph sink is unreachable");
}

double route_reduced_cost(const std::vector<CustomerId>& visits, const DualSolution& duals,
                          const CutPool& pool) {
    const Instance& inst = pool.library().instance();
    checked_demand(visits, inst);
    double rc = inst.dist(kDepotSource, visits.front()) + duals.pi0;
    for (const LaArc* arc : decompose(visits, pool.library()))
        rc += arc_reduced_cost(static_cast<int>(arc - pool.library().arcs().data()), duals, pool);
    return rc;
}

namespace {

// Number of fresh (u, M1, d) states that remembering `added` at customer w
// would create: one per old subset of M_w and per capacity level the
// enlarged subset still leaves open.
long long new_state_count(const Instance& inst, const std::vector<CustomerId>& mem_w,
                          CustomerId w, CustomerId added) {
    const int d0 = inst.capacity();
    // counts[s] = subsets of the current memory with total demand s.
    std::vector<long long> counts(d0 + 1, 0);
    counts[0] = 1;
    for (CustomerId v : mem_w)
        for (int s = d0 - inst.demand(v); s >= 0; --s) counts[s + inst.demand(v)] += counts[s];
    long long total = 0;
    for (int s = 0; s + inst.demand(added) <= d0; ++s) {
        const int levels = d0 - s - inst.demand(added) - inst.demand(w) + 1;
        if (levels > 0) total += counts[s] * levels;
    }
    return total;
}

LaRoute elementarize(const std::vector<CustomerId>& visits, const DualSolution& duals,
                     const CutPool& pool) {
    std::vector<CustomerId> kept;
    std::vector<char> seen(pool.library().instance().num_customers(), 0);
    for (CustomerId u : visits) {
        if (seen[u]) continue;
        seen[u] = 1;
        kept.push_back(u);
    }
    LaRoute route;
    route.visits = kept;
    for (const LaArc* arc : decompose(kept, pool.library())) {
        route.arcs.push_back(static_cast<int>(arc - pool.library().arcs().data()));
        route.cost += arc->cost;
    }
    route.cost += pool.library().instance().dist(kDepotSource, kept.front());
    route.specials = special_indexes(kept, pool.library().la_neighbors());
    route.reduced_cost = route_reduced_cost(kept, duals, pool);
    return route;
}

}  // namespace

LaRoute dssr_solve(const CutPool& pool, const DualSolution& duals, const DssrConfig& config,
                   DssrStats* stats) {
    const ArcLibrary& lib = pool.library();
    const Instance& inst = lib.instance();
    const int n = inst.num_customers();
    MemorySets memory(n);

    Heuristic h;
    bool have_h = false;

    for (;;) {
        const PricingGraph g = build_pricing_graph(pool, memory, duals, config.use_astar);
        if (config.use_astar && !have_h) {
            // First iteration is the empty-memory graph the heuristic wants.
            h = compute_heuristic(g);
            have_h = true;
        }

        LaRoute route;
        if (config.cross_check && config.use_astar) {
            long long relaxed = 0, popped = 0;
            const LaRoute bf = bellman_ford_price(g, &relaxed);
            route = astar_price(g, h, &popped);
            if (stats) {
                stats->relaxations += relaxed;
                stats->expansions += popped;
                stats->max_disagreement = std::max(
                    stats->max_disagreement, std::abs(bf.reduced_cost - route.reduced_cost));
            }
        } else if (config.use_astar) {
            long long popped = 0;
            route = astar_price(g, h, &popped);
            if (stats) stats->expansions += popped;
        } else {
            long long relaxed = 0;
            route = bellman_ford_price(g, &relaxed);
            if (stats) stats->relaxations += relaxed;
        }

        if (stats) {
            ++stats->iterations;
            stats->last_relaxed_value = route.reduced_cost;
            stats->graph_nodes = static_cast<int>(g.nodes.size());
            stats->graph_edges = static_cast<int>(g.edges.size());
        }

        if (is_elementary(route.visits)) return route;

        if (config.early_exit) {
            LaRoute stripped = elementarize(route.visits, duals, pool);
            if (stripped.reduced_cost < -config.epsilon) return stripped;
        }

        // Pick the repeat whose memory additions create the fewest states.
        const std::vector<CustomerId>& visits = route.visits;
        long long best_growth = -1;
        int best_k1 = -1, best_k2 = -1;
        for (std::size_t k1 = 0; k1 < visits.size(); ++k1) {
            std::size_t k2 = k1 + 1;
            while (k2 < visits.size() && visits[k2] != visits[k1]) ++k2;
            if (k2 >= visits.size()) continue;
            std::vector<CustomerId> gaining;
            for (int k3 : route.specials) {
                if (k3 <= static_cast<int>(k1) || k3 >= static_cast<int>(k2)) continue;
                const CustomerId w = visits[k3];
                const auto& mem = memory[w];
                if (!std::binary_search(mem.begin(), mem.end(), visits[k1]))
                    gaining.push_back(w);
            }
            std::sort(gaining.begin(), gaining.end());
            gaining.erase(std::unique(gaining.begin(), gaining.end()), gaining.end());
            long long growth = 0;
            for (CustomerId w : gaining)
                growth += new_state_count(inst, memory[w], w, visits[k1]);
            const bool wins =
                best_k1 < 0 || growth < best_growth ||
                (growth == best_growth &&
                 (static_cast<int>(k2 - k1) < best_k2 - best_k1 ||
                  (static_cast<int>(k2 - k1) == best_k2 - best_k1 &&
                   static_cast<int>(k1) < best_k1)));
            if (wins) {
                best_growth = growth;
                best_k1 = static_cast<int>(k1);
                best_k2 = static_cast<int>(k2);
            }
        }
        if (best_k1 < 0)
            throw SolveError("non-elementary route without a repeated customer");

        const CustomerId repeater = visits[best_k1];
        bool grew = false;
        for (int k3 : route.specials) {
            if (k3 <= best_k1 || k3 >= best_k2) continue;
            auto& mem = memory[visits[k3]];
            const auto it = std::lower_bound(mem.begin(), mem.end(), repeater);
            if (it != mem.end() && *it == repeater) continue;
            mem.insert(it, repeater);
            grew = true;
            if (stats) ++stats->memory_additions;
        }
        if (!grew)
            throw SolveError("memory sets cannot eliminate the cheapest cycle");
    }
}

}  // namespace lacg
