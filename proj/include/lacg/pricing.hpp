#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "lacg/cuts.hpp"

namespace lacg {

// Per-customer ng memory, sorted ascending; grown by DSSR, reset per pricing
// call. Indexed by customer id.
using MemorySets = std::vector<std::vector<CustomerId>>;

struct RouteClasses {
    bool elementary = false;
    bool la = false;
    bool ng = false;
    bool kq = false;
};

// Membership of a depot-free visit sequence in the route classes: repeats
// banned outright (elementary), banned within K+1 positions (kq), banned
// unless some intermediate forgets the repeater (ng), or banned unless that
// intermediate sits at a special index (la). Throws SolveError when the
// sequence is empty or over capacity.
RouteClasses classify_route(const std::vector<CustomerId>& visits, const Instance& inst,
                            const std::vector<std::vector<CustomerId>>& la_neighbors,
                            const MemorySets& memory, int K);

// A node of the pricing graph: the vehicle sits at u with d units of capacity
// left (u not yet served) remembering the subset `mem` of memory[u], encoded
// as a bitmask over that sorted list. Source is (kDepotSource, 0, d0), sink
// (kDepotSink, 0, 0).
struct PricingNode {
    CustomerId u;
    std::uint32_t mem;
    int d;
};

// arc == -1 on edges out of the source; otherwise an index into the library.
struct PricingEdge {
    int from;
    int to;
    int arc;
    double weight;
};

// Acyclic shortest-path graph over (customer, memory, remaining-capacity)
// states. Nodes are stored in topological order: source, then customer nodes
// by decreasing capacity, then the sink. In the plain form edge weights are
// raw reduced costs and the route's total demand is chosen on the source
// edge. In the dominance form the source pins full capacity, every node
// gains a direct sink edge over its cheapest feasible closing arc, and all
// weights carry the eta offset that makes them non-negative, raising every
// source-to-sink path by exactly eta * capacity.
struct PricingGraph {
    const ArcLibrary* lib = nullptr;
    bool dominance_form = false;
    double eta = 0.0;
    int source = 0;
    int sink = 0;
    std::vector<PricingNode> nodes;
    std::vector<PricingEdge> edges;   // grouped by `from`, targets ascending
    std::vector<int> out_begin;       // size nodes+1; edge range per node

    // -1 when no such node exists.
    int node_index(CustomerId u, std::uint32_t mem, int d) const;
    std::vector<std::pair<std::uint64_t, int>> key_index;  // sorted (packed key, node)
};

// Smallest per-demand-unit shift making every arc's reduced cost
// non-negative after adding shift * demand.
double compute_eta(const DualSolution& duals, const CutPool& pool);

PricingGraph build_pricing_graph(const CutPool& pool, const MemorySets& memory,
                                 const DualSolution& duals, bool dominance_form);

void dump_dot(const PricingGraph& g, std::ostream& out);

// A priced route: the arc chain, its raw travel cost, and its reduced cost
// under the duals the graph was built with (offsets removed).
struct LaRoute {
    std::vector<CustomerId> visits;
    std::vector<int> arcs;
    std::vector<int> specials;
    double cost = 0.0;
    double reduced_cost = 0.0;
};

// Exact shortest path by a single dynamic-programming sweep in topological
// order; handles negative weights. Ties prefer fewer edges, then the earlier
// predecessor. `relaxations` (if given) accumulates the edge-relaxation
// count. Throws SolveError if the sink is unreachable.
LaRoute bellman_ford_price(const PricingGraph& g, long long* relaxations = nullptr);

// Exact distance-to-sink for every (customer, capacity) state of the initial
// empty-memory dominance graph; a consistent lower bound for any later DSSR
// iteration. h(u, d) is +infinity below the customer's own demand.
struct Heuristic {
    Eigen::MatrixXd h;  // num_customers x (capacity+1)
};

Heuristic compute_heuristic(const PricingGraph& g0);

// A* on the offset dominance-form graph. Skips expanding a node when an
// already-expanded node at the same customer remembers no more, has at least
// as much capacity, and accumulated no more cost; `use_dominance = false`
// turns the skip off. `expansions` (if given) accumulates the number of
// nodes expanded.
LaRoute astar_price(const PricingGraph& g, const Heuristic& h,
                    long long* expansions = nullptr, bool use_dominance = true);

// Reduced cost of an arbitrary visit sequence under the current duals,
// through its arc decomposition (includes the fleet dual and the hop from
// the depot).
double route_reduced_cost(const std::vector<CustomerId>& visits, const DualSolution& duals,
                          const CutPool& pool);

struct DssrConfig {
    double epsilon = 1e-6;   // reduced costs above -epsilon count as zero
    bool early_exit = true;  // return the stripped route once it prices negative
    bool use_astar = true;   // false: plain topological sweeps only
    bool cross_check = false;  // run both solvers each iteration and compare
};

struct DssrStats {
    int iterations = 0;
    int memory_additions = 0;
    long long relaxations = 0;
    long long expansions = 0;
    double last_relaxed_value = 0.0;  // graph optimum of the final iteration
    double max_disagreement = 0.0;    // only written when cross-checking
    int graph_nodes = 0;              // of the final iteration
    int graph_edges = 0;
};

// Decremental state-space relaxation: price over the current memory sets,
// and while the best route repeats a customer, remember that customer at the
// special positions inside the cheapest-to-encode cycle and re-price. Always
// returns an elementary route; its reduced cost is non-negative exactly when
// no improving column exists.
LaRoute dssr_solve(const CutPool& pool, const DualSolution& duals,
                   const DssrConfig& config = {}, DssrStats* stats = nullptr);

}  // namespace lacg
