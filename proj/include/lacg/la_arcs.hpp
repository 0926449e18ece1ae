#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lacg/instance.hpp"

namespace lacg {

// One local-area arc: the vehicle is at `first`, serves the intermediate
// customers (a subset of first's local area) in the stored order, then moves
// to `last`, which is deliberately outside first's local area (or the sink).
// Among all orders of the same intermediate set only the cheapest survives,
// ties broken toward the lexicographically smallest order, so an arc is
// identified by (first, last, intermediate set).
struct LaArc {
    CustomerId first;
    int last;                       // customer id or kDepotSink
    std::uint32_t inter_mask;       // intermediate set, bit i = i-th neighbor of first
    std::vector<CustomerId> order;  // first followed by the intermediates as visited
    std::vector<CustomerId> cover;  // {first} + intermediates, ascending
    double cost;                    // travel cost from first up to and including the hop to last
    int demand;                     // total demand of cover (last excluded)
};

// Returns, per customer, its k nearest fellow customers (ties toward the
// lower id), each list sorted ascending by id.
std::vector<std::vector<CustomerId>> build_la_neighbors(const Instance& inst, int k);

// Exhaustive library of local-area arcs for one instance and one choice of
// local areas. Arcs are sorted by (first, last, demand, intermediate set)
// with the sink ordered after all customers, so per-pair ranges are
// contiguous and every lookup is deterministic.
class ArcLibrary {
public:
    ArcLibrary(const Instance& inst, int k);
    ArcLibrary(const Instance& inst, std::vector<std::vector<CustomerId>> la_neighbors);

    const Instance& instance() const { return *inst_; }
    int requested_k() const { return k_; }
    const std::vector<std::vector<CustomerId>>& la_neighbors() const { return neighbors_; }
    const std::vector<CustomerId>& neighbors(CustomerId u) const { return neighbors_[u]; }

    const std::vector<LaArc>& arcs() const { return arcs_; }

    // All arcs from `first` to `last` (customer id or kDepotSink), ordered by
    // (demand, intermediate set).
    std::span<const LaArc> from(CustomerId first, int last) const;

    // The unique arc with the given intermediate set, or nullptr when some
    // intermediate is outside first's local area or the set is over capacity.
    const LaArc* find(CustomerId first, int last,
                      const std::vector<CustomerId>& intermediates) const;

    void save(std::ostream& out) const;
    static std::optional<ArcLibrary> load(std::istream& in, const Instance& inst, int k);

private:
    ArcLibrary() = default;

    void enumerate();
    void build_ranges();
    int last_key(int last) const { return last == kDepotSink ? n_ : last; }

    const Instance* inst_ = nullptr;
    int n_ = 0;
    int k_ = 0;
    std::vector<std::vector<CustomerId>> neighbors_;
    std::vector<LaArc> arcs_;
    std::vector<std::pair<int, int>> ranges_;  // (begin, end) per first * (n_+1) + last_key
};

// Positions q1 < q2 < ... within a depot-free visit sequence at which a
// vehicle leaves the local area of the previous such position: q1 = 0, and
// each next q is the first visit outside the local area of customer
// visits[q_prev]. Every route decomposes into arcs between consecutive
// special positions.
std::vector<int> special_indexes(const std::vector<CustomerId>& visits,
                                 const std::vector<std::vector<CustomerId>>& la_neighbors);

// Splits a visit sequence into its arc decomposition. Throws SolveError when
// a segment matches no library arc (possible only for sequences outside the
// local-area route class).
std::vector<const LaArc*> decompose(const std::vector<CustomerId>& visits,
                                    const ArcLibrary& lib);

// Route-class membership tests over depot-free visit sequences.
bool is_elementary(const std::vector<CustomerId>& visits);

// True when no customer reappears within `gap` positions of a previous
// visit: gap 1 bans immediate repeats, gap 2 gives Q-routes, gap K+1 the
// K-cycle elimination class.
bool bans_repeats_within(const std::vector<CustomerId>& visits, int gap);

// True when every repeat pair (k1, k2) of the same customer has some
// intermediate visit w with visits[k1] outside memory_sets[w].
bool ng_feasible(const std::vector<CustomerId>& visits,
                 const std::vector<std::vector<CustomerId>>& memory_sets);

// As ng_feasible, but the escaping intermediate must sit at a special index
// (special positions always come from the local areas). The two-argument
// form uses the local areas as the memory sets too.
bool la_feasible(const std::vector<CustomerId>& visits,
                 const std::vector<std::vector<CustomerId>>& la_neighbors,
                 const std::vector<std::vector<CustomerId>>& memory_sets);
bool la_feasible(const std::vector<CustomerId>& visits,
                 const std::vector<std::vector<CustomerId>>& la_neighbors);

}  // namespace lacg
