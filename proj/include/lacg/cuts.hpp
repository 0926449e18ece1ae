#pragma once

#include <vector>

#include "lacg/duals.hpp"
#include "lacg/la_arcs.hpp"

namespace lacg {

// Subset-row cut over a customer set: at most floor(|members| / multiplier)
// route-equivalents may each serve `multiplier` members. Route coefficients
// are accumulated arc by arc (floor of the per-arc overlap), which keeps the
// cut a function of arcs at some loss of strength versus the classical
// route-level floor.
struct SubsetRowCut {
    std::vector<CustomerId> members;  // sorted ascending
    int multiplier = 2;
    int rhs() const { return static_cast<int>(members.size()) / multiplier; }
};

// Rounded-capacity cut: at least `rhs` routes must enter the member set,
// where rhs = ceil(demand(members) / capacity). An arc counts as an entry
// when it serves a member and its endpoint lies outside the set, so each
// stay inside the set is counted once, at its exit.
struct RciCut {
    std::vector<CustomerId> members;  // sorted ascending
    int rhs = 0;
};

// Per-arc cut coefficients.
int sri_arc_coeff(const SubsetRowCut& cut, const LaArc& arc);
int rci_arc_coeff(const RciCut& cut, const LaArc& arc);

// ceil of member demand over vehicle capacity.
int rci_bound(const Instance& inst, const std::vector<CustomerId>& members);

// Entry count of a depot-free visit sequence into the member set, counting
// every leg from outside (the depot included) to inside. Dominates the
// arc-based coefficient route by route; used as the reference in tests.
int rci_edge_coeff(const std::vector<CustomerId>& visits,
                   const std::vector<CustomerId>& members);

// Active cuts plus, per cut, the sparse vector of nonzero arc coefficients,
// computed once against the arc library when the cut is added.
class CutPool {
public:
    explicit CutPool(const ArcLibrary& lib) : lib_(&lib) {}

    const ArcLibrary& library() const { return *lib_; }

    int add(SubsetRowCut cut);
    int add(RciCut cut);

    const std::vector<SubsetRowCut>& sri() const { return sri_; }
    const std::vector<RciCut>& rci() const { return rci_; }

    // (arc index, coefficient) pairs, ascending by arc index.
    const std::vector<std::pair<int, int>>& sri_arc_entries(int cut) const {
        return sri_entries_[cut];
    }
    const std::vector<std::pair<int, int>>& rci_arc_entries(int cut) const {
        return rci_entries_[cut];
    }

    bool contains(const SubsetRowCut& cut) const;
    bool contains(const RciCut& cut) const;

private:
    const ArcLibrary* lib_;
    std::vector<SubsetRowCut> sri_;
    std::vector<RciCut> rci_;
    std::vector<std::vector<std::pair<int, int>>> sri_entries_;
    std::vector<std::vector<std::pair<int, int>>> rci_entries_;
};

// Reduced cost of one arc under the given duals:
//     cost - sum_{w in cover} pi(w) + sum_d sri(d) a*_d - sum_r rci(r) a_r.
// The route-level reduced cost is the sum over its arcs plus pi0 and the
// depot-to-first-customer hop.
double arc_reduced_cost(int arc_index, const DualSolution& duals, const CutPool& pool);

// All arc reduced costs at once; the per-cut sparse entries make this cheap
// enough to rerun on every dual change.
Eigen::VectorXd arc_reduced_costs(const DualSolution& duals, const CutPool& pool);

// One fractional column of the master solution, as a weight on the arcs of
// the route's decomposition.
struct FractionalRoute {
    double weight;
    std::vector<int> arcs;  // indexes into ArcLibrary::arcs()
};

// Candidate families for subset-row separation, named by the (size,
// multiplier) pairs enumerated around each customer's local area.
enum class SriOption {
    kNone,
    kA,  // (3, 2)
    kB,  // (3, 2) and (4, 3)
    kC,  // (3, 2), (5, 2) and (5, 3)
};

// Most violated subset-row cuts over candidate member sets drawn from
// {u} + N_u per customer u, excluding cuts already in the pool. Ordered by
// decreasing violation, at most max_cuts returned.
std::vector<SubsetRowCut> separate_sri(const CutPool& pool,
                                       const std::vector<FractionalRoute>& solution,
                                       SriOption option, int max_cuts, double min_violation);

// Most violated rounded-capacity cuts over all subsets of {u} + the k_rci
// nearest customers per u, plus the full customer set.
std::vector<RciCut> separate_rci(const CutPool& pool,
                                 const std::vector<FractionalRoute>& solution, int k_rci,
                                 int max_cuts, double min_violation);

}  // namespace lacg
