#include "lacg/cuts.hpp"

#include <algorithm>
#include <set>

namespace lacg {

namespace {

int overlap_count(const std::vector<CustomerId>& a, const std::vector<CustomerId>& b) {
    int count = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) ++ia;
        else if (*ib < *ia) ++ib;
        else {
            ++count;
            ++ia;
            ++ib;
        }
    }
    return count;
}

void validate_members(const std::vector<CustomerId>& members, int n) {
    if (members.empty()) throw ConfigError("cut: empty member set");
    if (!std::is_sorted(members.begin(), members.end()) ||
        std::adjacent_find(members.begin(), members.end()) != members.end())
        throw ConfigError("cut: members must be a sorted set");
    if (members.front() < 0 || members.back() >= n)
        throw ConfigError("cut: member id out of range");
}

}  // namespace

int sri_arc_coeff(const SubsetRowCut& cut, const LaArc& arc) {
    return overlap_count(cut.members, arc.cover) / cut.multiplier;
}

int rci_arc_coeff(const RciCut& cut, const LaArc& arc) {
    if (arc.last != kDepotSink &&
        std::binary_search(cut.members.begin(), cut.members.end(), arc.last))
        return 0;
    for (CustomerId w : arc.cover)
        if (std::binary_search(cut.members.begin(), cut.members.end(), w)) return 1;
    return 0;
}

int rci_bound(const Instance& inst, const std::vector<CustomerId>& members) {
    long long total = 0;
    for (CustomerId u : members) total += inst.demand(u);
    return static_cast<int>((total + inst.capacity() - 1) / inst.capacity());
}

int rci_edge_coeff(const std::vector<CustomerId>& visits,
                   const std::vector<CustomerId>& members) {
    int entries = 0;
    bool prev_inside = false;  // the route starts at the depot
    for (CustomerId u : visits) {
        const bool inside = std::binary_search(members.begin(), members.end(), u);
        if (inside && !prev_inside) ++entries;
        prev_inside = inside;
    }
    return entries;
}

int CutPool::add(SubsetRowCut cut) {
    validate_members(cut.members, lib_->instance().num_customers());
    if (cut.multiplier < 2) throw ConfigError("subset-row cut: multiplier must be at least 2");
    std::vector<std::pair<int, int>> entries;
    for (int i = 0; i < static_cast<int>(lib_->arcs().size()); ++i) {
        const int coeff = sri_arc_coeff(cut, lib_->arcs()[i]);
        if (coeff != 0) entries.emplace_back(i, coeff);
    }
    sri_.push_back(std::move(cut));
    sri_entries_.push_back(std::move(entries));
    return static_cast<int>(sri_.size()) - 1;
}

int CutPool::add(RciCut cut) {
    validate_members(cut.members, lib_->instance().num_customers());
    if (cut.rhs < 1) throw ConfigError("capacity cut: trivial right-hand side");
    std::vector<std::pair<int, int>> entries;
    for (int i = 0; i < static_cast<int>(lib_->arcs().size()); ++i) {
        const int coeff = rci_arc_coeff(cut, lib_->arcs()[i]);
        if (coeff != 0) entries.emplace_back(i, coeff);
    }
    rci_.push_back(std::move(cut));
    rci_entries_.push_back(std::move(entries));
    return static_cast<int>(rci_.size()) - 1;
}

bool CutPool::contains(const SubsetRowCut& cut) const {
    for (const SubsetRowCut& have : sri_)
        if (have.multiplier == cut.multiplier && have.members == cut.members) return true;
    return false;
}

bool CutPool::contains(const RciCut& cut) const {
    for (const RciCut& have : rci_)
        if (have.members == cut.members) return true;
    return false;
}

double arc_reduced_cost(int arc_index, const DualSolution& duals, const CutPool& pool) {
    const LaArc& arc = pool.library().arcs()[arc_index];
    double value = arc.cost;
    for (CustomerId w : arc.cover) value -= duals.pi(w);
    for (int d = 0; d < static_cast<int>(pool.sri().size()); ++d)
        value += duals.sri(d) * sri_arc_coeff(pool.sri()[d], arc);
    for (int r = 0; r < static_cast<int>(pool.rci().size()); ++r)
        value -= duals.rci(r) * rci_arc_coeff(pool.rci()[r], arc);
    return value;
}

Eigen::VectorXd arc_reduced_costs(const DualSolution& duals, const CutPool& pool) {
    const auto& arcs = pool.library().arcs();
    Eigen::VectorXd out(arcs.size());
    for (std::size_t i = 0; i < arcs.size(); ++i) {
        double value = arcs[i].cost;
        for (CustomerId w : arcs[i].cover) value -= duals.pi(w);
        out(i) = value;
    }
    for (int d = 0; d < static_cast<int>(pool.sri().size()); ++d) {
        if (duals.sri(d) == 0.0) continue;
        for (const auto& [arc, coeff] : pool.sri_arc_entries(d))
            out(arc) += duals.sri(d) * coeff;
    }
    for (int r = 0; r < static_cast<int>(pool.rci().size()); ++r) {
        if (duals.rci(r) == 0.0) continue;
        for (const auto& [arc, coeff] : pool.rci_arc_entries(r))
            out(arc) -= duals.rci(r) * coeff;
    }
    return out;
}

namespace {

// Size-`size` subsets of `base` (sorted), fed to `emit`.
template <typename F>
void for_combinations(const std::vector<CustomerId>& base, int size, F&& emit) {
    const int n = static_cast<int>(base.size());
    if (size > n) return;
    std::vector<int> idx(size);
    for (int i = 0; i < size; ++i) idx[i] = i;
    std::vector<CustomerId> members(size);
    while (true) {
        for (int i = 0; i < size; ++i) members[i] = base[idx[i]];
        emit(members);
        int i = size - 1;
        while (i >= 0 && idx[i] == n - size + i) --i;
        if (i < 0) return;
        ++idx[i];
        for (int j = i + 1; j < size; ++j) idx[j] = idx[j - 1] + 1;
    }
}

}  // namespace

std::vector<SubsetRowCut> separate_sri(const CutPool& pool,
                                       const std::vector<FractionalRoute>& solution,
                                       SriOption option, int max_cuts, double min_violation) {
    if (option == SriOption::kNone || solution.empty() || max_cuts < 1) return {};
    const ArcLibrary& lib = pool.library();
    const int n = lib.instance().num_customers();

    std::vector<std::pair<int, int>> families;  // (size, multiplier)
    switch (option) {
        case SriOption::kA: families = {{3, 2}}; break;
        case SriOption::kB: families = {{3, 2}, {4, 3}}; break;
        case SriOption::kC: families = {{3, 2}, {5, 2}, {5, 3}}; break;
        case SriOption::kNone: break;
    }

    std::set<std::pair<std::vector<CustomerId>, int>> candidates;
    for (CustomerId u = 0; u < n; ++u) {
        std::vector<CustomerId> base = lib.neighbors(u);
        base.push_back(u);
        std::sort(base.begin(), base.end());
        for (const auto& [size, multiplier] : families) {
            const int m = multiplier;
            for_combinations(base, size, [&](const std::vector<CustomerId>& members) {
                candidates.insert({members, m});
            });
        }
    }

    struct Scored {
        double violation;
        SubsetRowCut cut;
    };
    std::vector<Scored> violated;
    for (const auto& [members, multiplier] : candidates) {
        SubsetRowCut cut{members, multiplier};
        if (pool.contains(cut)) continue;
        double lhs = 0.0;
        for (const FractionalRoute& route : solution) {
            int coeff = 0;
            for (int arc : route.arcs) coeff += sri_arc_coeff(cut, lib.arcs()[arc]);
            lhs += route.weight * coeff;
        }
        const double violation = lhs - cut.rhs();
        if (violation > min_violation) violated.push_back({violation, std::move(cut)});
    }

    std::stable_sort(violated.begin(), violated.end(), [](const Scored& a, const Scored& b) {
        return a.violation > b.violation;
    });
    if (static_cast<int>(violated.size()) > max_cuts) violated.resize(max_cuts);
    std::vector<SubsetRowCut> out;
    out.reserve(violated.size());
    for (Scored& s : violated) out.push_back(std::move(s.cut));
    return out;
}

std::vector<RciCut> separate_rci(const CutPool& pool,
                                 const std::vector<FractionalRoute>& solution, int k_rci,
                                 int max_cuts, double min_violation) {
    if (k_rci < 0 || k_rci > 10)
        throw ConfigError("capacity-cut neighborhood size must be between 0 and 10");
    if (solution.empty() || max_cuts < 1) return {};
    const ArcLibrary& lib = pool.library();
    const Instance& inst = lib.instance();
    const int n = inst.num_customers();

    std::set<std::vector<CustomerId>> candidates;
    const auto vicinity = build_la_neighbors(inst, k_rci);
    for (CustomerId u = 0; u < n; ++u) {
        std::vector<CustomerId> base = vicinity[u];
        base.push_back(u);
        std::sort(base.begin(), base.end());
        for (std::uint32_t mask = 1; mask < (1u << base.size()); ++mask) {
            std::vector<CustomerId> members;
            for (std::size_t i = 0; i < base.size(); ++i)
                if (mask & (1u << i)) members.push_back(base[i]);
            candidates.insert(std::move(members));
        }
    }
    std::vector<CustomerId> everyone(n);
    for (int u = 0; u < n; ++u) everyone[u] = u;
    candidates.insert(std::move(everyone));

    struct Scored {
        double violation;
        RciCut cut;
    };
    std::vector<Scored> violated;
    std::vector<char> inside(n);
    for (const auto& members : candidates) {
        RciCut cut{members, 0};
        cut.rhs = rci_bound(inst, members);
        if (pool.contains(cut)) continue;
        std::fill(inside.begin(), inside.end(), 0);
        for (CustomerId u : members) inside[u] = 1;
        double lhs = 0.0;
        for (const FractionalRoute& route : solution) {
            int coeff = 0;
            for (int idx : route.arcs) {
                const LaArc& arc = lib.arcs()[idx];
                if (arc.last != kDepotSink && inside[arc.last]) continue;
                for (CustomerId w : arc.cover)
                    if (inside[w]) {
                        ++coeff;
                        break;
                    }
            }
            lhs += route.weight * coeff;
        }
        const double violation = cut.rhs - lhs;
        if (violation > min_violation) violated.push_back({violation, std::move(cut)});
    }

    std::stable_sort(violated.begin(), violated.end(), [](const Scored& a, const Scored& b) {
        return a.violation > b.violation;
    });
    if (static_cast<int>(violated.size()) > max_cuts) violated.resize(max_cuts);
    std::vector<RciCut> out;
    out.reserve(violated.size());
    for (Scored& s : violated) out.push_back(std::move(s.cut));
    return out;
}

}  // namespace lacg
