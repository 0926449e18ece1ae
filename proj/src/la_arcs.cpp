#include "lacg/la_arcs.hpp"

#include <algorithm>
#include <bit>
#include <istream>
#include <limits>
#include <ostream>

namespace lacg {

namespace {

// Largest supported local area; the library is exhaustive over subsets, so
// size explodes as 2^k. Published experiments stay at or below 8.
constexpr int kMaxLocalArea = 8;

template <typename T>
void write_pod(std::ostream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
bool read_pod(std::istream& in, T& value) {
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    return static_cast<bool>(in);
}

constexpr std::uint64_t kCacheMagic = 0x314352414743414Cull;  // "LACGARC1"

}  // namespace

std::vector<std::vector<CustomerId>> build_la_neighbors(const Instance& inst, int k) {
    if (k < 0) throw ConfigError("neighborhood size must be non-negative");
    const int n = inst.num_customers();
    std::vector<std::vector<CustomerId>> neighbors(n);
    std::vector<CustomerId> others;
    for (CustomerId u = 0; u < n; ++u) {
        others.clear();
        for (CustomerId w = 0; w < n; ++w)
            if (w != u) others.push_back(w);
        std::sort(others.begin(), others.end(), [&](CustomerId a, CustomerId b) {
            const double da = inst.dist(u, a), db = inst.dist(u, b);
            return da < db || (da == db && a < b);
        });
        others.resize(std::min<std::size_t>(others.size(), k));
        std::sort(others.begin(), others.end());
        neighbors[u] = others;
    }
    return neighbors;
}

ArcLibrary::ArcLibrary(const Instance& inst, int k)
    : ArcLibrary(inst, build_la_neighbors(inst, k)) {
    k_ = k;
}

ArcLibrary::ArcLibrary(const Instance& inst, std::vector<std::vector<CustomerId>> la_neighbors)
    : inst_(&inst),
      n_(inst.num_customers()),
      k_(0),
      neighbors_(std::move(la_neighbors)) {
    if (static_cast<int>(neighbors_.size()) != n_)
        throw ConfigError("arc library: one local area per customer required");
    for (CustomerId u = 0; u < n_; ++u) {
        if (static_cast<int>(neighbors_[u].size()) > kMaxLocalArea)
            throw ConfigError("local areas larger than " + std::to_string(kMaxLocalArea) +
                              " are not supported");
        for (CustomerId w : neighbors_[u])
            if (w < 0 || w >= n_ || w == u)
                throw ConfigError("arc library: local area of customer " + std::to_string(u) +
                                  " contains an invalid id");
        if (!std::is_sorted(neighbors_[u].begin(), neighbors_[u].end()) ||
            std::adjacent_find(neighbors_[u].begin(), neighbors_[u].end()) !=
                neighbors_[u].end())
            throw ConfigError("arc library: local areas must be sorted sets");
        k_ = std::max(k_, static_cast<int>(neighbors_[u].size()));
    }
    enumerate();
}

void ArcLibrary::enumerate() {
    const Instance& inst = *inst_;
    const int d0 = inst.capacity();
    arcs_.clear();

    for (CustomerId u = 0; u < n_; ++u) {
        const auto& nb = neighbors_[u];
        const int size = static_cast<int>(nb.size());
        const std::uint32_t full = (1u << size) - 1;

        std::vector<int> set_demand(full + 1, 0);
        for (std::uint32_t mask = 1; mask <= full; ++mask) {
            const int low = std::countr_zero(mask);
            set_demand[mask] = set_demand[mask & (mask - 1)] + inst.demand(nb[low]);
        }

        // g[w * 2^size + mask]: cheapest path that starts at neighbor w,
        // serves mask (w excluded), then hops to the current target.
        std::vector<double> g(static_cast<std::size_t>(size) << size);

        for (int last = 0; last <= n_; ++last) {
            const int target = last == n_ ? kDepotSink : last;
            if (last < n_) {
                if (last == u) continue;
                if (std::binary_search(nb.begin(), nb.end(), last)) continue;
            }
            const int limit = d0 - (last < n_ ? inst.demand(last) : 0);
            if (inst.demand(u) > limit) continue;

            for (int w = 0; w < size; ++w) g[static_cast<std::size_t>(w) << size] =
                inst.dist(nb[w], target);
            for (std::uint32_t mask = 1; mask <= full; ++mask) {
                for (int w = 0; w < size; ++w) {
                    if (mask & (1u << w)) continue;
                    double best = std::numeric_limits<double>::infinity();
                    for (std::uint32_t rest = mask; rest;) {
                        const int w2 = std::countr_zero(rest);
                        rest &= rest - 1;
                        best = std::min(best,
                                        inst.dist(nb[w], nb[w2]) +
                                            g[(static_cast<std::size_t>(w2) << size) |
                                              (mask ^ (1u << w2))]);
                    }
                    g[(static_cast<std::size_t>(w) << size) | mask] = best;
                }
            }

            for (std::uint32_t mask = 0; mask <= full; ++mask) {
                const int demand = inst.demand(u) + set_demand[mask];
                if (demand > limit) continue;

                LaArc arc;
                arc.first = u;
                arc.last = target;
                arc.inter_mask = mask;
                arc.demand = demand;
                arc.order.push_back(u);
                double cost = 0.0;
                CustomerId cur = u;
                std::uint32_t rem = mask;
                while (rem) {
                    int pick = -1;
                    double best = std::numeric_limits<double>::infinity();
                    for (std::uint32_t rest = rem; rest;) {
                        const int w = std::countr_zero(rest);
                        rest &= rest - 1;
                        const double cand = inst.dist(cur, nb[w]) +
                                            g[(static_cast<std::size_t>(w) << size) |
                                              (rem ^ (1u << w))];
                        if (cand < best) {
                            best = cand;
                            pick = w;
                        }
                    }
                    cost += inst.dist(cur, nb[pick]);
                    cur = nb[pick];
                    arc.order.push_back(cur);
                    rem ^= 1u << pick;
                }
                cost += inst.dist(cur, target);
                arc.cost = cost;
                arc.cover = arc.order;
                std::sort(arc.cover.begin(), arc.cover.end());
                arcs_.push_back(std::move(arc));
            }
        }
    }

    std::sort(arcs_.begin(), arcs_.end(), [&](const LaArc& a, const LaArc& b) {
        if (a.first != b.first) return a.first < b.first;
        const int ka = last_key(a.last), kb = last_key(b.last);
        if (ka != kb) return ka < kb;
        if (a.demand != b.demand) return a.demand < b.demand;
        return a.inter_mask < b.inter_mask;
    });
    build_ranges();
}

void ArcLibrary::build_ranges() {
    ranges_.assign(static_cast<std::size_t>(n_) * (n_ + 1), {0, 0});
    for (int i = 0; i < static_cast<int>(arcs_.size());) {
        int j = i;
        const int key = arcs_[i].first * (n_ + 1) + last_key(arcs_[i].last);
        while (j < static_cast<int>(arcs_.size()) &&
               arcs_[j].first * (n_ + 1) + last_key(arcs_[j].last) == key)
            ++j;
        ranges_[key] = {i, j};
        i = j;
    }
}

std::span<const LaArc> ArcLibrary::from(CustomerId first, int last) const {
    const auto [begin, end] = ranges_[first * (n_ + 1) + last_key(last)];
    return {arcs_.data() + begin, arcs_.data() + end};
}

const LaArc* ArcLibrary::find(CustomerId first, int last,
                              const std::vector<CustomerId>& intermediates) const {
    const auto& nb = neighbors_[first];
    std::uint32_t mask = 0;
    int demand = inst_->demand(first);
    for (CustomerId w : intermediates) {
        const auto it = std::lower_bound(nb.begin(), nb.end(), w);
        if (it == nb.end() || *it != w) return nullptr;
        mask |= 1u << (it - nb.begin());
        demand += inst_->demand(w);
    }
    const auto span = from(first, last);
    const auto it = std::lower_bound(span.begin(), span.end(), std::pair{demand, mask},
                                     [](const LaArc& a, const std::pair<int, std::uint32_t>& key) {
                                         return a.demand != key.first ? a.demand < key.first
                                                                      : a.inter_mask < key.second;
                                     });
    if (it == span.end() || it->demand != demand || it->inter_mask != mask) return nullptr;
    return &*it;
}

void ArcLibrary::save(std::ostream& out) const {
    write_pod(out, kCacheMagic);
    write_pod(out, inst_->content_hash());
    write_pod(out, static_cast<std::int32_t>(k_));
    write_pod(out, static_cast<std::int32_t>(n_));
    for (const auto& nb : neighbors_) {
        write_pod(out, static_cast<std::int32_t>(nb.size()));
        for (CustomerId w : nb) write_pod(out, static_cast<std::int32_t>(w));
    }
    write_pod(out, static_cast<std::int64_t>(arcs_.size()));
    for (const LaArc& arc : arcs_) {
        write_pod(out, static_cast<std::int32_t>(arc.first));
        write_pod(out, static_cast<std::int32_t>(arc.last));
        write_pod(out, arc.inter_mask);
        write_pod(out, static_cast<std::int32_t>(arc.order.size()));
        for (CustomerId w : arc.order) write_pod(out, static_cast<std::int32_t>(w));
        write_pod(out, arc.cost);
        write_pod(out, static_cast<std::int32_t>(arc.demand));
    }
}

std::optional<ArcLibrary> ArcLibrary::load(std::istream& in, const Instance& inst, int k) {
    std::uint64_t magic = 0, hash = 0;
    std::int32_t stored_k = -1, n = -1;
    if (!read_pod(in, magic) || magic != kCacheMagic) return std::nullopt;
    if (!read_pod(in, hash) || hash != inst.content_hash()) return std::nullopt;
    if (!read_pod(in, stored_k) || stored_k != k) return std::nullopt;
    if (!read_pod(in, n) || n != inst.num_customers()) return std::nullopt;

    ArcLibrary lib;
    lib.inst_ = &inst;
    lib.n_ = n;
    lib.k_ = k;
    lib.neighbors_.resize(n);
    for (auto& nb : lib.neighbors_) {
        std::int32_t count = 0;
        if (!read_pod(in, count) || count < 0 || count > kMaxLocalArea) return std::nullopt;
        nb.resize(count);
        for (auto& w : nb) {
            std::int32_t id = 0;
            if (!read_pod(in, id)) return std::nullopt;
            w = id;
        }
    }
    std::int64_t arc_count = 0;
    if (!read_pod(in, arc_count) || arc_count < 0) return std::nullopt;
    lib.arcs_.resize(arc_count);
    for (LaArc& arc : lib.arcs_) {
        std::int32_t first = 0, last = 0, order_len = 0, demand = 0;
        if (!read_pod(in, first) || !read_pod(in, last) || !read_pod(in, arc.inter_mask) ||
            !read_pod(in, order_len) || order_len < 1)
            return std::nullopt;
        arc.first = first;
        arc.last = last;
        arc.order.resize(order_len);
        for (auto& w : arc.order) {
            std::int32_t id = 0;
            if (!read_pod(in, id)) return std::nullopt;
            w = id;
        }
        if (!read_pod(in, arc.cost) || !read_pod(in, demand)) return std::nullopt;
        arc.demand = demand;
        arc.cover = arc.order;
        std::sort(arc.cover.begin(), arc.cover.end());
    }

    lib.build_ranges();
    return lib;
}

std::vector<int> special_indexes(const std::vector<CustomerId>& visits,
                                 const std::vector<std::vector<CustomerId>>& la_neighbors) {
    std::vector<int> specials;
    int q = 0;
    const int len = static_cast<int>(visits.size());
    while (q < len) {
        specials.push_back(q);
        const auto& area = la_neighbors[visits[q]];
        int next = q + 1;
        while (next < len && std::binary_search(area.begin(), area.end(), visits[next])) ++next;
        q = next;
    }
    return specials;
}

std::vector<const LaArc*> decompose(const std::vector<CustomerId>& visits,
                                    const ArcLibrary& lib) {
    const std::vector<int> specials = special_indexes(visits, lib.la_neighbors());
    std::vector<const LaArc*> arcs;
    for (std::size_t j = 0; j < specials.size(); ++j) {
        const int begin = specials[j];
        const int end =
            j + 1 < specials.size() ? specials[j + 1] : static_cast<int>(visits.size());
        const int last = j + 1 < specials.size() ? visits[end] : kDepotSink;
        const std::vector<CustomerId> inters(visits.begin() + begin + 1, visits.begin() + end);
        const LaArc* arc = lib.find(visits[begin], last, inters);
        if (!arc)
            throw SolveError("route segment starting at customer " +
                             std::to_string(visits[begin]) + " matches no library arc");
        arcs.push_back(arc);
    }
    return arcs;
}

bool is_elementary(const std::vector<CustomerId>& visits) {
    std::vector<CustomerId> seen(visits);
    std::sort(seen.begin(), seen.end());
    return std::adjacent_find(seen.begin(), seen.end()) == seen.end();
}

bool bans_repeats_within(const std::vector<CustomerId>& visits, int gap) {
    for (std::size_t k1 = 0; k1 < visits.size(); ++k1)
        for (std::size_t k2 = k1 + 1; k2 < visits.size() && k2 <= k1 + gap; ++k2)
            if (visits[k1] == visits[k2]) return false;
    return true;
}

bool ng_feasible(const std::vector<CustomerId>& visits,
                 const std::vector<std::vector<CustomerId>>& memory_sets) {
    for (std::size_t k1 = 0; k1 < visits.size(); ++k1)
        for (std::size_t k2 = k1 + 1; k2 < visits.size(); ++k2) {
            if (visits[k1] != visits[k2]) continue;
            bool escapes = false;
            for (std::size_t k3 = k1 + 1; k3 < k2 && !escapes; ++k3) {
                const auto& mem = memory_sets[visits[k3]];
                escapes = !std::binary_search(mem.begin(), mem.end(), visits[k1]);
            }
            if (!escapes) return false;
        }
    return true;
}

bool la_feasible(const std::vector<CustomerId>& visits,
                 const std::vector<std::vector<CustomerId>>& la_neighbors,
                 const std::vector<std::vector<CustomerId>>& memory_sets) {
    const std::vector<int> specials = special_indexes(visits, la_neighbors);
    for (std::size_t k1 = 0; k1 < visits.size(); ++k1)
        for (std::size_t k2 = k1 + 1; k2 < visits.size(); ++k2) {
            if (visits[k1] != visits[k2]) continue;
            bool escapes = false;
            for (int k3 : specials) {
                if (k3 <= static_cast<int>(k1) || k3 >= static_cast<int>(k2)) continue;
                const auto& mem = memory_sets[visits[k3]];
                if (!std::binary_search(mem.begin(), mem.end(), visits[k1])) escapes = true;
            }
            if (!escapes) return false;
        }
    return true;
}

bool la_feasible(const std::vector<CustomerId>& visits,
                 const std::vector<std::vector<CustomerId>>& la_neighbors) {
    return la_feasible(visits, la_neighbors, la_neighbors);
}

}  // namespace lacg
