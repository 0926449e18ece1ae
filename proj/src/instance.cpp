#include "lacg/instance.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace lacg {

namespace {

double rounded(double d, DistanceRounding mode) {
    return mode == DistanceRounding::kNearestInteger ? std::floor(d + 0.5) : d;
}

// Uniform double in [0,1) from the top 53 bits; the stream of values is
// pinned by the standard's mt19937_64 definition, unlike the distribution
// adaptors in <random>.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

Instance::Instance(std::vector<double> xs,
                   std::vector<double> ys,
                   std::vector<int> demands,
                   double depot_x,
                   double depot_y,
                   int capacity,
                   int fleet_bound,
                   DistanceRounding rounding)
    : n_(static_cast<int>(xs.size())),
      capacity_(capacity),
      fleet_(fleet_bound > 0 ? fleet_bound : static_cast<int>(xs.size())),
      rounding_(rounding),
      xs_(std::move(xs)),
      ys_(std::move(ys)),
      demands_(std::move(demands)) {
    if (ys_.size() != xs_.size() || demands_.size() != xs_.size())
        throw ConfigError("instance: coordinate and demand arrays must have equal length");
    if (n_ < 1) throw ConfigError("instance: at least one customer required");
    if (capacity_ < 1) throw ConfigError("instance: capacity must be positive");
    for (int u = 0; u < n_; ++u) {
        if (demands_[u] < 1)
            throw ConfigError("instance: customer " + std::to_string(u) + " has demand < 1");
        if (demands_[u] > capacity_)
            throw ConfigError("instance: customer " + std::to_string(u) +
                              " has demand exceeding the capacity");
    }
    xs_.push_back(depot_x);
    ys_.push_back(depot_y);
    cost_.resize(n_ + 1, n_ + 1);
    for (int a = 0; a <= n_; ++a) {
        for (int b = 0; b <= n_; ++b) {
            const double d = std::hypot(xs_[a] - xs_[b], ys_[a] - ys_[b]);
            cost_(a, b) = a == b ? 0.0 : rounded(d, rounding_);
            max_dist_ = std::max(max_dist_, cost_(a, b));
        }
    }
}

nlohmann::ordered_json Instance::to_json() const {
    nlohmann::ordered_json j;
    j["capacity"] = capacity_;
    j["fleet_bound"] = fleet_;
    j["rounding"] =
        rounding_ == DistanceRounding::kNearestInteger ? "nearest-integer" : "exact-euclidean";
    j["depot"] = {{"x", xs_[n_]}, {"y", ys_[n_]}};
    auto customers = nlohmann::ordered_json::array();
    for (int u = 0; u < n_; ++u)
        customers.push_back({{"x", xs_[u]}, {"y", ys_[u]}, {"demand", demands_[u]}});
    j["customers"] = std::move(customers);
    return j;
}

Instance Instance::from_json(const nlohmann::json& j) {
    std::vector<double> xs, ys;
    std::vector<int> demands;
    for (const auto& c : j.at("customers")) {
        xs.push_back(c.at("x").get<double>());
        ys.push_back(c.at("y").get<double>());
        demands.push_back(c.at("demand").get<int>());
    }
    const std::string mode = j.at("rounding").get<std::string>();
    if (mode != "nearest-integer" && mode != "exact-euclidean")
        throw ParseError("instance json: unknown rounding mode '" + mode + "'");
    return Instance(std::move(xs), std::move(ys), std::move(demands),
                    j.at("depot").at("x").get<double>(), j.at("depot").at("y").get<double>(),
                    j.at("capacity").get<int>(), j.at("fleet_bound").get<int>(),
                    mode == "nearest-integer" ? DistanceRounding::kNearestInteger
                                              : DistanceRounding::kExactEuclidean);
}

std::uint64_t Instance::content_hash() const {
    const std::string dump = to_json().dump();
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    for (unsigned char c : dump) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

namespace {

struct Line {
    int number;
    std::string text;
};

[[noreturn]] void fail_at(const Line& line, const std::string& why) {
    throw ParseError("cvrplib line " + std::to_string(line.number) + ": " + why + " ('" +
                     line.text + "')");
}

}  // namespace

Instance parse_cvrplib(std::istream& in, DistanceRounding rounding) {
    int dimension = -1;
    int capacity = -1;
    bool euc2d = false;
    std::vector<double> xs, ys;
    std::vector<int> demands;
    std::vector<bool> seen_coord, seen_demand;
    int depot_node = -1;

    enum class Section { kNone, kCoords, kDemands, kDepot };
    Section section = Section::kNone;

    Line line{0, ""};
    std::string raw;
    while (std::getline(in, raw)) {
        ++line.number;
        line.text = raw;
        std::istringstream ss(raw);
        std::string head;
        if (!(ss >> head)) continue;  // blank line

        if (head == "EOF") break;
        if (head == "NAME" || head == "TYPE" || head == "COMMENT" || head == "NAME:" ||
            head == "TYPE:" || head == "COMMENT:") {
            continue;
        }
        auto keyword_value = [&](const char* kw) -> std::string {
            // Accepts "KW : v", "KW: v" and "KW v".
            std::string rest, tok;
            if (head == std::string(kw) + ":") {
                std::getline(ss, rest);
                return rest;
            }
            if (head != kw) return {};
            if (ss >> tok) {
                if (tok == ":") std::getline(ss, rest);
                else rest = tok;
            }
            return rest;
        };
        auto to_int = [&](const std::string& v, const char* what) {
            std::istringstream vs(v);
            int value;
            if (!(vs >> value)) fail_at(line, std::string("malformed ") + what);
            return value;
        };
        if (std::string v = keyword_value("DIMENSION"); !v.empty()) {
            dimension = to_int(v, "DIMENSION");
            if (dimension < 2) fail_at(line, "DIMENSION must be at least 2");
            xs.assign(dimension, 0.0);
            ys.assign(dimension, 0.0);
            demands.assign(dimension, -1);
            seen_coord.assign(dimension, false);
            seen_demand.assign(dimension, false);
            continue;
        }
        if (std::string v = keyword_value("CAPACITY"); !v.empty()) {
            capacity = to_int(v, "CAPACITY");
            continue;
        }
        if (std::string v = keyword_value("EDGE_WEIGHT_TYPE"); !v.empty()) {
            std::istringstream vs(v);
            std::string t;
            vs >> t;
            if (t != "EUC_2D") fail_at(line, "unsupported EDGE_WEIGHT_TYPE '" + t + "'");
            euc2d = true;
            continue;
        }
        if (head == "NODE_COORD_SECTION") { section = Section::kCoords; continue; }
        if (head == "DEMAND_SECTION") { section = Section::kDemands; continue; }
        if (head == "DEPOT_SECTION") { section = Section::kDepot; continue; }

        switch (section) {
            case Section::kCoords: {
                if (dimension < 0) fail_at(line, "NODE_COORD_SECTION before DIMENSION");
                int id;
                double cx, cy;
                std::istringstream es(raw);
                if (!(es >> id >> cx >> cy)) fail_at(line, "expected 'id x y'");
                if (id < 1 || id > dimension) fail_at(line, "node id out of range");
                if (seen_coord[id - 1]) fail_at(line, "duplicate coordinates for node");
                seen_coord[id - 1] = true;
                xs[id - 1] = cx;
                ys[id - 1] = cy;
                break;
            }
            case Section::kDemands: {
                if (dimension < 0) fail_at(line, "DEMAND_SECTION before DIMENSION");
                int id, d;
                std::istringstream es(raw);
                if (!(es >> id >> d)) fail_at(line, "expected 'id demand'");
                if (id < 1 || id > dimension) fail_at(line, "node id out of range");
                if (seen_demand[id - 1]) fail_at(line, "duplicate demand for node");
                seen_demand[id - 1] = true;
                demands[id - 1] = d;
                break;
            }
            case Section::kDepot: {
                std::istringstream es(raw);
                int id;
                if (!(es >> id)) fail_at(line, "expected a depot id or -1");
                if (id == -1) { section = Section::kNone; break; }
                if (id < 1 || id > dimension) fail_at(line, "depot id out of range");
                if (depot_node != -1 && depot_node != id - 1)
                    fail_at(line, "multiple depots are not supported");
                depot_node = id - 1;
                break;
            }
            case Section::kNone:
                fail_at(line, "unrecognized content outside any section");
        }
    }

    Line where{line.number, "<end of file>"};
    if (dimension < 0) fail_at(where, "missing DIMENSION");
    if (capacity < 0) fail_at(where, "missing CAPACITY");
    if (!euc2d) fail_at(where, "missing EDGE_WEIGHT_TYPE EUC_2D");
    for (int i = 0; i < dimension; ++i) {
        if (!seen_coord[i])
            fail_at(where, "missing coordinates for node " + std::to_string(i + 1));
        if (!seen_demand[i])
            fail_at(where, "missing demand for node " + std::to_string(i + 1));
    }
    if (depot_node == -1) {
        for (int i = 0; i < dimension; ++i)
            if (demands[i] == 0) {
                if (depot_node != -1) fail_at(where, "two zero-demand nodes and no DEPOT_SECTION");
                depot_node = i;
            }
        if (depot_node == -1) fail_at(where, "no DEPOT_SECTION and no zero-demand node");
    }

    std::vector<double> cxs, cys;
    std::vector<int> cdem;
    for (int i = 0; i < dimension; ++i) {
        if (i == depot_node) continue;
        cxs.push_back(xs[i]);
        cys.push_back(ys[i]);
        cdem.push_back(demands[i]);
    }
    return Instance(std::move(cxs), std::move(cys), std::move(cdem), xs[depot_node],
                    ys[depot_node], capacity, 0, rounding);
}

Instance parse_cvrplib_file(const std::string& path, DistanceRounding rounding) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open instance file '" + path + "'");
    return parse_cvrplib(in, rounding);
}

Instance generate_synthetic(int num_customers, int capacity, DemandMode mode,
                            std::uint64_t seed) {
    if (num_customers < 1) throw ConfigError("synthetic: need at least one customer");
    if (mode == DemandMode::kUniform1To10 && capacity < 10)
        throw ConfigError("synthetic: capacity must be at least 10 for uniform-1-to-10 demands");
    if (capacity < 1) throw ConfigError("synthetic: capacity must be positive");

    std::mt19937_64 rng(seed);
    const double depot_x = uniform01(rng);
    const double depot_y = uniform01(rng);
    std::vector<double> xs(num_customers), ys(num_customers);
    for (int u = 0; u < num_customers; ++u) {
        xs[u] = uniform01(rng);
        ys[u] = uniform01(rng);
    }
    std::vector<int> demands(num_customers, 1);
    if (mode == DemandMode::kUniform1To10)
        for (int u = 0; u < num_customers; ++u)
            demands[u] = 1 + static_cast<int>(rng() % 10);

    return Instance(std::move(xs), std::move(ys), std::move(demands), depot_x, depot_y,
                    capacity, 0, DistanceRounding::kExactEuclidean);
}

Instance apply_demand_divisor(const Instance& inst, int divisor) {
    if (divisor < 1) throw ConfigError("demand divisor must be a positive integer");
    std::vector<double> xs(inst.num_customers()), ys(inst.num_customers());
    std::vector<int> demands(inst.num_customers());
    for (int u = 0; u < inst.num_customers(); ++u) {
        xs[u] = inst.x(u);
        ys[u] = inst.y(u);
        demands[u] = (inst.demand(u) + divisor - 1) / divisor;
    }
    const int capacity = (inst.capacity() + divisor - 1) / divisor;
    return Instance(std::move(xs), std::move(ys), std::move(demands), inst.x(kDepotSource),
                    inst.y(kDepotSource), capacity, inst.fleet_bound(), inst.rounding());
}

}  // namespace lacg
