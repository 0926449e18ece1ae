#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "lacg/lp_backend.hpp"

using namespace lacg;

namespace {

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

TEST_CASE("one variable, one bound") {
    LpModel m;
    const int x = m.add_var(1.0);
    const int row = m.add_row(RowSense::kGe, 3.0);
    m.set_coeff(row, x, 1.0);

    const LpResult res = solve_lp(m);
    REQUIRE(res.status == LpStatus::kOptimal);
    CHECK(res.objective == doctest::Approx(3.0));
    CHECK(res.x(x) == doctest::Approx(3.0));
    CHECK(res.duals(row) == doctest::Approx(1.0));
}

TEST_CASE("conflicting bounds are infeasible") {
    LpModel m;
    const int x = m.add_var(1.0);
    const int le = m.add_row(RowSense::kLe, 1.0);
    const int ge = m.add_row(RowSense::kGe, 2.0);
    m.set_coeff(le, x, 1.0);
    m.set_coeff(ge, x, 1.0);
    CHECK(solve_lp(m).status == LpStatus::kInfeasible);
}

TEST_CASE("negative cost without a cap is unbounded") {
    LpModel m;
    const int x = m.add_var(-1.0);
    const int row = m.add_row(RowSense::kGe, 1.0);
    m.set_coeff(row, x, 1.0);
    CHECK(solve_lp(m).status == LpStatus::kUnbounded);
}

TEST_CASE("equality system") {
    LpModel m;
    const int x = m.add_var(1.0);
    const int y = m.add_var(1.0);
    const int sum = m.add_row(RowSense::kEq, 2.0);
    const int diff = m.add_row(RowSense::kEq, 0.0);
    m.set_coeff(sum, x, 1.0);
    m.set_coeff(sum, y, 1.0);
    m.set_coeff(diff, x, 1.0);
    m.set_coeff(diff, y, -1.0);

    const LpResult res = solve_lp(m);
    REQUIRE(res.status == LpStatus::kOptimal);
    CHECK(res.objective == doctest::Approx(2.0));
    CHECK(res.x(x) == doctest::Approx(1.0));
    CHECK(res.x(y) == doctest::Approx(1.0));
}

TEST_CASE("two-constraint maximization with dual signs") {
    // max 4x + 3y s.t. 2x + y <= 8, x + 2y <= 6, as a minimization.
    LpModel m;
    const int x = m.add_var(-4.0);
    const int y = m.add_var(-3.0);
    const int r0 = m.add_row(RowSense::kLe, 8.0);
    const int r1 = m.add_row(RowSense::kLe, 6.0);
    m.set_coeff(r0, x, 2.0);
    m.set_coeff(r0, y, 1.0);
    m.set_coeff(r1, x, 1.0);
    m.set_coeff(r1, y, 2.0);

    const LpResult res = solve_lp(m);
    REQUIRE(res.status == LpStatus::kOptimal);
    CHECK(res.objective == doctest::Approx(-52.0 / 3.0));
    CHECK(res.x(x) == doctest::Approx(10.0 / 3.0));
    CHECK(res.x(y) == doctest::Approx(4.0 / 3.0));
    CHECK(res.duals(r0) <= 1e-9);
    CHECK(res.duals(r1) <= 1e-9);
    // Strong duality: both rows are tight, so obj = 8 pi0 + 6 pi1.
    CHECK(8.0 * res.duals(r0) + 6.0 * res.duals(r1) == doctest::Approx(res.objective));
}

TEST_CASE("model guards reject dangling coefficients") {
    LpModel m;
    m.add_var(1.0);
    m.add_row(RowSense::kLe, 1.0);
    CHECK_THROWS_AS(m.set_coeff(1, 0, 1.0), ConfigError);
    CHECK_THROWS_AS(m.set_coeff(0, 1, 1.0), ConfigError);
}

TEST_CASE("random LPs satisfy optimality certificates") {
    int optimal_seen = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        std::mt19937_64 rng(seed);
        const int n = 8, rows = 5;
        LpModel m;
        for (int j = 0; j < n; ++j) m.add_var(1.0 + 2.0 * uniform01(rng));
        for (int i = 0; i < rows; ++i) {
            const double pick = uniform01(rng);
            const RowSense sense =
                pick < 0.4 ? RowSense::kGe : (pick < 0.8 ? RowSense::kLe : RowSense::kEq);
            m.add_row(sense, 5.0 * uniform01(rng));
            for (int j = 0; j < n; ++j)
                if (uniform01(rng) < 0.6) m.set_coeff(i, j, -2.0 + 4.0 * uniform01(rng));
        }

        const LpResult res = solve_lp(m);
        if (res.status != LpStatus::kOptimal) {
            CHECK(res.status == LpStatus::kInfeasible);  // costs > 0 rule out unbounded
            continue;
        }
        ++optimal_seen;

        // Primal feasibility.
        Eigen::VectorXd ax = Eigen::VectorXd::Zero(rows);
        for (int j = 0; j < n; ++j) {
            CHECK(res.x(j) >= -1e-7);
            for (const auto& [row, val] : m.column(j)) ax(row) += val * res.x(j);
        }
        for (int i = 0; i < rows; ++i) {
            const double slack = m.rhs(i) - ax(i);
            switch (m.sense(i)) {
                case RowSense::kLe: CHECK(slack >= -1e-7); break;
                case RowSense::kGe: CHECK(slack <= 1e-7); break;
                case RowSense::kEq: CHECK(std::abs(slack) <= 1e-7); break;
            }
            // Dual sign convention and complementary slackness.
            if (m.sense(i) == RowSense::kLe) CHECK(res.duals(i) <= 1e-7);
            if (m.sense(i) == RowSense::kGe) CHECK(res.duals(i) >= -1e-7);
            CHECK(std::abs(res.duals(i) * slack) <= 1e-5);
        }
        // Dual feasibility: no structural column prices out negative.
        for (int j = 0; j < n; ++j) {
            double reduced = m.cost(j);
            for (const auto& [row, val] : m.column(j)) reduced -= res.duals(row) * val;
            CHECK(reduced >= -1e-7);
            CHECK(std::abs(reduced * res.x(j)) <= 1e-5);  // and prices out basic columns
        }
        // Strong duality.
        double dual_obj = 0.0;
        for (int i = 0; i < rows; ++i) dual_obj += res.duals(i) * m.rhs(i);
        CHECK(dual_obj == doctest::Approx(res.objective).epsilon(1e-6));
    }
    CHECK(optimal_seen >= 20);
}

TEST_CASE("incremental resolve tracks appended columns and rows") {
    LpModel m;
    const int a = m.add_var(10.0);
    const int b = m.add_var(10.0);
    const int cover1 = m.add_row(RowSense::kGe, 1.0);
    const int cover2 = m.add_row(RowSense::kGe, 1.0);
    m.set_coeff(cover1, a, 1.0);
    m.set_coeff(cover2, b, 1.0);

    BuiltinSimplexBackend backend;
    auto lp = backend.attach(&m);
    LpResult res = lp->resolve();
    REQUIRE(res.status == LpStatus::kOptimal);
    CHECK(res.objective == doctest::Approx(20.0));

    // A cheaper column covering both rows displaces the first two.
    const int both = m.add_var(12.0);
    m.set_coeff(cover1, both, 1.0);
    m.set_coeff(cover2, both, 1.0);
    res = lp->resolve();
    REQUIRE(res.status == LpStatus::kOptimal);
    CHECK(res.objective == doctest::Approx(12.0));
    CHECK(res.x(both) == doctest::Approx(1.0));

    // Capping that column forces half of each original column back in.
    const int cap = m.add_row(RowSense::kLe, 0.5);
    m.set_coeff(cap, both, 1.0);
    res = lp->resolve();
    REQUIRE(res.status == LpStatus::kOptimal);
    CHECK(res.objective == doctest::Approx(16.0));
    CHECK(res.duals.size() == 3);

    // A restriction can only hurt a minimization.
    CHECK(res.objective >= 12.0 - 1e-9);
}

TEST_CASE("incremental resolve matches fresh solves on growing models") {
    std::mt19937_64 rng(99);
    LpModel m;
    const int n = 8;
    for (int j = 0; j < n; ++j) m.add_var(1.0 + uniform01(rng));
    const int base = m.add_row(RowSense::kGe, 4.0);
    for (int j = 0; j < n; ++j) m.set_coeff(base, j, 1.0);

    BuiltinSimplexBackend backend;
    auto lp = backend.attach(&m);
    for (int step = 0; step < 12; ++step) {
        if (step % 3 == 2) {
            const int col = m.add_var(0.5 + uniform01(rng));
            m.set_coeff(base, col, 1.0);
            for (int i = 1; i < m.num_rows(); ++i)
                if (uniform01(rng) < 0.5) m.set_coeff(i, col, uniform01(rng));
        } else {
            const int row = m.add_row(step % 3 == 0 ? RowSense::kLe : RowSense::kGe,
                                      step % 3 == 0 ? 2.0 + uniform01(rng) : uniform01(rng));
            for (int j = 0; j < m.num_vars(); ++j)
                if (uniform01(rng) < 0.5) m.set_coeff(row, j, uniform01(rng) * 2.0);
        }
        const LpResult warm = lp->resolve();
        const LpResult fresh = solve_lp(m);
        REQUIRE(warm.status == fresh.status);
        if (warm.status != LpStatus::kOptimal) break;
        CHECK(warm.objective == doctest::Approx(fresh.objective).epsilon(1e-7));
    }
}

TEST_CASE("branch and bound solves a knapsack against enumeration") {
    std::mt19937_64 rng(5);
    const int n = 12;
    std::vector<double> value(n), weight(n);
    for (int j = 0; j < n; ++j) {
        value[j] = 1.0 + 9.0 * uniform01(rng);
        weight[j] = 1.0 + 4.0 * uniform01(rng);
    }
    const double budget = 12.0;

    LpModel m;
    for (int j = 0; j < n; ++j) m.add_var(-value[j], true);
    const int cap = m.add_row(RowSense::kLe, budget);
    for (int j = 0; j < n; ++j) {
        m.set_coeff(cap, j, weight[j]);
        const int ub = m.add_row(RowSense::kLe, 1.0);
        m.set_coeff(ub, j, 1.0);
    }

    double best = 0.0;
    for (int mask = 0; mask < (1 << n); ++mask) {
        double v = 0.0, w = 0.0;
        for (int j = 0; j < n; ++j)
            if (mask & (1 << j)) {
                v += value[j];
                w += weight[j];
            }
        if (w <= budget) best = std::max(best, v);
    }

    const LpResult relax = solve_lp(m);
    const LpResult res = solve_ilp(m);
    REQUIRE(res.status == LpStatus::kOptimal);
    CHECK(res.objective == doctest::Approx(-best).epsilon(1e-9));
    CHECK(res.objective >= relax.objective - 1e-9);  // restriction of the relaxation
    for (int j = 0; j < n; ++j) {
        const double frac = res.x(j) - std::floor(res.x(j));
        CHECK(std::min(frac, 1.0 - frac) <= 1e-6);
    }
    CHECK(res.duals.size() == m.num_rows());
}

TEST_CASE("branch and bound needs no nodes on an integral relaxation") {
    LpModel m;
    const int x = m.add_var(1.0, true);
    const int y = m.add_var(2.0, true);
    const int row = m.add_row(RowSense::kEq, 1.0);
    m.set_coeff(row, x, 1.0);
    m.set_coeff(row, y, 1.0);

    const LpResult lp = solve_lp(m);
    const LpResult ilp = solve_ilp(m);
    REQUIRE(ilp.status == LpStatus::kOptimal);
    CHECK(ilp.objective == doctest::Approx(1.0));
    CHECK(ilp.objective == doctest::Approx(lp.objective));
}

TEST_CASE("branch and bound branches past a fractional relaxation") {
    // max x + y s.t. 2x + 2y <= 3 over integers: LP gives 1.5, ILP gives 1.
    LpModel m;
    const int x = m.add_var(-1.0, true);
    const int y = m.add_var(-1.0, true);
    const int row = m.add_row(RowSense::kLe, 3.0);
    m.set_coeff(row, x, 2.0);
    m.set_coeff(row, y, 2.0);

    CHECK(solve_lp(m).objective == doctest::Approx(-1.5));
    const LpResult res = solve_ilp(m);
    REQUIRE(res.status == LpStatus::kOptimal);
    CHECK(res.objective == doctest::Approx(-1.0));
}

TEST_CASE("a zero time limit reports a timeout") {
    LpModel m;
    const int x = m.add_var(-1.0, true);
    const int row = m.add_row(RowSense::kLe, 1.5);
    m.set_coeff(row, x, 1.0);
    const LpResult res = solve_ilp(m, 0.0);
    CHECK(res.status == LpStatus::kTimeLimit);
    CHECK(res.hit_time_limit);
}
