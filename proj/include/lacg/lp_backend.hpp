#pragma once

#include <Eigen/Dense>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

#include "lacg/errors.hpp"

namespace lacg {

enum class RowSense { kLe, kGe, kEq };

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kTimeLimit, kIterLimit };

// A linear program in the form
//     min c'x   s.t.  a_i'x {<=,>=,=} b_i  for every row i,   x >= 0.
// Append-only: rows and columns may be added after a solver attached to the
// model has run; existing coefficients must never change. A coefficient may
// pair a new row with an old column or vice versa, but each (row, column)
// pair must be set at most once.
class LpModel {
public:
    int add_var(double cost, bool is_integer = false) {
        obj_.push_back(cost);
        integer_.push_back(is_integer);
        cols_.emplace_back();
        return static_cast<int>(obj_.size()) - 1;
    }

    int add_row(RowSense sense, double rhs) {
        sense_.push_back(sense);
        rhs_.push_back(rhs);
        return static_cast<int>(rhs_.size()) - 1;
    }

    void set_coeff(int row, int col, double value) {
        if (row < 0 || row >= num_rows() || col < 0 || col >= num_vars())
            throw ConfigError("lp model: coefficient references a missing row or column");
        cols_[col].emplace_back(row, value);
    }

    int num_vars() const { return static_cast<int>(obj_.size()); }
    int num_rows() const { return static_cast<int>(rhs_.size()); }
    double cost(int col) const { return obj_[col]; }
    bool is_integer(int col) const { return integer_[col]; }
    RowSense sense(int row) const { return sense_[row]; }
    double rhs(int row) const { return rhs_[row]; }
    const std::vector<std::pair<int, double>>& column(int col) const { return cols_[col]; }

private:
    std::vector<double> obj_;
    std::vector<char> integer_;
    std::vector<std::vector<std::pair<int, double>>> cols_;  // (row, value) per column
    std::vector<RowSense> sense_;
    std::vector<double> rhs_;
};

struct LpResult {
    LpStatus status = LpStatus::kOptimal;
    double objective = 0.0;
    Eigen::VectorXd x;      // structural variable values
    // One dual per row under the minimization convention: >= rows produce
    // duals >= 0, <= rows produce duals <= 0, = rows are unrestricted.
    Eigen::VectorXd duals;
    long long simplex_iterations = 0;
    bool hit_time_limit = false;
};

// Warm-started primal simplex bound to a live, append-only LpModel. resolve()
// first ingests whatever rows/columns were appended since the last call, then
// reoptimizes from the current basis.
class IncrementalLp {
public:
    virtual ~IncrementalLp() = default;
    virtual LpResult resolve() = 0;
    virtual std::vector<long long> basis() const = 0;      // stable variable ids
    virtual void set_basis(const std::vector<long long>& ids) = 0;
};

// Abstract LP/ILP backend. The built-in implementation is a dense revised
// simplex; anything matching this interface (an external solver wrapper, say)
// can replace it without touching the solver modules.
class LpBackend {
public:
    virtual ~LpBackend() = default;
    virtual LpResult solve_lp(const LpModel& model) = 0;
    virtual LpResult solve_ilp(const LpModel& model,
                               double time_limit_seconds =
                                   std::numeric_limits<double>::infinity()) = 0;
    virtual std::unique_ptr<IncrementalLp> attach(const LpModel* live_model) = 0;
};

class BuiltinSimplexBackend final : public LpBackend {
public:
    LpResult solve_lp(const LpModel& model) override;
    LpResult solve_ilp(const LpModel& model, double time_limit_seconds) override;
    std::unique_ptr<IncrementalLp> attach(const LpModel* live_model) override;
};

// One-shot conveniences over the built-in backend.
LpResult solve_lp(const LpModel& model);
LpResult solve_ilp(const LpModel& model,
                   double time_limit_seconds = std::numeric_limits<double>::infinity());

}  // namespace lacg
