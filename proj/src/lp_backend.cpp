#include "lacg/lp_backend.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <unordered_map>

namespace lacg {

namespace {

// Stable working-variable ids: structural columns keep their model index;
// each row i owns up to three implicit unit columns (slack or surplus at
// +3i+0, a +1 artificial at +3i+1, a -1 artificial at +3i+2).
constexpr long long kLogicalBase = 1ll << 40;

constexpr double kTolReducedCost = 1e-9;
constexpr double kTolPivot = 1e-9;
constexpr double kTolFeas = 1e-7;
constexpr int kRefactorInterval = 256;

enum class VarKind { kStructural, kSlack, kSurplus, kArtPlus, kArtMinus };

struct WorkingVar {
    VarKind kind;
    int index;  // structural column or row index
};

WorkingVar classify(long long id, const LpModel& model) {
    if (id < kLogicalBase) return {VarKind::kStructural, static_cast<int>(id)};
    const long long rel = id - kLogicalBase;
    const int row = static_cast<int>(rel / 3);
    switch (rel % 3) {
        case 0:
            return {model.sense(row) == RowSense::kGe ? VarKind::kSurplus : VarKind::kSlack, row};
        case 1: return {VarKind::kArtPlus, row};
        default: return {VarKind::kArtMinus, row};
    }
}

bool is_artificial(long long id) { return id >= kLogicalBase && (id - kLogicalBase) % 3 != 0; }

// Dense revised primal simplex over a live append-only LpModel, with an
// explicit basis inverse that is product-form-updated per pivot and
// refactorized periodically through an LU decomposition.
class Simplex final : public IncrementalLp {
public:
    explicit Simplex(const LpModel* model) : model_(model) {}

    LpResult resolve() override { return solve(std::numeric_limits<double>::infinity()); }

    LpResult solve(double deadline_seconds);

    std::vector<long long> basis() const override { return basis_; }

    void set_basis(const std::vector<long long>& ids) override {
        pending_basis_ = ids;
        has_pending_basis_ = true;
    }

    // Structural solution to seed the residual rule when the pending basis
    // does not cover every row (used by branch-and-bound children).
    void set_warm_point(Eigen::VectorXd x) { warm_point_ = std::move(x); }

private:
    int n() const { return model_->num_vars(); }

    double phase_cost(long long id, int phase) const {
        const WorkingVar v = classify(id, *model_);
        if (phase == 1) return is_artificial(id) ? 1.0 : 0.0;
        return v.kind == VarKind::kStructural ? model_->cost(v.index) : 0.0;
    }

    // Applies a working column to an accumulator: acc += scale * column(id).
    template <typename F>
    void for_column(long long id, F&& f) const {
        const WorkingVar v = classify(id, *model_);
        switch (v.kind) {
            case VarKind::kStructural:
                for (const auto& [row, val] : model_->column(v.index)) f(row, val);
                break;
            case VarKind::kSlack:
            case VarKind::kArtPlus: f(v.index, 1.0); break;
            case VarKind::kSurplus:
            case VarKind::kArtMinus: f(v.index, -1.0); break;
        }
    }

    double dot_column(const Eigen::VectorXd& y, long long id) const {
        double acc = 0.0;
        for_column(id, [&](int row, double val) { acc += y(row) * val; });
        return acc;
    }

    Eigen::VectorXd ftran(long long id) const {
        Eigen::VectorXd w = Eigen::VectorXd::Zero(m_);
        for_column(id, [&](int row, double val) { w += val * binv_.col(row); });
        return w;
    }

    // Picks the basis-feasible implicit column for a row given its residual.
    long long feasible_logical(int row, double residual) const {
        const long long base = kLogicalBase + 3ll * row;
        switch (model_->sense(row)) {
            case RowSense::kLe: return residual >= 0 ? base : base + 2;
            case RowSense::kGe: return residual <= 0 ? base : base + 1;
            case RowSense::kEq: return residual >= 0 ? base + 1 : base + 2;
        }
        return base + 1;
    }

    void cold_start();
    void sync();
    bool refactor();  // false when the basis is singular
    void pivot(int leaving_pos, long long entering, const Eigen::VectorXd& w, double theta);
    LpResult run_phases(double deadline_seconds);
    void drive_out_artificials();
    Eigen::VectorXd structural_solution() const;

    const LpModel* model_;
    int m_ = 0;  // rows currently synced
    std::vector<long long> basis_;
    std::unordered_map<long long, int> basis_pos_;
    Eigen::MatrixXd binv_;
    Eigen::VectorXd xb_;
    Eigen::VectorXd b_;
    int pivots_since_refactor_ = 0;
    long long iterations_ = 0;
    bool state_valid_ = false;
    std::vector<long long> pending_basis_;
    bool has_pending_basis_ = false;
    Eigen::VectorXd warm_point_;
};

void Simplex::cold_start() {
    m_ = model_->num_rows();
    b_.resize(m_);
    for (int i = 0; i < m_; ++i) b_(i) = model_->rhs(i);
    basis_.resize(m_);
    basis_pos_.clear();
    binv_ = Eigen::MatrixXd::Zero(m_, m_);
    xb_.resize(m_);
    for (int i = 0; i < m_; ++i) {
        basis_[i] = feasible_logical(i, b_(i));
        basis_pos_[basis_[i]] = i;
        const double sign = classify(basis_[i], *model_).kind == VarKind::kSlack ||
                                    classify(basis_[i], *model_).kind == VarKind::kArtPlus
                                ? 1.0
                                : -1.0;
        binv_(i, i) = sign;
        xb_(i) = std::abs(b_(i));
    }
    pivots_since_refactor_ = 0;
    state_valid_ = true;
}

// Ingests rows/columns appended since the last solve. New columns enter
// nonbasic at zero and need no bookkeeping; each new row extends the basis
// with whichever of its implicit columns is feasible at the current point,
// exploiting that those columns are empty on old rows (block triangularity).
void Simplex::sync() {
    const int new_m = model_->num_rows();
    if (!state_valid_) {
        cold_start();
        return;
    }
    if (new_m == m_) return;

    const Eigen::VectorXd x = structural_solution();
    Eigen::VectorXd residual(new_m - m_);
    for (int i = m_; i < new_m; ++i) residual(i - m_) = model_->rhs(i);
    for (int j = 0; j < n(); ++j) {
        if (j >= x.size() || x(j) == 0.0) continue;
        for (const auto& [row, val] : model_->column(j))
            if (row >= m_) residual(row - m_) -= val * x(j);
    }

    const int old_m = m_;
    Eigen::MatrixXd old_binv = std::move(binv_);
    binv_ = Eigen::MatrixXd::Zero(new_m, new_m);
    binv_.topLeftCorner(old_m, old_m) = old_binv;

    b_.conservativeResize(new_m);
    xb_.conservativeResize(new_m);
    for (int i = m_; i < new_m; ++i) b_(i) = model_->rhs(i);

    for (int i = old_m; i < new_m; ++i) {
        const double r = residual(i - old_m);
        const long long id = feasible_logical(i, r);
        basis_.push_back(id);
        basis_pos_[id] = i;
        const VarKind kind = classify(id, *model_).kind;
        const double sign = (kind == VarKind::kSlack || kind == VarKind::kArtPlus) ? 1.0 : -1.0;
        // New basis column is sign * e_i; old basis columns may hit new rows.
        // Block inverse: bottom-left = -sign * (new-row coefficients of old
        // basis columns) * old_binv, bottom-right diagonal = sign.
        binv_(i, i) = sign;
        xb_(i) = std::abs(r);
    }
    for (int k = 0; k < old_m; ++k) {
        const WorkingVar v = classify(basis_[k], *model_);
        if (v.kind != VarKind::kStructural) continue;  // logicals never touch later rows
        for (const auto& [row, val] : model_->column(v.index)) {
            if (row < old_m) continue;
            const double sign = binv_(row, row);
            binv_.row(row).head(old_m) -= sign * val * old_binv.row(k);
        }
    }
    m_ = new_m;
    pivots_since_refactor_ = 0;
}

bool Simplex::refactor() {
    Eigen::MatrixXd basis_matrix = Eigen::MatrixXd::Zero(m_, m_);
    for (int k = 0; k < m_; ++k) {
        const int col = k;
        for_column(basis_[k], [&](int row, double val) { basis_matrix(row, col) = val; });
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis_matrix);
    const Eigen::VectorXd diag = lu.matrixLU().diagonal().cwiseAbs();
    if (m_ > 0 && diag.minCoeff() < 1e-13 * std::max(1.0, diag.maxCoeff())) return false;
    binv_ = lu.inverse();
    xb_ = binv_ * b_;
    for (int i = 0; i < m_; ++i)
        if (xb_(i) < 0 && xb_(i) > -1e-11) xb_(i) = 0.0;
    pivots_since_refactor_ = 0;
    return true;
}

void Simplex::pivot(int r, long long entering, const Eigen::VectorXd& w, double theta) {
    basis_pos_.erase(basis_[r]);
    basis_[r] = entering;
    basis_pos_[entering] = r;
    xb_ -= theta * w;
    xb_(r) = theta;
    for (int i = 0; i < m_; ++i)
        if (xb_(i) < 0 && xb_(i) > -1e-11) xb_(i) = 0.0;
    Eigen::VectorXd u = w;
    u(r) -= 1.0;
    u /= w(r);
    const Eigen::RowVectorXd row_r = binv_.row(r);
    binv_.noalias() -= u * row_r;
    ++pivots_since_refactor_;
    ++iterations_;
}

Eigen::VectorXd Simplex::structural_solution() const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n());
    for (int k = 0; k < m_; ++k) {
        const WorkingVar v = classify(basis_[k], *model_);
        if (v.kind == VarKind::kStructural) x(v.index) = xb_(k);
    }
    return x;
}

// Pivots zero-valued basic artificials out on any usable pivot element so
// phase 2 starts with a clean basis; rows without one are dependent and keep
// a pinned artificial.
void Simplex::drive_out_artificials() {
    for (int r = 0; r < m_; ++r) {
        if (!is_artificial(basis_[r]) || xb_(r) > kTolPivot) continue;
        long long replacement = -1;
        for (long long j = 0; j < n() && replacement < 0; ++j) {
            if (basis_pos_.count(j)) continue;
            double w_r = 0.0;
            for_column(j, [&](int row, double val) { w_r += binv_(r, row) * val; });
            if (std::abs(w_r) > 1e-7) replacement = j;
        }
        for (int i = 0; i < m_ && replacement < 0; ++i) {
            const long long id = kLogicalBase + 3ll * i;
            if (model_->sense(i) == RowSense::kEq || basis_pos_.count(id)) continue;
            double w_r = 0.0;
            for_column(id, [&](int row, double val) { w_r += binv_(r, row) * val; });
            if (std::abs(w_r) > 1e-7) replacement = id;
        }
        if (replacement < 0) continue;
        Eigen::VectorXd w = ftran(replacement);
        pivot(r, replacement, w, 0.0);
    }
}

LpResult Simplex::run_phases(double deadline_seconds) {
    const auto start = std::chrono::steady_clock::now();
    auto out_of_time = [&] {
        if (!std::isfinite(deadline_seconds)) return false;
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() >
               deadline_seconds;
    };

    LpResult res;
    const long long iter_limit = 20000 + 500ll * (m_ + n());

    for (int phase = 1; phase <= 2; ++phase) {
        if (phase == 1) {
            bool any_artificial = false;
            for (int r = 0; r < m_; ++r)
                if (is_artificial(basis_[r]) && xb_(r) > kTolPivot) any_artificial = true;
            if (!any_artificial) continue;
        }

        Eigen::VectorXd cb(m_);
        for (int r = 0; r < m_; ++r) cb(r) = phase_cost(basis_[r], phase);

        int degenerate_streak = 0;
        bool bland = false;
        long long local_iters = 0;

        while (true) {
            if (out_of_time()) {
                res.status = LpStatus::kTimeLimit;
                res.hit_time_limit = true;
                res.simplex_iterations = iterations_;
                return res;
            }
            if (++local_iters > iter_limit) {
                res.status = LpStatus::kIterLimit;
                res.simplex_iterations = iterations_;
                return res;
            }
            if (pivots_since_refactor_ >= kRefactorInterval) {
                if (!refactor()) {
                    cold_start();
                    return run_phases(deadline_seconds);
                }
                for (int r = 0; r < m_; ++r) cb(r) = phase_cost(basis_[r], phase);
            }

            const Eigen::VectorXd y = binv_.transpose() * cb;

            long long entering = -1;
            double best_d = -kTolReducedCost;
            auto consider = [&](long long id) {
                if (basis_pos_.count(id)) return false;
                const double d = phase_cost(id, phase) - dot_column(y, id);
                if (d < best_d) {
                    best_d = d;
                    entering = id;
                    return bland;  // first eligible wins under Bland's rule
                }
                return false;
            };
            bool stop = false;
            for (long long j = 0; j < n() && !stop; ++j) stop = consider(j);
            for (int i = 0; i < m_ && !stop; ++i) {
                if (model_->sense(i) == RowSense::kEq) continue;  // no slack column
                stop = consider(kLogicalBase + 3ll * i);
            }

            if (entering < 0) break;  // phase optimal

            const Eigen::VectorXd w = ftran(entering);

            // Ratio test. Zero-valued basic artificials with a negative pivot
            // element would grow; force them out at theta = 0 instead.
            int leaving = -1;
            double theta = std::numeric_limits<double>::infinity();
            bool leaving_artificial = false;
            double leaving_w = 0.0;
            for (int i = 0; i < m_; ++i) {
                const bool art = is_artificial(basis_[i]);
                double ratio;
                if (w(i) > kTolPivot) ratio = std::max(xb_(i), 0.0) / w(i);
                else if (art && w(i) < -kTolPivot && xb_(i) <= kTolFeas) ratio = 0.0;
                else continue;
                const bool better =
                    ratio < theta - 1e-9 ||
                    (ratio < theta + 1e-9 &&
                     ((art && !leaving_artificial) ||
                      (art == leaving_artificial &&
                       (std::abs(w(i)) > std::abs(leaving_w) + 1e-12 ||
                        (std::abs(w(i)) >= std::abs(leaving_w) - 1e-12 && leaving >= 0 &&
                         basis_[i] < basis_[leaving])))));
                if (leaving < 0 || better) {
                    leaving = i;
                    theta = ratio;
                    leaving_artificial = art;
                    leaving_w = w(i);
                }
            }

            if (leaving < 0) {
                if (phase == 1) throw SolveError("simplex: phase-1 subproblem unbounded");
                res.status = LpStatus::kUnbounded;
                res.simplex_iterations = iterations_;
                return res;
            }

            pivot(leaving, entering, w, theta);
            cb(leaving) = phase_cost(entering, phase);

            if (theta <= 1e-12) {
                if (++degenerate_streak > 2 * m_ + 100) bland = true;
            } else {
                degenerate_streak = 0;
                bland = false;
            }
        }

        if (phase == 1) {
            double infeas = 0.0;
            for (int r = 0; r < m_; ++r)
                if (is_artificial(basis_[r])) infeas += std::max(xb_(r), 0.0);
            if (infeas > kTolFeas * (1.0 + b_.cwiseAbs().maxCoeff())) {
                res.status = LpStatus::kInfeasible;
                res.simplex_iterations = iterations_;
                return res;
            }
            drive_out_artificials();
        }
    }

    res.status = LpStatus::kOptimal;
    res.x = structural_solution();
    res.objective = 0.0;
    for (int j = 0; j < n(); ++j) res.objective += model_->cost(j) * res.x(j);
    Eigen::VectorXd cb(m_);
    for (int r = 0; r < m_; ++r) cb(r) = phase_cost(basis_[r], 2);
    res.duals = binv_.transpose() * cb;
    res.simplex_iterations = iterations_;
    return res;
}

LpResult Simplex::solve(double deadline_seconds) {
    if (model_->num_rows() == 0) {
        // Degenerate but legal: with no rows the optimum is x = 0 unless some
        // cost is negative, in which case the LP is unbounded.
        LpResult res;
        for (int j = 0; j < n(); ++j)
            if (model_->cost(j) < 0) {
                res.status = LpStatus::kUnbounded;
                return res;
            }
        res.x = Eigen::VectorXd::Zero(n());
        res.duals = Eigen::VectorXd::Zero(0);
        return res;
    }

    if (has_pending_basis_) {
        // Crash the requested basis: keep valid ids, cover leftover rows with
        // the residual rule at the supplied warm point.
        const int rows = model_->num_rows();
        Eigen::VectorXd x = Eigen::VectorXd::Zero(n());
        if (warm_point_.size() > 0)
            x.head(std::min<int>(n(), static_cast<int>(warm_point_.size()))) =
                warm_point_.head(std::min<int>(n(), static_cast<int>(warm_point_.size())));
        std::vector<char> row_covered(rows, 0);
        std::vector<long long> crash;
        for (long long id : pending_basis_) {
            if (id < 0) continue;
            if (id < kLogicalBase) {
                if (id >= n()) continue;
            } else {
                const long long row = (id - kLogicalBase) / 3;
                if (row >= rows) continue;
                row_covered[row] = 1;
            }
            if (static_cast<int>(crash.size()) < rows) crash.push_back(id);
        }
        Eigen::VectorXd residual(rows);
        for (int i = 0; i < rows; ++i) residual(i) = model_->rhs(i);
        for (int j = 0; j < n(); ++j) {
            if (x(j) == 0.0) continue;
            for (const auto& [row, val] : model_->column(j)) residual(row) -= val * x(j);
        }
        for (int i = 0; i < rows && static_cast<int>(crash.size()) < rows; ++i) {
            if (row_covered[i]) continue;
            crash.push_back(feasible_logical(i, residual(i)));
        }
        m_ = rows;
        b_.resize(rows);
        for (int i = 0; i < rows; ++i) b_(i) = model_->rhs(i);
        basis_ = crash;
        basis_pos_.clear();
        for (int k = 0; k < static_cast<int>(basis_.size()); ++k) basis_pos_[basis_[k]] = k;
        state_valid_ = true;
        has_pending_basis_ = false;
        if (static_cast<int>(basis_.size()) != rows || !refactor()) cold_start();
        // A crashed basis may be primal-infeasible (negative entries); fall
        // back to a cold start in that case, phase 1 recovers feasibility.
        if (xb_.size() == rows && xb_.minCoeff() < -kTolFeas) cold_start();
    } else {
        sync();
    }

    LpResult res = run_phases(deadline_seconds);
    if (res.status == LpStatus::kIterLimit) {
        // One retry from scratch with a fresh factorization; hitting the
        // limit twice is a genuine failure surfaced to the caller.
        cold_start();
        res = run_phases(deadline_seconds);
    }
    if (res.status != LpStatus::kOptimal) state_valid_ = res.status == LpStatus::kInfeasible;
    return res;
}

}  // namespace

LpResult BuiltinSimplexBackend::solve_lp(const LpModel& model) {
    Simplex solver(&model);
    return solver.resolve();
}

std::unique_ptr<IncrementalLp> BuiltinSimplexBackend::attach(const LpModel* live_model) {
    return std::make_unique<Simplex>(live_model);
}

LpResult BuiltinSimplexBackend::solve_ilp(const LpModel& model, double time_limit_seconds) {
    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };

    struct Bound {
        int col;
        RowSense sense;  // kLe for x <= v, kGe for x >= v
        double value;
    };

    LpResult best;
    best.status = LpStatus::kInfeasible;
    best.objective = std::numeric_limits<double>::infinity();
    bool have_incumbent = false;
    bool timed_out = false;
    bool root_unbounded = false;
    long long total_iters = 0;

    std::function<void(const std::vector<Bound>&, const std::vector<long long>&,
                       const Eigen::VectorXd&)>
        visit = [&](const std::vector<Bound>& bounds, const std::vector<long long>& parent_basis,
                    const Eigen::VectorXd& parent_x) {
            if (timed_out || root_unbounded) return;
            if (elapsed() > time_limit_seconds) {
                timed_out = true;
                return;
            }

            LpModel node = model;
            for (const Bound& b : bounds) {
                const int row = node.add_row(b.sense, b.value);
                node.set_coeff(row, b.col, 1.0);
            }
            Simplex solver(&node);
            if (!parent_basis.empty()) {
                solver.set_basis(parent_basis);
                solver.set_warm_point(parent_x);
            }
            LpResult res = solver.solve(
                std::isfinite(time_limit_seconds) ? time_limit_seconds - elapsed()
                                                  : std::numeric_limits<double>::infinity());
            total_iters += res.simplex_iterations;
            if (res.status == LpStatus::kTimeLimit) {
                timed_out = true;
                return;
            }
            if (res.status == LpStatus::kUnbounded) {
                if (bounds.empty()) root_unbounded = true;
                return;
            }
            if (res.status != LpStatus::kOptimal) return;
            if (have_incumbent && res.objective >= best.objective - 1e-9) return;

            // Most fractional integer variable, ties to the lowest index.
            int branch_col = -1;
            double branch_val = 0.0, best_frac_score = -1.0;
            for (int j = 0; j < model.num_vars(); ++j) {
                if (!model.is_integer(j)) continue;
                const double v = res.x(j);
                const double frac = v - std::floor(v);
                const double violation = std::min(frac, 1.0 - frac);
                if (violation <= 1e-6) continue;
                const double score = 0.5 - std::abs(frac - 0.5);
                if (score > best_frac_score + 1e-12) {
                    best_frac_score = score;
                    branch_col = j;
                    branch_val = v;
                }
            }
            if (branch_col < 0) {
                best = res;
                best.status = LpStatus::kOptimal;
                have_incumbent = true;
                return;
            }

            const std::vector<long long> basis = solver.basis();
            std::vector<Bound> down = bounds;
            down.push_back({branch_col, RowSense::kLe, std::floor(branch_val)});
            visit(down, basis, res.x);
            std::vector<Bound> up = bounds;
            up.push_back({branch_col, RowSense::kGe, std::floor(branch_val) + 1.0});
            visit(up, basis, res.x);
        };

    visit({}, {}, Eigen::VectorXd());

    if (root_unbounded) {
        LpResult res;
        res.status = LpStatus::kUnbounded;
        return res;
    }
    best.simplex_iterations = total_iters;
    best.hit_time_limit = timed_out;
    if (timed_out) best.status = LpStatus::kTimeLimit;
    else if (have_incumbent) best.status = LpStatus::kOptimal;
    if (best.duals.size() > model.num_rows()) best.duals.conservativeResize(model.num_rows());
    return best;
}

LpResult solve_lp(const LpModel& model) { return BuiltinSimplexBackend().solve_lp(model); }

LpResult solve_ilp(const LpModel& model, double time_limit_seconds) {
    return BuiltinSimplexBackend().solve_ilp(model, time_limit_seconds);
}

}  // namespace lacg
