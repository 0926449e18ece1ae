#pragma once

#include <Eigen/Dense>

namespace lacg {

// Duals of the restricted master, stored with the signs the pricing
// subproblem consumes: every entry is a magnitude, the formula
//     cbar_l = c_l + pi0 - sum_u a_ul pi(u) + sum_d a*_dl sri(d)
//                  - sum_r a_rl rci(r)
// carries the signs. pi0 and sri come from <= rows (LP duals <= 0, negated
// here); pi and rci come from >= rows and are kept as-is.
struct DualSolution {
    Eigen::VectorXd pi;   // one per customer: reward for covering u
    double pi0 = 0.0;     // fleet bound: penalty per route started
    Eigen::VectorXd sri;  // one per active subset-row cut
    Eigen::VectorXd rci;  // one per active capacity cut
};

}  // namespace lacg
