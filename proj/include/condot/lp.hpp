#pragma once

#include <Eigen/Dense>

#include "condot/errors.hpp"

namespace condot::lp {

struct Result {
  Eigen::VectorXd x;
  double value = 0.0;
};

// Maximize c.dot(x) subject to A x <= b, x >= 0 (b may be negative).
// Dense two-phase tableau simplex with Bland's rule, intended for the small
// dual programs assembled per condition; rejects more than 64 variables.
// Throws NumericError on infeasible or unbounded programs.
Result maximize(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                const Eigen::VectorXd& b);

} // namespace condot::lp
