#pragma once

// Test-only reference implementations, kept independent of the library's
// solver code paths: brute-force enumeration over permutations, an LP
// formulation of the transportation problem, a naive network forward pass,
// and finite-difference helpers.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"

#include "condot/lp.hpp"
#include "condot/measures.hpp"
#include "condot/nn.hpp"

namespace oracles {

// Minimum of (1/n) sum_i C(i, sigma(i)) over all permutations.
inline double brute_force_assignment(const Eigen::MatrixXd& C) {
  const int n = static_cast<int>(C.rows());
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += C(i, idx[i]);
    best = std::min(best, total / n);
  } while (std::next_permutation(idx.begin(), idx.end()));
  return best;
}

// Conditional transport cost by enumerating permutations per condition group
// (uniform equal-count conditionals only).
inline double brute_force_conditional_p(const condot::DiscreteJointMeasure& mu,
                                        const condot::DiscreteJointMeasure& nu,
                                        double p) {
  const auto ga = condot::group_by_condition(mu);
  const auto gb = condot::group_by_condition(nu);
  double total = 0.0;
  for (const auto& a : ga) {
    const condot::ConditionGroup* b = nullptr;
    for (const auto& cand : gb)
      if ((a.y - cand.y).norm() <= 1e-9) b = &cand;
    REQUIRE(b != nullptr);
    const int n = static_cast<int>(a.atoms.size());
    REQUIRE(static_cast<int>(b->atoms.size()) == n);
    Eigen::MatrixXd C(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double d = (mu.xs.row(a.atoms[i]) - nu.xs.row(b->atoms[j])).norm();
        C(i, j) = p == 2.0 ? d * d : std::pow(d, p);
      }
    total += a.weight * brute_force_assignment(C);
  }
  return total;
}

// Transportation problem solved through the in-repo simplex: minimize
// sum pi_ij c_ij subject to the marginal equalities, pi >= 0.
inline double lp_transport_value(const Eigen::VectorXd& a,
                                 const Eigen::VectorXd& b,
                                 const Eigen::MatrixXd& C) {
  const int m = static_cast<int>(a.size());
  const int n = static_cast<int>(b.size());
  const int nv = m * n;
  // equality marginals as pairs of inequalities; drop one redundant row
  const int rows = 2 * (m + n) - 2;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, nv);
  Eigen::VectorXd rhs(rows);
  int r = 0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) A(r, i * n + j) = 1.0;
    rhs[r] = a[i];
    ++r;
    for (int j = 0; j < n; ++j) A(r, i * n + j) = -1.0;
    rhs[r] = -a[i];
    ++r;
  }
  for (int j = 0; j + 1 < n; ++j) {
    for (int i = 0; i < m; ++i) A(r, i * n + j) = 1.0;
    rhs[r] = b[j];
    ++r;
    for (int i = 0; i < m; ++i) A(r, i * n + j) = -1.0;
    rhs[r] = -b[j];
    ++r;
  }
  Eigen::VectorXd c(nv);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) c[i * n + j] = -C(i, j);
  const auto res = condot::lp::maximize(c, A, rhs);
  return -res.value;
}

// Plain loops-and-doubles forward pass for the velocity model.
inline std::vector<double> naive_forward(const condot::VelocityModel& model,
                                         double t,
                                         const std::vector<double>& y,
                                         const std::vector<double>& x) {
  std::vector<double> in;
  in.push_back(t);
  for (int k = 1; k <= 4; ++k) {
    in.push_back(std::sin(2.0 * M_PI * k * t));
    in.push_back(std::cos(2.0 * M_PI * k * t));
  }
  for (double v : y) in.push_back(v);
  for (double v : x) in.push_back(v);

  std::vector<double> act = in;
  const int L = static_cast<int>(model.W.size());
  for (int l = 0; l < L; ++l) {
    const int out_n = static_cast<int>(model.W[l].rows());
    const int in_n = static_cast<int>(model.W[l].cols());
    std::vector<double> z(out_n);
    for (int r = 0; r < out_n; ++r) {
      double acc = model.b[l][r];
      for (int cidx = 0; cidx < in_n; ++cidx) acc += model.W[l](r, cidx) * act[cidx];
      z[r] = l + 1 < L ? std::tanh(acc) : acc;
    }
    act = std::move(z);
  }
  return act;
}

// Simple uniform-weight measure builder: rows of y and x.
inline condot::DiscreteJointMeasure measure_of(const Eigen::MatrixXd& ys,
                                               const Eigen::MatrixXd& xs) {
  condot::DiscreteJointMeasure mu;
  mu.ys = ys;
  mu.xs = xs;
  mu.weights =
      Eigen::VectorXd::Constant(ys.rows(), 1.0 / static_cast<double>(ys.rows()));
  return mu;
}

// 1-D helper: atoms (y_i, x_i) with explicit weights.
inline condot::DiscreteJointMeasure measure_1d(std::vector<double> y,
                                               std::vector<double> x,
                                               std::vector<double> w) {
  const int n = static_cast<int>(y.size());
  condot::DiscreteJointMeasure mu;
  mu.ys.resize(n, 1);
  mu.xs.resize(n, 1);
  mu.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    mu.ys(i, 0) = y[i];
    mu.xs(i, 0) = x[i];
    mu.weights[i] = w[i];
  }
  return mu;
}

} // namespace oracles
