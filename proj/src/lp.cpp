#include "condot/lp.hpp"

#include <limits>
#include <string>
#include <vector>

namespace condot::lp {

namespace {
constexpr double kEps = 1e-9;
}

Result maximize(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                const Eigen::VectorXd& b) {
  const int n = static_cast<int>(c.size());
  const int m = static_cast<int>(A.rows());
  if (A.cols() != n || b.size() != m)
    throw ValidationError("lp: dimension mismatch");
  if (n > 64) throw ValidationError("lp: routine is limited to 64 variables");

  // Columns: n structural, m slack, then one artificial per negated row.
  std::vector<int> art_rows;
  for (int i = 0; i < m; ++i)
    if (b[i] < 0.0) art_rows.push_back(i);
  const int na = static_cast<int>(art_rows.size());
  const int ncols = n + m + na;

  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, ncols);
  Eigen::VectorXd rhs = b;
  std::vector<int> basis(m);

  T.block(0, 0, m, n) = A;
  for (int i = 0; i < m; ++i) T(i, n + i) = 1.0;
  int a = 0;
  for (int i = 0; i < m; ++i) {
    if (b[i] < 0.0) {
      T.row(i) = -T.row(i);
      rhs[i] = -rhs[i];
      T(i, n + m + a) = 1.0;
      basis[i] = n + m + a;
      ++a;
    } else {
      basis[i] = n + i;
    }
  }

  auto run_simplex = [&](const Eigen::VectorXd& obj, bool allow_artificial) {
    for (;;) {
      // reduced costs d_j = obj_j - y^T col_j with y_i = obj[basis[i]]
      Eigen::VectorXd yb(m);
      for (int i = 0; i < m; ++i) yb[i] = obj[basis[i]];
      int enter = -1;
      for (int j = 0; j < ncols; ++j) {
        if (!allow_artificial && j >= n + m) continue;
        const double d = obj[j] - yb.dot(T.col(j));
        if (d > kEps) { enter = j; break; } // Bland: smallest index
      }
      if (enter < 0) return;

      int leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m; ++i) {
        if (T(i, enter) > kEps) {
          const double ratio = rhs[i] / T(i, enter);
          if (ratio < best_ratio - kEps ||
              (ratio < best_ratio + kEps &&
               (leave < 0 || basis[i] < basis[leave]))) {
            best_ratio = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) throw NumericError("lp: unbounded program");

      const double piv = T(leave, enter);
      T.row(leave) /= piv;
      rhs[leave] /= piv;
      for (int i = 0; i < m; ++i) {
        if (i == leave) continue;
        const double f = T(i, enter);
        if (f != 0.0) {
          T.row(i) -= f * T.row(leave);
          rhs[i] -= f * rhs[leave];
        }
      }
      basis[leave] = enter;
    }
  };

  if (na > 0) {
    Eigen::VectorXd obj1 = Eigen::VectorXd::Zero(ncols);
    for (int j = n + m; j < ncols; ++j) obj1[j] = -1.0;
    run_simplex(obj1, true);
    double infeas = 0.0;
    for (int i = 0; i < m; ++i)
      if (basis[i] >= n + m) infeas += rhs[i];
    if (infeas > 1e-7) throw NumericError("lp: infeasible program");

    // Drive leftover artificials (basic at zero) out of the basis so phase 2
    // cannot move them; rows with no eligible pivot are redundant.
    for (int i = 0; i < m; ++i) {
      if (basis[i] < n + m) continue;
      int piv_col = -1;
      for (int j = 0; j < n + m; ++j)
        if (std::abs(T(i, j)) > kEps) { piv_col = j; break; }
      if (piv_col < 0) {
        T.row(i).setZero();
        rhs[i] = 0.0;
        continue;
      }
      const double piv = T(i, piv_col);
      T.row(i) /= piv;
      rhs[i] /= piv;
      for (int r = 0; r < m; ++r) {
        if (r == i) continue;
        const double f = T(r, piv_col);
        if (f != 0.0) {
          T.row(r) -= f * T.row(i);
          rhs[r] -= f * rhs[i];
        }
      }
      basis[i] = piv_col;
    }
  }

  Eigen::VectorXd obj2 = Eigen::VectorXd::Zero(ncols);
  obj2.head(n) = c;
  run_simplex(obj2, false);

  Result res;
  res.x = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < m; ++i)
    if (basis[i] < n) res.x[basis[i]] = rhs[i];
  res.value = c.dot(res.x);
  return res;
}

} // namespace condot::lp
