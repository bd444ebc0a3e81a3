#include "condot/measures.hpp"

#include <cmath>
#include <string>

#include "condot/rng.hpp"

namespace condot {

void DiscreteJointMeasure::validate() const {
  const int n = num_atoms();
  if (n < 1) throw ValidationError("measure: needs at least one atom");
  if (ys.rows() != n || xs.rows() != n)
    throw ValidationError("measure: atom/weight count mismatch");
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w = weights[i];
    if (!(w >= 0.0) || !std::isfinite(w))
      throw ValidationError("measure: weight " + std::to_string(i) +
                            " is negative or not finite");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw ValidationError("measure: weights sum to " + std::to_string(total) +
                          ", expected 1 within 1e-12");
  if (!ys.allFinite() || !xs.allFinite())
    throw ValidationError("measure: non-finite atom coordinate");
}

std::vector<ConditionGroup> group_by_condition(const DiscreteJointMeasure& mu,
                                               double tol) {
  if (!(tol >= 0.0)) throw ValidationError("group_by_condition: tol must be >= 0");
  mu.validate();

  std::vector<ConditionGroup> groups;
  for (int i = 0; i < mu.num_atoms(); ++i) {
    const auto y = mu.ys.row(i);
    int hit = -1;
    for (size_t g = 0; g < groups.size(); ++g) {
      if ((groups[g].y.transpose() - y).norm() <= tol) {
        hit = static_cast<int>(g);
        break;
      }
    }
    if (hit < 0) {
      ConditionGroup g;
      g.y = y.transpose();
      groups.push_back(std::move(g));
      hit = static_cast<int>(groups.size()) - 1;
    }
    groups[hit].atoms.push_back(i);
    groups[hit].weight += mu.weights[i];
  }

  for (size_t a = 0; a < groups.size(); ++a)
    for (size_t b = a + 1; b < groups.size(); ++b)
      if ((groups[a].y - groups[b].y).norm() <= 2.0 * tol)
        throw ValidationError(
            "group_by_condition: two condition representatives within 2*tol, "
            "grouping is ambiguous");

  for (auto& g : groups) {
    g.cond_weights.resize(static_cast<int>(g.atoms.size()));
    for (size_t k = 0; k < g.atoms.size(); ++k)
      g.cond_weights[static_cast<int>(k)] = mu.weights[g.atoms[k]] / g.weight;
  }
  return groups;
}

bool same_condition_marginal(const DiscreteJointMeasure& mu,
                             const DiscreteJointMeasure& nu, double tol) {
  if (mu.dim_y() != nu.dim_y()) return false;
  const auto ga = group_by_condition(mu, tol);
  const auto gb = group_by_condition(nu, tol);
  if (ga.size() != gb.size()) return false;

  std::vector<bool> used(gb.size(), false);
  for (const auto& a : ga) {
    bool found = false;
    for (size_t j = 0; j < gb.size(); ++j) {
      if (used[j]) continue;
      if ((a.y - gb[j].y).norm() <= tol && std::abs(a.weight - gb[j].weight) <= tol) {
        used[j] = true;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

std::pair<DiscreteJointMeasure, DiscreteJointMeasure>
random_joint_instance(uint64_t seed, int d, int m, int n_conditions,
                      int n_per_condition) {
  if (d < 1 || m < 1 || n_conditions < 1 || n_per_condition < 1)
    throw ValidationError("random_joint_instance: all counts must be >= 1");

  Rng rng(seed);
  Rng cond_rng = rng.split(0);
  Rng x_rng = rng.split(1);

  // distinct condition points; resample until pairwise separated
  Eigen::MatrixXd cond(n_conditions, d);
  for (int attempt = 0;; ++attempt) {
    for (int k = 0; k < n_conditions; ++k)
      for (int j = 0; j < d; ++j) cond(k, j) = cond_rng.normal();
    double min_sep = std::numeric_limits<double>::infinity();
    for (int a = 0; a < n_conditions; ++a)
      for (int b = a + 1; b < n_conditions; ++b)
        min_sep = std::min(min_sep, (cond.row(a) - cond.row(b)).norm());
    if (n_conditions == 1 || min_sep > 1e-3) break;
    if (attempt > 256)
      throw NumericError("random_joint_instance: failed to separate conditions");
  }

  const int n = n_conditions * n_per_condition;
  auto make = [&](Rng& r) {
    DiscreteJointMeasure out;
    out.ys.resize(n, d);
    out.xs.resize(n, m);
    out.weights = Eigen::VectorXd::Constant(n, 1.0 / n);
    int row = 0;
    for (int k = 0; k < n_conditions; ++k)
      for (int i = 0; i < n_per_condition; ++i, ++row) {
        out.ys.row(row) = cond.row(k);
        for (int j = 0; j < m; ++j) out.xs(row, j) = r.normal();
      }
    return out;
  };
  Rng ra = x_rng.split(0), rb = x_rng.split(1);
  return {make(ra), make(rb)};
}

} // namespace condot
