#include "condot/ot_exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>

#include "condot/lp.hpp"

namespace condot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double pnorm_pow(const Eigen::RowVectorXd& diff, double p) {
  if (p == 2.0) return diff.squaredNorm();
  if (p == 1.0) return diff.norm();
  return std::pow(diff.norm(), p);
}

bool is_uniform(const Eigen::VectorXd& w) {
  const double u = 1.0 / static_cast<double>(w.size());
  for (int i = 0; i < w.size(); ++i)
    if (std::abs(w[i] - u) > 1e-12) return false;
  return true;
}

void check_solver_p(double p) {
  if (p != 1.0 && p != 2.0)
    throw ValidationError("exact solvers support p in {1, 2} only");
}

} // namespace

Eigen::MatrixXd cost_matrix(const Eigen::MatrixXd& ya, const Eigen::MatrixXd& xa,
                            const Eigen::MatrixXd& yb, const Eigen::MatrixXd& xb,
                            const CostSpec& spec, double cond_tol) {
  spec.validate();
  if (ya.cols() != yb.cols() || xa.cols() != xb.cols())
    throw ValidationError("cost_matrix: points come from different product spaces");
  if (ya.rows() != xa.rows() || yb.rows() != xb.rows())
    throw ValidationError("cost_matrix: y/x row count mismatch");

  const int na = static_cast<int>(ya.rows());
  const int nb = static_cast<int>(yb.rows());
  Eigen::MatrixXd C(na, nb);
  for (int i = 0; i < na; ++i) {
    for (int j = 0; j < nb; ++j) {
      const double dy = (ya.row(i) - yb.row(j)).norm();
      const double cx = pnorm_pow(xa.row(i) - xb.row(j), spec.p);
      if (spec.strict) {
        C(i, j) = dy <= cond_tol ? cx : kInf;
      } else {
        C(i, j) = cx + spec.beta * std::pow(dy, spec.p);
      }
    }
  }
  return C;
}

Eigen::MatrixXd joint_cost_matrix(const Eigen::MatrixXd& ya, const Eigen::MatrixXd& xa,
                                  const Eigen::MatrixXd& yb, const Eigen::MatrixXd& xb,
                                  double p) {
  if (ya.cols() != yb.cols() || xa.cols() != xb.cols())
    throw ValidationError("joint_cost_matrix: points come from different product spaces");
  const int na = static_cast<int>(ya.rows());
  const int nb = static_cast<int>(yb.rows());
  Eigen::MatrixXd C(na, nb);
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nb; ++j) {
      const double d2 = (ya.row(i) - yb.row(j)).squaredNorm() +
                        (xa.row(i) - xb.row(j)).squaredNorm();
      C(i, j) = p == 2.0 ? d2 : std::pow(std::sqrt(d2), p);
    }
  return C;
}

AssignmentResult solve_assignment(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n) throw ValidationError("solve_assignment: table must be square");
  if (n == 0) throw ValidationError("solve_assignment: empty table");

  // Shortest-augmenting-path method with dual potentials (1-based arrays).
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cij = cost(i0 - 1, j - 1);
        if (std::isfinite(cij)) {
          const double cur = cij - u[i0] - v[j];
          if (cur < minv[j]) {
            minv[j] = cur;
            way[j] = j0;
          }
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      if (j1 < 0 || !(delta < kInf))
        throw NumericError("solve_assignment: no finite perfect assignment");
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }

  AssignmentResult res;
  res.perm.assign(n, -1);
  for (int j = 1; j <= n; ++j) res.perm[p[j] - 1] = j - 1;
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += cost(i, res.perm[i]);
  res.mean_cost = total / n;
  return res;
}

TransportResult solve_transport(const Eigen::VectorXd& mu_w,
                                const Eigen::VectorXd& nu_w,
                                const Eigen::MatrixXd& cost) {
  const int m = static_cast<int>(mu_w.size());
  const int n = static_cast<int>(nu_w.size());
  if (cost.rows() != m || cost.cols() != n)
    throw ValidationError("solve_transport: cost table shape mismatch");
  for (int i = 0; i < m; ++i)
    if (!(mu_w[i] >= 0.0)) throw ValidationError("solve_transport: negative weight");
  for (int j = 0; j < n; ++j)
    if (!(nu_w[j] >= 0.0)) throw ValidationError("solve_transport: negative weight");
  if (std::abs(mu_w.sum() - nu_w.sum()) > 1e-10)
    throw ValidationError("solve_transport: infeasible, weight totals differ beyond 1e-10");

  // Successive shortest paths on the bipartite graph with node potentials.
  const int S = m + n;
  Eigen::MatrixXd flow = Eigen::MatrixXd::Zero(m, n);
  Eigen::VectorXd rem_a = mu_w, rem_b = nu_w;
  Eigen::VectorXd pi = Eigen::VectorXd::Zero(S);

  double remaining = std::min(rem_a.sum(), rem_b.sum());
  int guard = 0;
  const int guard_max = 64 * S + 4096;

  while (remaining > 1e-14) {
    if (++guard > guard_max)
      throw NumericError("solve_transport: augmentation limit exceeded");

    std::vector<double> dist(S, kInf);
    std::vector<int> prev(S, -1);
    std::vector<char> done(S, 0);
    for (int i = 0; i < m; ++i)
      if (rem_a[i] > 1e-15) dist[i] = 0.0;

    for (int it = 0; it < S; ++it) {
      int u = -1;
      double best = kInf;
      for (int v = 0; v < S; ++v)
        if (!done[v] && dist[v] < best) {
          best = dist[v];
          u = v;
        }
      if (u < 0) break;
      done[u] = 1;
      if (u < m) {
        for (int j = 0; j < n; ++j) {
          const double c = cost(u, j);
          if (!std::isfinite(c)) continue;
          const double rc = std::max(0.0, c + pi[u] - pi[m + j]);
          if (dist[u] + rc < dist[m + j] - 1e-18) {
            dist[m + j] = dist[u] + rc;
            prev[m + j] = u;
          }
        }
      } else {
        const int j = u - m;
        for (int i = 0; i < m; ++i) {
          if (flow(i, j) <= 0.0) continue;
          const double rc = std::max(0.0, -cost(i, j) + pi[m + j] - pi[i]);
          if (dist[u] + rc < dist[i] - 1e-18) {
            dist[i] = dist[u] + rc;
            prev[i] = u;
          }
        }
      }
    }

    int sink = -1;
    double best = kInf;
    for (int j = 0; j < n; ++j)
      if (rem_b[j] > 1e-15 && dist[m + j] < best) {
        best = dist[m + j];
        sink = m + j;
      }
    if (sink < 0)
      throw NumericError("solve_transport: no finite-cost route to remaining demand");

    // bottleneck along the path
    double push = rem_b[sink - m];
    for (int v = sink; prev[v] >= 0; v = prev[v]) {
      const int w = prev[v];
      if (v >= m && w < m) {
        // forward arc w -> v, capacity unbounded
      } else {
        // residual arc (sink w+? ) v < m, w >= m: limited by flow(v, w-m)
        push = std::min(push, flow(v, w - m));
      }
    }
    {
      int v = sink;
      while (prev[v] >= 0) v = prev[v];
      push = std::min(push, rem_a[v]);
    }

    for (int v = sink; prev[v] >= 0; v = prev[v]) {
      const int w = prev[v];
      if (v >= m && w < m)
        flow(w, v - m) += push;
      else
        flow(v, w - m) -= push;
    }
    {
      int v = sink;
      while (prev[v] >= 0) v = prev[v];
      rem_a[v] -= push;
    }
    rem_b[sink - m] -= push;
    remaining -= push;

    const double cap = dist[sink];
    for (int v = 0; v < S; ++v) pi[v] += std::min(dist[v], cap);
  }

  TransportResult res;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      if (flow(i, j) > 0.0) {
        res.entries.push_back({i, j, flow(i, j)});
        res.cost += flow(i, j) * cost(i, j);
      }
  return res;
}

ConditionMatch match_conditions(const DiscreteJointMeasure& mu,
                                const DiscreteJointMeasure& nu, double tol) {
  if (mu.dim_y() != nu.dim_y() || mu.dim_x() != nu.dim_x())
    throw ValidationError("match_conditions: dimension mismatch");
  auto ga = group_by_condition(mu, tol);
  auto gb = group_by_condition(nu, tol);
  if (ga.size() != gb.size())
    throw ValidationError("match_conditions: measures have different condition counts");

  ConditionMatch match;
  match.mu = std::make_shared<DiscreteJointMeasure>(mu);
  match.nu = std::make_shared<DiscreteJointMeasure>(nu);
  match.tol = tol;

  std::vector<bool> used(gb.size(), false);
  for (auto& a : ga) {
    int hit = -1;
    for (size_t j = 0; j < gb.size(); ++j) {
      if (used[j]) continue;
      if ((a.y - gb[j].y).norm() <= tol && std::abs(a.weight - gb[j].weight) <= tol) {
        hit = static_cast<int>(j);
        break;
      }
    }
    if (hit < 0)
      throw ValidationError("match_conditions: condition marginals do not match");
    used[hit] = true;
    MatchedGroup g;
    g.y = a.y;
    g.weight = a.weight;
    g.mu_atoms = std::move(a.atoms);
    g.mu_weights = std::move(a.cond_weights);
    g.nu_atoms = gb[hit].atoms;
    g.nu_weights = gb[hit].cond_weights;
    match.groups.push_back(std::move(g));
  }
  return match;
}

void Plan4::validate(double marginal_tol, double cond_tol) const {
  if (!source || !target) throw ValidationError("plan: missing measures");
  Eigen::VectorXd row = Eigen::VectorXd::Zero(source->num_atoms());
  Eigen::VectorXd col = Eigen::VectorXd::Zero(target->num_atoms());
  for (const auto& e : entries) {
    if (e.i < 0 || e.i >= source->num_atoms() || e.j < 0 || e.j >= target->num_atoms())
      throw ValidationError("plan: entry index out of range");
    if (!(e.mass > 0.0)) throw ValidationError("plan: nonpositive entry mass");
    row[e.i] += e.mass;
    col[e.j] += e.mass;
    if (y_diagonal &&
        (source->ys.row(e.i) - target->ys.row(e.j)).norm() > cond_tol)
      throw ValidationError("plan: y_diagonal set but an entry crosses conditions");
  }
  if ((row - source->weights).lpNorm<Eigen::Infinity>() > marginal_tol)
    throw ValidationError("plan: row sums do not match source weights");
  if ((col - target->weights).lpNorm<Eigen::Infinity>() > marginal_tol)
    throw ValidationError("plan: column sums do not match target weights");
}

namespace {

// Per-condition exact solve, dispatching between assignment and the general
// transportation solver.
double solve_group(const Eigen::MatrixXd& C, const Eigen::VectorXd& wa,
                   const Eigen::VectorXd& wb,
                   std::vector<PlanEntry>* local) {
  const int na = static_cast<int>(wa.size());
  const int nb = static_cast<int>(wb.size());
  if (na == nb && is_uniform(wa) && is_uniform(wb)) {
    auto res = solve_assignment(C);
    const double mass = 1.0 / na;
    for (int i = 0; i < na; ++i) local->push_back({i, res.perm[i], mass});
    return res.mean_cost;
  }
  auto res = solve_transport(wa, wb, C);
  *local = std::move(res.entries);
  return res.cost;
}

DistanceResult full_space_solve(const DiscreteJointMeasure& mu,
                                const DiscreteJointMeasure& nu,
                                const Eigen::MatrixXd& C, double p) {
  mu.validate();
  nu.validate();
  DistanceResult out;
  std::vector<PlanEntry> entries;
  out.value_p = solve_group(C, mu.weights, nu.weights, &entries);
  out.value = p == 1.0 ? out.value_p : std::pow(out.value_p, 1.0 / p);
  out.plan.source = std::make_shared<DiscreteJointMeasure>(mu);
  out.plan.target = std::make_shared<DiscreteJointMeasure>(nu);
  out.plan.entries = std::move(entries);
  out.plan.y_diagonal = false;
  return out;
}

} // namespace

DistanceResult conditional_wasserstein(const DiscreteJointMeasure& mu,
                                       const DiscreteJointMeasure& nu, double p,
                                       double cond_tol) {
  check_solver_p(p);
  auto match = match_conditions(mu, nu, cond_tol);

  DistanceResult out;
  out.plan.source = match.mu;
  out.plan.target = match.nu;
  out.plan.y_diagonal = true;

  for (const auto& g : match.groups) {
    const int na = static_cast<int>(g.mu_atoms.size());
    const int nb = static_cast<int>(g.nu_atoms.size());
    Eigen::MatrixXd C(na, nb);
    for (int a = 0; a < na; ++a)
      for (int b = 0; b < nb; ++b)
        C(a, b) = pnorm_pow(
            mu.xs.row(g.mu_atoms[a]) - nu.xs.row(g.nu_atoms[b]), p);
    std::vector<PlanEntry> local;
    const double wp = solve_group(C, g.mu_weights, g.nu_weights, &local);
    out.value_p += g.weight * wp;
    for (const auto& e : local)
      out.plan.entries.push_back(
          {g.mu_atoms[e.i], g.nu_atoms[e.j], g.weight * e.mass});
  }
  out.value = p == 1.0 ? out.value_p : std::pow(out.value_p, 1.0 / p);
  return out;
}

DistanceResult relaxed_wasserstein(const DiscreteJointMeasure& mu,
                                   const DiscreteJointMeasure& nu,
                                   const CostSpec& spec) {
  spec.validate();
  check_solver_p(spec.p);
  if (spec.strict)
    throw ValidationError(
        "relaxed_wasserstein: beta must be finite; strict mode is handled by "
        "conditional_wasserstein");
  return full_space_solve(mu, nu,
                          cost_matrix(mu.ys, mu.xs, nu.ys, nu.xs, spec),
                          spec.p);
}

DistanceResult wasserstein_joint(const DiscreteJointMeasure& mu,
                                 const DiscreteJointMeasure& nu, double p) {
  check_solver_p(p);
  return full_space_solve(mu, nu,
                          joint_cost_matrix(mu.ys, mu.xs, nu.ys, nu.xs, p), p);
}

double y_leakage(const Plan4& plan, double p) {
  double total = 0.0;
  for (const auto& e : plan.entries)
    total += e.mass *
             pnorm_pow(plan.source->ys.row(e.i) - plan.target->ys.row(e.j), p);
  return total;
}

double plan_cost_joint(const Plan4& plan, double p) {
  double total = 0.0;
  for (const auto& e : plan.entries) {
    const double d2 =
        (plan.source->ys.row(e.i) - plan.target->ys.row(e.j)).squaredNorm() +
        (plan.source->xs.row(e.i) - plan.target->xs.row(e.j)).squaredNorm();
    total += e.mass * (p == 2.0 ? d2 : std::pow(std::sqrt(d2), p));
  }
  return total;
}

double plan_cost_relaxed(const Plan4& plan, const CostSpec& spec) {
  double total = 0.0;
  for (const auto& e : plan.entries) {
    const double dy = (plan.source->ys.row(e.i) - plan.target->ys.row(e.j)).norm();
    const double cx =
        pnorm_pow(plan.source->xs.row(e.i) - plan.target->xs.row(e.j), spec.p);
    if (spec.strict)
      total += e.mass * (dy <= kConditionTol ? cx : kInf);
    else
      total += e.mass * (cx + spec.beta * std::pow(dy, spec.p));
  }
  return total;
}

double plan_cost_x_only(const Plan4& plan, double p) {
  double total = 0.0;
  for (const auto& e : plan.entries)
    total += e.mass *
             pnorm_pow(plan.source->xs.row(e.i) - plan.target->xs.row(e.j), p);
  return total;
}

Plan3 plan4_to_plan3(const Plan4& plan, double cond_tol) {
  if (!plan.y_diagonal)
    throw ValidationError("plan4_to_plan3: plan is not y-diagonal");
  auto match = std::make_shared<ConditionMatch>(
      match_conditions(*plan.source, *plan.target, cond_tol));

  std::unordered_map<int, std::pair<int, int>> mu_pos, nu_pos; // atom -> (group, idx)
  for (size_t g = 0; g < match->groups.size(); ++g) {
    const auto& grp = match->groups[g];
    for (size_t k = 0; k < grp.mu_atoms.size(); ++k)
      mu_pos[grp.mu_atoms[k]] = {static_cast<int>(g), static_cast<int>(k)};
    for (size_t k = 0; k < grp.nu_atoms.size(); ++k)
      nu_pos[grp.nu_atoms[k]] = {static_cast<int>(g), static_cast<int>(k)};
  }

  Plan3 out;
  out.match = match;
  for (const auto& e : plan.entries) {
    const auto [ga, ia] = mu_pos.at(e.i);
    const auto [gb, jb] = nu_pos.at(e.j);
    if (ga != gb)
      throw ValidationError("plan4_to_plan3: entry crosses condition groups");
    out.entries.push_back({ga, ia, jb, e.mass});
  }
  return out;
}

Plan4 plan3_to_plan4(const Plan3& plan) {
  if (!plan.match) throw ValidationError("plan3_to_plan4: missing grouping");
  Plan4 out;
  out.source = plan.match->mu;
  out.target = plan.match->nu;
  out.y_diagonal = true;
  for (const auto& e : plan.entries) {
    const auto& g = plan.match->groups.at(e.group);
    out.entries.push_back({g.mu_atoms.at(e.i), g.nu_atoms.at(e.j), e.mass});
  }
  return out;
}

double plan3_cost(const Plan3& plan, double p) {
  double total = 0.0;
  for (const auto& e : plan.entries) {
    const auto& g = plan.match->groups.at(e.group);
    total += e.mass * pnorm_pow(plan.match->mu->xs.row(g.mu_atoms.at(e.i)) -
                                    plan.match->nu->xs.row(g.nu_atoms.at(e.j)),
                                p);
  }
  return total;
}

double DualCertificate::lipschitz_excess() const {
  double worst = -kInf;
  for (const auto& c : potentials) {
    const int k = static_cast<int>(c.h.size());
    for (int u = 0; u < k; ++u)
      for (int v = u + 1; v < k; ++v)
        worst = std::max(worst, std::abs(c.h[u] - c.h[v]) -
                                    (c.points.row(u) - c.points.row(v)).norm());
  }
  return worst;
}

DualCertificate dual_certificate(const DiscreteJointMeasure& mu,
                                 const DiscreteJointMeasure& nu,
                                 double cond_tol) {
  auto match = match_conditions(mu, nu, cond_tol);
  DualCertificate cert;

  for (const auto& g : match.groups) {
    // union of conditional supports; atoms with bit-identical payloads merge
    std::vector<Eigen::RowVectorXd> pts;
    std::vector<double> signed_mass;
    auto upsert = [&](const Eigen::RowVectorXd& x, double contribution) {
      for (size_t u = 0; u < pts.size(); ++u)
        if (pts[u] == x) {
          signed_mass[u] += contribution;
          return;
        }
      pts.push_back(x);
      signed_mass.push_back(contribution);
    };
    for (size_t k = 0; k < g.mu_atoms.size(); ++k)
      upsert(mu.xs.row(g.mu_atoms[k]), g.mu_weights[static_cast<int>(k)]);
    for (size_t k = 0; k < g.nu_atoms.size(); ++k)
      upsert(nu.xs.row(g.nu_atoms[k]), -g.nu_weights[static_cast<int>(k)]);

    const int K = static_cast<int>(pts.size());
    CondPotential pot;
    pot.y = g.y;
    pot.weight = g.weight;
    pot.points.resize(K, mu.dim_x());
    for (int u = 0; u < K; ++u) pot.points.row(u) = pts[u];
    pot.h = Eigen::VectorXd::Zero(K);

    double group_value = 0.0;
    if (K > 1) {
      // Pin h(point 0) = 0 (the objective is shift invariant) and substitute
      // w_u = h_u + D >= 0 with D = max_u d(u, 0), which every feasible h
      // satisfies. Constraints are the pairwise Lipschitz bounds.
      Eigen::VectorXd d0(K);
      for (int u = 0; u < K; ++u) d0[u] = (pts[u] - pts[0]).norm();
      const double D = d0.maxCoeff();

      const int nv = K - 1;
      const int rows = (K - 1) * (K - 2) + 2 * (K - 1);
      Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, nv);
      Eigen::VectorXd b(rows), c(nv);
      int r = 0;
      for (int u = 1; u < K; ++u)
        for (int v = 1; v < K; ++v) {
          if (u == v) continue;
          A(r, u - 1) = 1.0;
          A(r, v - 1) = -1.0;
          b[r] = (pts[u] - pts[v]).norm();
          ++r;
        }
      for (int u = 1; u < K; ++u) {
        A(r, u - 1) = 1.0;
        b[r] = d0[u] + D;
        ++r;
        A(r, u - 1) = -1.0;
        b[r] = d0[u] - D;
        ++r;
      }
      double c_rest = 0.0;
      for (int u = 1; u < K; ++u) {
        c[u - 1] = signed_mass[u];
        c_rest += signed_mass[u];
      }

      lp::Result sol;
      try {
        sol = lp::maximize(c, A, b);
      } catch (const NumericError& e) {
        throw NumericError(std::string("dual_certificate: LP failure on support of "
                                       "a condition group: ") +
                           e.what());
      }
      group_value = sol.value - D * c_rest;
      for (int u = 1; u < K; ++u) pot.h[u] = sol.x[u - 1] - D;
    }
    cert.dual_value += g.weight * group_value;
    cert.potentials.push_back(std::move(pot));
  }

  cert.primal_value = conditional_wasserstein(mu, nu, 1.0, cond_tol).value;
  cert.gap = std::abs(cert.dual_value - cert.primal_value);
  return cert;
}

} // namespace condot
