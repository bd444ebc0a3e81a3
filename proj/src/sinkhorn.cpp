#include "condot/sinkhorn.hpp"

#include <cmath>
#include <limits>

#include "condot/ot_exact.hpp"

namespace condot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// rowwise log-sum-exp, tolerant of -inf entries (zeroed terms)
Eigen::VectorXd lse_rows(const Eigen::MatrixXd& M) {
  const int n = static_cast<int>(M.rows());
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) {
    const double mx = M.row(i).maxCoeff();
    if (!std::isfinite(mx)) {
      if (mx == -kInf)
        throw NumericError("sinkhorn: atom with no finite-cost partner");
      throw NumericError("sinkhorn: non-finite kernel row");
    }
    double s = 0.0;
    for (int j = 0; j < M.cols(); ++j) {
      const double v = M(i, j);
      if (v != -kInf) s += std::exp(v - mx);
    }
    out[i] = mx + std::log(s);
  }
  return out;
}

Eigen::VectorXd safe_log(const Eigen::VectorXd& w) {
  Eigen::VectorXd out(w.size());
  for (int i = 0; i < w.size(); ++i) {
    if (!(w[i] > 0.0))
      throw ValidationError("sinkhorn: weights must be strictly positive");
    out[i] = std::log(w[i]);
  }
  return out;
}

} // namespace

SinkhornResult sinkhorn_core(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                             const Eigen::MatrixXd& cost, double epsilon,
                             const SinkhornOptions& opts) {
  if (!(epsilon > 0.0)) throw ValidationError("sinkhorn: epsilon must be > 0");
  const int n = static_cast<int>(a.size());
  const int m = static_cast<int>(b.size());
  if (cost.rows() != n || cost.cols() != m)
    throw ValidationError("sinkhorn: cost shape mismatch");

  const Eigen::VectorXd la = safe_log(a), lb = safe_log(b);

  SinkhornResult res;
  res.f = Eigen::VectorXd::Zero(n);
  res.g = Eigen::VectorXd::Zero(m);

  auto implied_plan = [&](Eigen::MatrixXd* plan) {
    plan->resize(n, m);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) {
        const double e =
            (res.f[i] + res.g[j] - cost(i, j)) / epsilon + la[i] + lb[j];
        (*plan)(i, j) = e == -kInf ? 0.0 : std::exp(e);
      }
  };

  Eigen::MatrixXd plan;
  for (res.iterations = 0; res.iterations < opts.max_iter; ++res.iterations) {
    // symmetric half-step updates in the log domain
    Eigen::MatrixXd Mf =
        ((res.g.transpose().replicate(n, 1) - cost) / epsilon).rowwise() +
        lb.transpose();
    Eigen::VectorXd f_new = -epsilon * lse_rows(Mf);
    Eigen::MatrixXd Mg =
        ((res.f.replicate(1, m) - cost) / epsilon).colwise() + la;
    Eigen::VectorXd g_new = -epsilon * lse_rows(Mg.transpose());
    res.f = 0.5 * (res.f + f_new);
    res.g = 0.5 * (res.g + g_new);

    if ((res.iterations + 1) % opts.check_every == 0 ||
        res.iterations + 1 == opts.max_iter) {
      implied_plan(&plan);
      const double viol =
          std::max((plan.rowwise().sum() - a).lpNorm<Eigen::Infinity>(),
                   (plan.colwise().sum().transpose() - b).lpNorm<Eigen::Infinity>());
      res.marginal_violation = viol;
      if (viol < opts.tol) {
        res.converged = true;
        ++res.iterations;
        break;
      }
    }
  }
  if (plan.size() == 0) implied_plan(&plan);

  res.transport_cost = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      if (plan(i, j) > 0.0) res.transport_cost += plan(i, j) * cost(i, j);
  res.dual_value = res.f.dot(a) + res.g.dot(b);
  res.plan = std::move(plan);
  return res;
}

SinkhornResult sinkhorn_ot(const DiscreteJointMeasure& mu,
                           const DiscreteJointMeasure& nu,
                           const CostSpec& spec, double epsilon,
                           const SinkhornOptions& opts) {
  mu.validate();
  nu.validate();
  return sinkhorn_core(mu.weights, nu.weights,
                       cost_matrix(mu.ys, mu.xs, nu.ys, nu.xs, spec), epsilon,
                       opts);
}

double default_epsilon(const DiscreteJointMeasure& mu,
                       const DiscreteJointMeasure& nu, const CostSpec& spec) {
  const Eigen::MatrixXd C = cost_matrix(mu.ys, mu.xs, nu.ys, nu.xs, spec);
  double sum = 0.0;
  int count = 0;
  for (int i = 0; i < C.rows(); ++i)
    for (int j = 0; j < C.cols(); ++j)
      if (std::isfinite(C(i, j))) {
        sum += C(i, j);
        ++count;
      }
  if (count == 0) throw ValidationError("default_epsilon: no finite costs");
  return 1e-3 * sum / count;
}

double sinkhorn_divergence(const DiscreteJointMeasure& mu,
                           const DiscreteJointMeasure& nu, const CostSpec& spec,
                           double epsilon, const SinkhornOptions& opts) {
  const auto ab = sinkhorn_ot(mu, nu, spec, epsilon, opts);
  const auto aa = sinkhorn_ot(mu, mu, spec, epsilon, opts);
  const auto bb = sinkhorn_ot(nu, nu, spec, epsilon, opts);
  return ab.dual_value - 0.5 * (aa.dual_value + bb.dual_value);
}

Eigen::MatrixXd divergence_position_grad(const DiscreteJointMeasure& mu,
                                         const DiscreteJointMeasure& nu,
                                         const CostSpec& spec, double epsilon,
                                         const SinkhornOptions& opts) {
  spec.validate();
  if (spec.p != 1.0 && spec.p != 2.0)
    throw ValidationError("divergence_position_grad: p in {1, 2} only");
  const auto ab = sinkhorn_ot(mu, nu, spec, epsilon, opts);
  const auto aa = sinkhorn_ot(mu, mu, spec, epsilon, opts);
  if (!ab.converged || !aa.converged)
    throw NumericError("divergence_position_grad: potentials not converged");

  const int n = mu.num_atoms();
  const int d = mu.dim_y(), m = mu.dim_x();
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(n, d + m);

  // d/dp_i of c(p_i, q) for the relaxed cost, split into y and x blocks
  auto add_grad = [&](int i, const Eigen::RowVectorXd& qy,
                      const Eigen::RowVectorXd& qx, double mass) {
    if (mass == 0.0) return;
    Eigen::RowVectorXd dy = mu.ys.row(i) - qy;
    Eigen::RowVectorXd dx = mu.xs.row(i) - qx;
    if (spec.p == 2.0) {
      grad.row(i).head(d) += mass * spec.beta * 2.0 * dy;
      grad.row(i).tail(m) += mass * 2.0 * dx;
    } else {
      const double ny = dy.norm(), nx = dx.norm();
      if (ny > 0.0) grad.row(i).head(d) += mass * spec.beta * dy / ny;
      if (nx > 0.0) grad.row(i).tail(m) += mass * dx / nx;
    }
  };

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < nu.num_atoms(); ++j)
      add_grad(i, nu.ys.row(j), nu.xs.row(j), ab.plan(i, j));
    for (int j = 0; j < n; ++j)
      add_grad(i, mu.ys.row(j), mu.xs.row(j),
               -0.5 * (aa.plan(i, j) + aa.plan(j, i)));
  }
  return grad;
}

} // namespace condot
