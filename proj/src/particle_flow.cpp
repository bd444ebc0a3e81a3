#include "condot/particle_flow.hpp"

#include <cmath>

#include "condot/ot_exact.hpp"
#include "condot/rng.hpp"

namespace condot {

void ParticleFlowConfig::validate() const {
  if (!(eta > 0.0)) throw ValidationError("particle_flow: eta must be > 0");
  if (iterations < 1) throw ValidationError("particle_flow: iterations >= 1");
  if (!(epsilon > 0.0)) throw ValidationError("particle_flow: epsilon > 0");
  if (!(beta >= 0.0)) throw ValidationError("particle_flow: beta >= 0");
  if (record_every < 1) throw ValidationError("particle_flow: record_every >= 1");
  target.validate();
  group_by_condition(target); // finitely many conditions, unambiguous
}

ParticleFlowResult run_particle_flow(const ParticleFlowConfig& cfg) {
  cfg.validate();
  const auto& tgt = cfg.target;
  const int n = tgt.num_atoms();
  const int m = tgt.dim_x();

  ParticleFlowResult res;
  res.labels = tgt.ys;

  Rng rng(cfg.seed);
  Eigen::MatrixXd z(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) z(i, j) = rng.normal();

  const CostSpec spec{2.0, cfg.beta, false};
  SinkhornOptions opts;
  opts.max_iter = 2000;
  opts.tol = 1e-8;

  // the target self term of the divergence is constant along the flow
  double tgt_self = 0.0;
  {
    const auto bb = sinkhorn_ot(tgt, tgt, spec, cfg.epsilon, opts);
    if (!bb.converged) {
      res.aborted = true;
      res.particles = z;
      return res;
    }
    tgt_self = bb.dual_value;
  }

  DiscreteJointMeasure particles;
  particles.ys = res.labels;
  particles.weights = Eigen::VectorXd::Constant(n, 1.0 / n);

  for (int it = 0; it < cfg.iterations; ++it) {
    particles.xs = z;
    SinkhornResult ab, aa;
    try {
      ab = sinkhorn_ot(particles, tgt, spec, cfg.epsilon, opts);
      aa = sinkhorn_ot(particles, particles, spec, cfg.epsilon, opts);
    } catch (const NumericError&) {
      res.aborted = true;
      break;
    }
    if (!ab.converged || !aa.converged) {
      res.aborted = true;
      break;
    }
    res.divergence.push_back(ab.dual_value - 0.5 * aa.dual_value -
                             0.5 * tgt_self);

    // envelope gradient of the divergence wrt payloads; labels have zero
    // velocity because only the x block is applied
    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(n, m);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        grad.row(i) += ab.plan(i, j) * 2.0 * (z.row(i) - tgt.xs.row(j));
        grad.row(i) -= 0.5 * (aa.plan(i, j) + aa.plan(j, i)) * 2.0 *
                       (z.row(i) - z.row(j));
      }
    }
    // mass preconditioning: atom i carries mass 1/n, its flow velocity is
    // the gradient per unit mass
    z -= cfg.eta * static_cast<double>(n) * grad;

    res.completed_iterations = it + 1;
    if ((it + 1) % cfg.record_every == 0) res.trajectory.push_back(z);
  }
  res.particles = z;
  return res;
}

double label_purity(const Eigen::MatrixXd& labels,
                    const Eigen::MatrixXd& particles,
                    const DiscreteJointMeasure& target, double cond_tol) {
  const auto groups = group_by_condition(target, cond_tol);
  const int n = static_cast<int>(particles.rows());

  int correct = 0;
  for (int i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    int best_g = -1;
    for (size_t g = 0; g < groups.size(); ++g) {
      double mean_sq = 0.0;
      for (int a : groups[g].atoms)
        mean_sq += (particles.row(i) - target.xs.row(a)).squaredNorm();
      mean_sq /= static_cast<double>(groups[g].atoms.size());
      if (mean_sq < best) {
        best = mean_sq;
        best_g = static_cast<int>(g);
      }
    }
    if ((groups[best_g].y.transpose() - labels.row(i)).norm() <= cond_tol)
      ++correct;
  }
  return static_cast<double>(correct) / n;
}

DiscreteJointMeasure make_two_class_toy(int per_class, double sep,
                                        double std_dev, uint64_t seed) {
  if (per_class < 1) throw ValidationError("toy: per_class must be >= 1");
  Rng rng(seed);
  const int n = 2 * per_class;
  DiscreteJointMeasure out;
  out.ys.resize(n, 1);
  out.xs.resize(n, 2);
  out.weights = Eigen::VectorXd::Constant(n, 1.0 / n);
  for (int c = 0; c < 2; ++c) {
    const double cx = c == 0 ? sep : -sep;
    for (int i = 0; i < per_class; ++i) {
      const int row = c * per_class + i;
      out.ys(row, 0) = static_cast<double>(c);
      out.xs(row, 0) = cx + std_dev * rng.normal();
      out.xs(row, 1) = std_dev * rng.normal();
    }
  }
  return out;
}

} // namespace condot
