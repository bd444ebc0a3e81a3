#include "condot/geodesics.hpp"

#include <cmath>
#include <map>

namespace condot {

namespace {

void check_time(double t) {
  if (!(t >= 0.0 && t <= 1.0))
    throw ValidationError("geodesics: t must lie in [0, 1]");
}

} // namespace

DiscreteJointMeasure interpolate(const Plan4& plan, double t) {
  check_time(t);
  const auto& src = *plan.source;
  const auto& tgt = *plan.target;
  const int n = static_cast<int>(plan.entries.size());

  DiscreteJointMeasure out;
  out.ys.resize(n, src.dim_y());
  out.xs.resize(n, src.dim_x());
  out.weights.resize(n);
  for (int k = 0; k < n; ++k) {
    const auto& e = plan.entries[k];
    out.ys.row(k) = (1.0 - t) * src.ys.row(e.i) + t * tgt.ys.row(e.j);
    out.xs.row(k) = (1.0 - t) * src.xs.row(e.i) + t * tgt.xs.row(e.j);
    out.weights[k] = e.mass;
  }
  return out;
}

double geodesic_identity_residual(const Plan4& plan, double s, double t) {
  check_time(s);
  check_time(t);
  const auto end_dist = conditional_wasserstein(*plan.source, *plan.target, 2.0);
  const auto mid_dist =
      conditional_wasserstein(interpolate(plan, s), interpolate(plan, t), 2.0);
  return std::abs(mid_dist.value - std::abs(s - t) * end_dist.value);
}

double VelocitySample::l2_norm_sq() const {
  double total = 0.0;
  for (int k = 0; k < mass.size(); ++k)
    total += mass[k] * (vel_y.row(k).squaredNorm() + vel_x.row(k).squaredNorm());
  return total;
}

VelocitySample velocity_field(const Plan4& plan, double t) {
  check_time(t);
  const auto& src = *plan.source;
  const auto& tgt = *plan.target;
  const int n = static_cast<int>(plan.entries.size());

  VelocitySample out;
  out.pos_y.resize(n, src.dim_y());
  out.pos_x.resize(n, src.dim_x());
  out.vel_y.resize(n, src.dim_y());
  out.vel_x.resize(n, src.dim_x());
  out.mass.resize(n);

  for (int k = 0; k < n; ++k) {
    const auto& e = plan.entries[k];
    out.pos_y.row(k) = (1.0 - t) * src.ys.row(e.i) + t * tgt.ys.row(e.j);
    out.pos_x.row(k) = (1.0 - t) * src.xs.row(e.i) + t * tgt.xs.row(e.j);
    // y-diagonal plans move no condition mass, so that block is structurally 0
    out.vel_y.row(k) = plan.y_diagonal
                           ? Eigen::RowVectorXd::Zero(src.dim_y())
                           : (tgt.ys.row(e.j) - src.ys.row(e.i)).eval();
    out.vel_x.row(k) = tgt.xs.row(e.j) - src.xs.row(e.i);
    out.mass[k] = e.mass;
  }

  // a velocity field must be single-valued at coincident interpolated atoms
  std::map<std::vector<double>, int> seen;
  for (int k = 0; k < n; ++k) {
    std::vector<double> key(src.dim_y() + src.dim_x());
    for (int j = 0; j < src.dim_y(); ++j) key[j] = out.pos_y(k, j);
    for (int j = 0; j < src.dim_x(); ++j) key[src.dim_y() + j] = out.pos_x(k, j);
    auto [it, inserted] = seen.emplace(std::move(key), k);
    if (!inserted) {
      const int other = it->second;
      const double dv = (out.vel_y.row(k) - out.vel_y.row(other)).norm() +
                        (out.vel_x.row(k) - out.vel_x.row(other)).norm();
      if (dv > 1e-12)
        throw NumericError(
            "velocity_field: interpolated atoms collide with different "
            "velocities at t=" + std::to_string(t));
    }
  }
  return out;
}

double bb_energy(const Plan4& plan) {
  if (!plan.y_diagonal)
    throw ValidationError("bb_energy: plan must be y-diagonal");
  // velocities are constant along each entry, so the time integral is the
  // mass-weighted squared displacement
  double total = 0.0;
  for (const auto& e : plan.entries)
    total += e.mass *
             (plan.target->xs.row(e.j) - plan.source->xs.row(e.i)).squaredNorm();
  return total;
}

DiscreteJointMeasure euler_flow(const Plan4& plan, int steps) {
  if (steps < 1) throw ValidationError("euler_flow: steps must be >= 1");
  const auto& src = *plan.source;
  const int n = static_cast<int>(plan.entries.size());

  DiscreteJointMeasure state;
  state.ys.resize(n, src.dim_y());
  state.xs.resize(n, src.dim_x());
  state.weights.resize(n);
  for (int k = 0; k < n; ++k) {
    const auto& e = plan.entries[k];
    state.ys.row(k) = src.ys.row(e.i);
    state.xs.row(k) = src.xs.row(e.i);
    state.weights[k] = e.mass;
  }

  const double h = 1.0 / steps;
  for (int s = 0; s < steps; ++s) {
    // evaluating the field also surfaces trajectory collisions
    const auto field = velocity_field(plan, s * h);
    state.ys += h * field.vel_y;
    state.xs += h * field.vel_x;
  }
  return state;
}

DiscreteJointMeasure euler_flow(const VelocityFn& velocity,
                                const DiscreteJointMeasure& initial, int steps) {
  if (steps < 1) throw ValidationError("euler_flow: steps must be >= 1");
  DiscreteJointMeasure state = initial;
  const double h = 1.0 / steps;
  for (int s = 0; s < steps; ++s) {
    const double t = s * h;
    for (int k = 0; k < state.num_atoms(); ++k) {
      const Eigen::VectorXd v =
          velocity(t, state.ys.row(k).transpose(), state.xs.row(k).transpose());
      if (v.size() != state.dim_x())
        throw ValidationError("euler_flow: velocity dimension mismatch");
      state.xs.row(k) += h * v.transpose();
    }
  }
  return state;
}

void dump_trajectories_csv(std::ostream& os, const Plan4& plan,
                           const std::vector<double>& times) {
  const int d = plan.source->dim_y(), m = plan.source->dim_x();
  os << "t,atom";
  for (int j = 0; j < d; ++j) os << ",y" << j;
  for (int j = 0; j < m; ++j) os << ",x" << j;
  for (int j = 0; j < d; ++j) os << ",vy" << j;
  for (int j = 0; j < m; ++j) os << ",vx" << j;
  os << "\n";
  os.precision(17);
  for (const double t : times) {
    const auto field = velocity_field(plan, t);
    for (int k = 0; k < field.mass.size(); ++k) {
      os << t << "," << k;
      for (int j = 0; j < d; ++j) os << "," << field.pos_y(k, j);
      for (int j = 0; j < m; ++j) os << "," << field.pos_x(k, j);
      for (int j = 0; j < d; ++j) os << "," << field.vel_y(k, j);
      for (int j = 0; j < m; ++j) os << "," << field.vel_x(k, j);
      os << "\n";
    }
  }
}

} // namespace condot
