#pragma once

#include <Eigen/Dense>
#include <functional>
#include <ostream>
#include <vector>

#include "condot/ot_exact.hpp"

namespace condot {

// Pushforward of a plan under linear interpolation of paired atoms at time t:
// one atom per plan entry, weight = entry mass.
DiscreteJointMeasure interpolate(const Plan4& plan, double t);

// |W_{2,Y}(mu_s, mu_t) - |s-t| * W_{2,Y}(mu_0, mu_1)| for a y-diagonal plan.
double geodesic_identity_residual(const Plan4& plan, double s, double t);

// Lagrangian velocity samples: per interpolated atom, its position and the
// displacement (target - source) of the generating entry. For y-diagonal
// plans the condition component is identically zero.
struct VelocitySample {
  Eigen::MatrixXd pos_y, pos_x; // one row per plan entry
  Eigen::MatrixXd vel_y, vel_x;
  Eigen::VectorXd mass;

  double l2_norm_sq() const; // discrete L^2(mu_t) norm of the field, squared
};

// Throws NumericError when interpolated atoms from entries with different
// velocities collide (the velocity is not a function there).
VelocitySample velocity_field(const Plan4& plan, double t);

// Integral over t of the squared field norm, in closed form for the
// piecewise-linear interpolation (velocities constant per entry). Requires a
// y-diagonal plan; equals the squared conditional Wasserstein-2 distance for
// optimal plans.
double bb_energy(const Plan4& plan);

// Explicit Euler integration of the plan-defined flow from t=0 to t=1.
DiscreteJointMeasure euler_flow(const Plan4& plan, int steps);

// Explicit Euler integration with a model-defined velocity on the payload
// block; conditions are held fixed.
using VelocityFn = std::function<Eigen::VectorXd(
    double t, const Eigen::VectorXd& y, const Eigen::VectorXd& x)>;
DiscreteJointMeasure euler_flow(const VelocityFn& velocity,
                                const DiscreteJointMeasure& initial, int steps);

// CSV rows: t,atom,y...,x...,vy...,vx...
void dump_trajectories_csv(std::ostream& os, const Plan4& plan,
                           const std::vector<double>& times);

} // namespace condot
