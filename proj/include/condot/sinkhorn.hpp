#pragma once

#include <Eigen/Dense>

#include "condot/measures.hpp"

namespace condot {

struct SinkhornOptions {
  int max_iter = 2000;
  double tol = 1e-9; // max marginal violation of the implied plan
  int check_every = 10;
};

struct SinkhornResult {
  Eigen::VectorXd f, g;     // dual potentials
  Eigen::MatrixXd plan;     // implied primal plan
  double transport_cost = 0.0; // sum_ij plan_ij * c_ij
  double dual_value = 0.0;     // <f, a> + <g, b>
  int iterations = 0;
  bool converged = false;
  double marginal_violation = 0.0;
};

// Entropic OT with symmetric log-domain updates on the relaxed cost.
// Non-convergence is reported through the flag, not an exception.
SinkhornResult sinkhorn_ot(const DiscreteJointMeasure& mu,
                           const DiscreteJointMeasure& nu,
                           const CostSpec& spec, double epsilon,
                           const SinkhornOptions& opts = {});

// Core solver on an explicit cost table and weight vectors.
SinkhornResult sinkhorn_core(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                             const Eigen::MatrixXd& cost, double epsilon,
                             const SinkhornOptions& opts = {});

// Debiased divergence S_eps = OT_eps(mu,nu) - (OT_eps(mu,mu) + OT_eps(nu,nu))/2,
// assembled from converged dual values.
double sinkhorn_divergence(const DiscreteJointMeasure& mu,
                           const DiscreteJointMeasure& nu, const CostSpec& spec,
                           double epsilon, const SinkhornOptions& opts = {});

// 1e-3 times the mean pairwise relaxed cost between mu and nu.
double default_epsilon(const DiscreteJointMeasure& mu,
                       const DiscreteJointMeasure& nu, const CostSpec& spec);

// Gradient of the divergence with respect to each mu atom position (y block
// then x block, one row per atom), from converged potentials by the envelope
// principle. Throws NumericError when either solve fails to converge.
Eigen::MatrixXd divergence_position_grad(const DiscreteJointMeasure& mu,
                                         const DiscreteJointMeasure& nu,
                                         const CostSpec& spec, double epsilon,
                                         const SinkhornOptions& opts = {});

} // namespace condot
