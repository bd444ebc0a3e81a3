#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "condot/errors.hpp"

namespace condot {

// Weighted atoms (y, x) on a product space: y is the condition block
// (dimension d), x the payload block (dimension m). Rows index atoms.
// Weights are nonnegative and sum to one. Duplicate atoms are allowed and
// never merged.
struct DiscreteJointMeasure {
  Eigen::MatrixXd ys;      // n x d
  Eigen::MatrixXd xs;      // n x m
  Eigen::VectorXd weights; // n, sums to 1 within 1e-12

  int num_atoms() const { return static_cast<int>(weights.size()); }
  int dim_y() const { return static_cast<int>(ys.cols()); }
  int dim_x() const { return static_cast<int>(xs.cols()); }

  // Throws ValidationError when invariants fail.
  void validate() const;
};

// One condition y with its mass under the y-marginal and the conditional
// measure over payloads, stored as atom indices into the owning measure
// plus renormalized conditional weights.
struct ConditionGroup {
  Eigen::VectorXd y;
  double weight = 0.0;
  std::vector<int> atoms;
  Eigen::VectorXd cond_weights;
};

// Exponent p and condition-move penalty beta defining the relaxed cost
//   ||x1 - x2||^p + beta * ||y1 - y2||^p.
// strict encodes beta = infinity: moving mass across conditions is forbidden
// structurally rather than through a large finite penalty.
struct CostSpec {
  double p = 2.0;
  double beta = 0.0;
  bool strict = false;

  void validate() const {
    if (!(p >= 1.0)) throw ValidationError("CostSpec: p must be >= 1");
    if (!(beta >= 0.0)) throw ValidationError("CostSpec: beta must be >= 0");
  }
};

inline constexpr double kConditionTol = 1e-9;

// Partitions atoms into condition groups: atoms whose y lies within tol
// (Euclidean) of a group representative share a group. Group weight is the
// summed atom weight, conditional weights are renormalized. Throws when two
// representatives end up within 2*tol of each other (ambiguous grouping).
std::vector<ConditionGroup> group_by_condition(const DiscreteJointMeasure& mu,
                                               double tol = kConditionTol);

// True iff both measures disintegrate into matching (y, weight) pairs
// within tol. Propagates grouping ambiguity errors.
bool same_condition_marginal(const DiscreteJointMeasure& mu,
                             const DiscreteJointMeasure& nu,
                             double tol = kConditionTol);

// Seeded generator of a measure pair sharing a uniformly weighted y-marginal
// on n_conditions distinct condition points; payload atoms are standard
// normal. Deterministic in the seed.
std::pair<DiscreteJointMeasure, DiscreteJointMeasure>
random_joint_instance(uint64_t seed, int d, int m, int n_conditions,
                      int n_per_condition);

} // namespace condot
