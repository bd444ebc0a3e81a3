#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "condot/measures.hpp"

namespace condot {

// Sparse coupling between the atoms of two joint measures. When y_diagonal
// is set, every entry pairs atoms whose conditions agree within the grouping
// tolerance, i.e. no mass moves across conditions.
struct PlanEntry {
  int i = 0;
  int j = 0;
  double mass = 0.0;
};

struct Plan4 {
  std::shared_ptr<const DiscreteJointMeasure> source, target;
  std::vector<PlanEntry> entries;
  bool y_diagonal = false;

  // Marginal and diagonality invariants. Throws ValidationError.
  void validate(double marginal_tol = 1e-10, double cond_tol = kConditionTol) const;
};

// Matched disintegrations of two measures sharing a y-marginal. Group g pairs
// mu's and nu's conditionals at the same condition point.
struct MatchedGroup {
  Eigen::VectorXd y;
  double weight = 0.0;
  std::vector<int> mu_atoms;
  Eigen::VectorXd mu_weights; // conditional weights, sum 1
  std::vector<int> nu_atoms;
  Eigen::VectorXd nu_weights;
};

struct ConditionMatch {
  std::shared_ptr<const DiscreteJointMeasure> mu, nu;
  std::vector<MatchedGroup> groups;
  double tol = kConditionTol;
};

// Throws ValidationError when the y-marginals do not match within tol.
ConditionMatch match_conditions(const DiscreteJointMeasure& mu,
                                const DiscreteJointMeasure& nu,
                                double tol = kConditionTol);

// Coupling in the three-argument representation: per matched condition group,
// indices into the group's conditional atom lists.
struct Plan3Entry {
  int group = 0;
  int i = 0; // index into MatchedGroup::mu_atoms
  int j = 0; // index into MatchedGroup::nu_atoms
  double mass = 0.0;
};

struct Plan3 {
  std::shared_ptr<const ConditionMatch> match;
  std::vector<Plan3Entry> entries;
};

// --- cost tables -----------------------------------------------------------

// Relaxed cost: ||x_a - x_b||^p + beta * ||y_a - y_b||^p. With spec.strict,
// entries whose conditions differ by more than cond_tol are +infinity.
Eigen::MatrixXd cost_matrix(const Eigen::MatrixXd& ya, const Eigen::MatrixXd& xa,
                            const Eigen::MatrixXd& yb, const Eigen::MatrixXd& xb,
                            const CostSpec& spec,
                            double cond_tol = kConditionTol);

// Plain product-space cost ||(y_a,x_a) - (y_b,x_b)||^p.
Eigen::MatrixXd joint_cost_matrix(const Eigen::MatrixXd& ya, const Eigen::MatrixXd& xa,
                                  const Eigen::MatrixXd& yb, const Eigen::MatrixXd& xb,
                                  double p);

// --- exact solvers ----------------------------------------------------------

struct AssignmentResult {
  std::vector<int> perm; // row i matched to column perm[i]
  double mean_cost = 0.0; // (1/n) sum_i cost(i, perm[i])
};

// Exact minimum-cost assignment on a square table (shortest augmenting
// paths, O(n^3)). +infinity marks forbidden pairs; throws NumericError when
// no finite assignment exists.
AssignmentResult solve_assignment(const Eigen::MatrixXd& cost);

struct TransportResult {
  std::vector<PlanEntry> entries;
  double cost = 0.0; // sum over entries of mass * cost(i, j)
};

// Exact transportation problem for general weights (successive shortest
// paths with potentials). Weight totals must agree within 1e-10.
TransportResult solve_transport(const Eigen::VectorXd& mu_w,
                                const Eigen::VectorXd& nu_w,
                                const Eigen::MatrixXd& cost);

// --- conditional / relaxed distances ----------------------------------------

struct DistanceResult {
  double value = 0.0;   // the distance, p-th root applied
  double value_p = 0.0; // transport cost, i.e. value^p
  Plan4 plan;
};

// Conditional Wasserstein-p distance: groups by condition, solves each
// conditional pair exactly, and assembles the y-diagonal coupling whose
// p-cost is the P_Y-expectation of the conditional W_p^p. p in {1, 2}.
DistanceResult conditional_wasserstein(const DiscreteJointMeasure& mu,
                                       const DiscreteJointMeasure& nu,
                                       double p,
                                       double cond_tol = kConditionTol);

// Exact OT under the relaxed cost over all couplings (finite beta); the
// returned plan carries no diagonality constraint. p in {1, 2}.
DistanceResult relaxed_wasserstein(const DiscreteJointMeasure& mu,
                                   const DiscreteJointMeasure& nu,
                                   const CostSpec& spec);

// Plain Wasserstein-p distance on the product space. p in {1, 2}.
DistanceResult wasserstein_joint(const DiscreteJointMeasure& mu,
                                 const DiscreteJointMeasure& nu, double p);

// Mass-weighted p-th power of the condition displacement of a plan.
double y_leakage(const Plan4& plan, double p);

// Transport cost of a plan under an arbitrary cost choice (for checks).
double plan_cost_joint(const Plan4& plan, double p);
double plan_cost_relaxed(const Plan4& plan, const CostSpec& spec);
double plan_cost_x_only(const Plan4& plan, double p);

// --- plan representation bijection ------------------------------------------

Plan3 plan4_to_plan3(const Plan4& plan, double cond_tol = kConditionTol);
Plan4 plan3_to_plan4(const Plan3& plan);
double plan3_cost(const Plan3& plan, double p); // sum mass * ||x_i - x_j||^p

// --- Kantorovich-Rubinstein dual (p = 1) -------------------------------------

struct CondPotential {
  Eigen::VectorXd y;
  double weight = 0.0;
  Eigen::MatrixXd points; // union of conditional supports, one row per point
  Eigen::VectorXd h;      // potential values on those points
};

struct DualCertificate {
  std::vector<CondPotential> potentials;
  double dual_value = 0.0;
  double primal_value = 0.0;
  double gap = 0.0;

  // max over conditions and point pairs of |h(u)-h(v)| - ||u-v||
  double lipschitz_excess() const;
};

// Solves the per-condition dual linear programs over potentials constrained
// by |h(y,x1) - h(y,x2)| <= ||x1 - x2|| and assembles the global certificate.
DualCertificate dual_certificate(const DiscreteJointMeasure& mu,
                                 const DiscreteJointMeasure& nu,
                                 double cond_tol = kConditionTol);

} // namespace condot
