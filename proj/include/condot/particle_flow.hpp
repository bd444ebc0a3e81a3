#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "condot/measures.hpp"
#include "condot/sinkhorn.hpp"

namespace condot {

// Gradient descent on particle payloads minimizing the debiased entropic
// divergence to a labeled target under the relaxed cost. Labels (conditions)
// are copied from the target and never move.
struct ParticleFlowConfig {
  double beta = 5.0;
  double epsilon = 0.3;
  double eta = 0.5;       // step size on the mass-preconditioned gradient
  int iterations = 500;
  uint64_t seed = 0;
  int record_every = 1;   // trajectory snapshot cadence
  DiscreteJointMeasure target;

  void validate() const;
};

struct ParticleFlowResult {
  Eigen::MatrixXd labels;               // fixed conditions, one row per particle
  std::vector<Eigen::MatrixXd> trajectory; // particle payloads per snapshot
  Eigen::MatrixXd particles;            // final payloads
  std::vector<double> divergence;       // per-iteration objective values
  bool aborted = false;                 // Sinkhorn failed to converge
  int completed_iterations = 0;
};

ParticleFlowResult run_particle_flow(const ParticleFlowConfig& cfg);

// Fraction of particles whose nearest target conditional (by mean squared
// payload distance to the class cloud) carries the particle's own label.
double label_purity(const Eigen::MatrixXd& labels,
                    const Eigen::MatrixXd& particles,
                    const DiscreteJointMeasure& target,
                    double cond_tol = kConditionTol);

// Two-class 2-D toy target: class-conditional Gaussians at (+sep, 0) and
// (-sep, 0) with labels y in {0, 1}.
DiscreteJointMeasure make_two_class_toy(int per_class, double sep, double std_dev,
                                        uint64_t seed);

} // namespace condot
