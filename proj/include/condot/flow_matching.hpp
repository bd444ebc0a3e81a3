#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "condot/measures.hpp"
#include "condot/nn.hpp"
#include "condot/rng.hpp"

namespace condot {

// Batch pairing strategies for velocity regression:
//   independent    - keep the sampled (z, (y,x)) index alignment
//   ot             - re-pair by exact assignment on ||x - z||^2
//   diagonal_bayes - keep alignment; conditions ride along unchanged
//   ot_bayes       - re-pair by assignment on the relaxed product cost
//                    ||x - z||^2 + beta * ||y_i - y_j||^2 (strict forbids
//                    any cross-condition pairing)
enum class CouplingKind { independent, ot, diagonal_bayes, ot_bayes };

struct CouplingMode {
  CouplingKind kind = CouplingKind::diagonal_bayes;
  double beta = 0.0;
  bool strict = false;

  void validate() const {
    if (kind == CouplingKind::ot_bayes && !strict && !(beta > 0.0))
      throw ValidationError("CouplingMode: ot_bayes needs beta > 0 or strict");
    if (!(beta >= 0.0)) throw ValidationError("CouplingMode: beta must be >= 0");
  }
};

CouplingKind coupling_kind_from_string(const std::string& s);
std::string to_string(CouplingKind kind);

// Rows are samples; z is the latent block, (y, x) the data block.
struct PairBatch {
  Eigen::MatrixXd z, y, x;
  int size() const { return static_cast<int>(z.rows()); }
};

// Re-pairs a batch according to the mode. Only the pairing changes: the
// multisets of z rows and of (y, x) rows are preserved. Exact assignment
// only, batches above 1024 are rejected for the ot modes.
PairBatch make_batch_pairs(const PairBatch& batch, const CouplingMode& mode,
                           double cond_tol = kConditionTol);

struct TrainingTargets {
  Eigen::VectorXd t;
  Eigen::MatrixXd y;      // conditions, unchanged
  Eigen::MatrixXd x_t;    // (1-t) z + t x per row
  Eigen::MatrixXd target; // x - z per row
};

TrainingTargets training_targets(const PairBatch& paired,
                                 const Eigen::VectorXd& t);

struct Dataset {
  Eigen::MatrixXd ys, xs; // rows are samples
  int size() const { return static_cast<int>(ys.rows()); }
};

struct TrainConfig {
  CouplingMode mode;
  int coupling_batch = 500; // pairing is computed on batches of this size
  int grad_batch = 100;     // gradient steps use batches of this size
  int iterations = 20000;   // gradient steps
  double lr = 1e-3;
  int val_every = 250;
  std::vector<int> hidden = {256, 256, 256};
  uint64_t seed = 0;
  int euler_steps = 10; // recorded for downstream sampling

  void validate(const Dataset& train, const Dataset& val) const;
};

struct CurvePoint {
  int iter = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct TrainResult {
  VelocityModel model;      // parameters with the best validation loss
  VelocityModel final_model;
  double best_val_loss = 0.0;
  std::vector<CurvePoint> curve;
};

// Stochastic minimization of the selected objective with Adam; model
// selection by best validation loss; deterministic for a fixed seed.
TrainResult train(const TrainConfig& cfg, const Dataset& train_data,
                  const Dataset& val_data);

// Draws z ~ N(0, I) per sample and integrates dx/dt = v(t, y, x) with
// explicit Euler from t=0 to t=1; the condition is held fixed throughout.
// Returns one row per sample.
Eigen::MatrixXd sample_posterior(const VelocityModel& model,
                                 const Eigen::VectorXd& y, int n_samples,
                                 int euler_steps, Rng& rng);

// Assembles model inputs (one column per sample) from (t, y, x_t) rows.
Eigen::MatrixXd assemble_inputs(const VelocityModel& model,
                                const Eigen::VectorXd& t,
                                const Eigen::MatrixXd& y,
                                const Eigen::MatrixXd& x_t);

} // namespace condot
