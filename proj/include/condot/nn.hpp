#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "condot/errors.hpp"

namespace condot {

// Input layout: [t, sin(2*pi*k*t), cos(2*pi*k*t) for k=1..4, y, x].
inline constexpr int kTimeFeatures = 9;

Eigen::VectorXd time_features(double t);

// Fully connected velocity model with tanh hidden layers and a linear output
// of dimension dim_x: the field acts on the payload block only, the condition
// velocity is identically zero by construction.
struct VelocityModel {
  int dim_y = 0, dim_x = 0;
  std::vector<int> hidden;
  std::vector<Eigen::MatrixXd> W; // W[l]: rows = layer output, cols = input
  std::vector<Eigen::VectorXd> b;

  // Scaled-uniform (Glorot) init per layer; the final layer is zeroed so the
  // initial flow is the identity.
  static VelocityModel create(int dim_y, int dim_x, std::vector<int> hidden,
                              uint64_t seed);

  int input_dim() const { return kTimeFeatures + dim_y + dim_x; }
  int64_t parameter_count() const;

  Eigen::VectorXd forward(double t, const Eigen::VectorXd& y,
                          const Eigen::VectorXd& x) const;

  // Batched evaluation; inputs and outputs hold one column per sample.
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& inputs) const;

  // Flat parameter access (layer-major W then b), for checkpoints and probes.
  Eigen::VectorXd flatten() const;
  void unflatten(const Eigen::VectorXd& params);
};

// Assembles the model input column for one sample.
Eigen::VectorXd model_input(const VelocityModel& model, double t,
                            const Eigen::VectorXd& y, const Eigen::VectorXd& x);

struct ModelGrad {
  std::vector<Eigen::MatrixXd> dW;
  std::vector<Eigen::VectorXd> db;

  static ModelGrad zeros_like(const VelocityModel& m);
  Eigen::VectorXd flatten() const;
};

// Mean squared error over the batch, 1/B sum_b ||out_b - target_b||^2, and
// its exact reverse-mode parameter gradient. Columns are samples.
double loss_and_grad(const VelocityModel& model, const Eigen::MatrixXd& inputs,
                     const Eigen::MatrixXd& targets, ModelGrad* grad);

double loss_only(const VelocityModel& model, const Eigen::MatrixXd& inputs,
                 const Eigen::MatrixXd& targets);

void sgd_step(VelocityModel& model, const ModelGrad& grad, double lr);

struct AdamState {
  std::vector<Eigen::MatrixXd> mW, vW;
  std::vector<Eigen::VectorXd> mb, vb;
  int64_t step = 0;

  static AdamState zeros_like(const VelocityModel& m);
};

void adam_step(VelocityModel& model, const ModelGrad& grad, AdamState& state,
               double lr = 1e-3, double beta1 = 0.9, double beta2 = 0.999,
               double eps = 1e-8);

} // namespace condot
