#include "condot/nn.hpp"

#include <cmath>

#include "condot/rng.hpp"

namespace condot {

Eigen::VectorXd time_features(double t) {
  Eigen::VectorXd f(kTimeFeatures);
  f[0] = t;
  const double two_pi = 6.283185307179586476925287;
  for (int k = 1; k <= 4; ++k) {
    f[2 * k - 1] = std::sin(two_pi * k * t);
    f[2 * k] = std::cos(two_pi * k * t);
  }
  return f;
}

VelocityModel VelocityModel::create(int dim_y, int dim_x,
                                    std::vector<int> hidden, uint64_t seed) {
  if (dim_y < 1 || dim_x < 1)
    throw ValidationError("VelocityModel: dimensions must be >= 1");
  for (int h : hidden)
    if (h < 1) throw ValidationError("VelocityModel: hidden width must be >= 1");

  VelocityModel m;
  m.dim_y = dim_y;
  m.dim_x = dim_x;
  m.hidden = std::move(hidden);

  std::vector<int> widths;
  widths.push_back(m.input_dim());
  for (int h : m.hidden) widths.push_back(h);
  widths.push_back(dim_x);

  Rng rng(seed);
  const int L = static_cast<int>(widths.size()) - 1;
  for (int l = 0; l < L; ++l) {
    const int fan_in = widths[l], fan_out = widths[l + 1];
    Eigen::MatrixXd W(fan_out, fan_in);
    const double a = std::sqrt(6.0 / (fan_in + fan_out));
    const bool last = l == L - 1;
    for (int r = 0; r < fan_out; ++r)
      for (int c = 0; c < fan_in; ++c)
        W(r, c) = last ? 0.0 : rng.uniform(-a, a);
    m.W.push_back(std::move(W));
    m.b.push_back(Eigen::VectorXd::Zero(fan_out));
  }
  return m;
}

int64_t VelocityModel::parameter_count() const {
  int64_t n = 0;
  for (size_t l = 0; l < W.size(); ++l) n += W[l].size() + b[l].size();
  return n;
}

Eigen::VectorXd model_input(const VelocityModel& model, double t,
                            const Eigen::VectorXd& y,
                            const Eigen::VectorXd& x) {
  if (y.size() != model.dim_y || x.size() != model.dim_x)
    throw ValidationError("model_input: dimension mismatch");
  Eigen::VectorXd in(model.input_dim());
  in.head(kTimeFeatures) = time_features(t);
  in.segment(kTimeFeatures, model.dim_y) = y;
  in.tail(model.dim_x) = x;
  return in;
}

Eigen::MatrixXd VelocityModel::forward_batch(const Eigen::MatrixXd& inputs) const {
  if (inputs.rows() != input_dim())
    throw ValidationError("forward: input dimension mismatch");
  Eigen::MatrixXd a = inputs;
  const int L = static_cast<int>(W.size());
  for (int l = 0; l < L; ++l) {
    Eigen::MatrixXd z = (W[l] * a).colwise() + b[l];
    a = l + 1 < L ? z.array().tanh().matrix() : z;
  }
  return a;
}

Eigen::VectorXd VelocityModel::forward(double t, const Eigen::VectorXd& y,
                                       const Eigen::VectorXd& x) const {
  return forward_batch(model_input(*this, t, y, x));
}

Eigen::VectorXd VelocityModel::flatten() const {
  Eigen::VectorXd out(parameter_count());
  int64_t at = 0;
  for (size_t l = 0; l < W.size(); ++l) {
    out.segment(at, W[l].size()) =
        Eigen::Map<const Eigen::VectorXd>(W[l].data(), W[l].size());
    at += W[l].size();
    out.segment(at, b[l].size()) = b[l];
    at += b[l].size();
  }
  return out;
}

void VelocityModel::unflatten(const Eigen::VectorXd& params) {
  if (params.size() != parameter_count())
    throw ValidationError("unflatten: parameter count mismatch");
  int64_t at = 0;
  for (size_t l = 0; l < W.size(); ++l) {
    Eigen::Map<Eigen::VectorXd>(W[l].data(), W[l].size()) =
        params.segment(at, W[l].size());
    at += W[l].size();
    b[l] = params.segment(at, b[l].size());
    at += b[l].size();
  }
}

ModelGrad ModelGrad::zeros_like(const VelocityModel& m) {
  ModelGrad g;
  for (size_t l = 0; l < m.W.size(); ++l) {
    g.dW.push_back(Eigen::MatrixXd::Zero(m.W[l].rows(), m.W[l].cols()));
    g.db.push_back(Eigen::VectorXd::Zero(m.b[l].size()));
  }
  return g;
}

Eigen::VectorXd ModelGrad::flatten() const {
  int64_t total = 0;
  for (size_t l = 0; l < dW.size(); ++l) total += dW[l].size() + db[l].size();
  Eigen::VectorXd out(total);
  int64_t at = 0;
  for (size_t l = 0; l < dW.size(); ++l) {
    out.segment(at, dW[l].size()) =
        Eigen::Map<const Eigen::VectorXd>(dW[l].data(), dW[l].size());
    at += dW[l].size();
    out.segment(at, db[l].size()) = db[l];
    at += db[l].size();
  }
  return out;
}

double loss_and_grad(const VelocityModel& model, const Eigen::MatrixXd& inputs,
                     const Eigen::MatrixXd& targets, ModelGrad* grad) {
  const int B = static_cast<int>(inputs.cols());
  if (B == 0) throw ValidationError("loss_and_grad: empty batch");
  if (targets.cols() != B || targets.rows() != model.dim_x)
    throw ValidationError("loss_and_grad: target shape mismatch");
  if (inputs.rows() != model.input_dim())
    throw ValidationError("loss_and_grad: input dimension mismatch");

  const int L = static_cast<int>(model.W.size());
  std::vector<Eigen::MatrixXd> acts(L + 1);
  acts[0] = inputs;
  for (int l = 0; l < L; ++l) {
    Eigen::MatrixXd z = (model.W[l] * acts[l]).colwise() + model.b[l];
    acts[l + 1] = l + 1 < L ? z.array().tanh().matrix() : z;
  }

  const Eigen::MatrixXd diff = acts[L] - targets;
  const double loss = diff.squaredNorm() / B;

  if (grad) {
    if (grad->dW.empty()) *grad = ModelGrad::zeros_like(model);
    Eigen::MatrixXd delta = (2.0 / B) * diff; // d loss / d output
    for (int l = L - 1; l >= 0; --l) {
      grad->dW[l].noalias() = delta * acts[l].transpose();
      grad->db[l] = delta.rowwise().sum();
      if (l > 0) {
        // tanh'(z) = 1 - tanh(z)^2, and acts[l] stores tanh(z)
        delta = (model.W[l].transpose() * delta).array() *
                (1.0 - acts[l].array().square());
      }
    }
  }
  return loss;
}

double loss_only(const VelocityModel& model, const Eigen::MatrixXd& inputs,
                 const Eigen::MatrixXd& targets) {
  return loss_and_grad(model, inputs, targets, nullptr);
}

void sgd_step(VelocityModel& model, const ModelGrad& grad, double lr) {
  for (size_t l = 0; l < model.W.size(); ++l) {
    model.W[l] -= lr * grad.dW[l];
    model.b[l] -= lr * grad.db[l];
  }
}

AdamState AdamState::zeros_like(const VelocityModel& m) {
  AdamState s;
  for (size_t l = 0; l < m.W.size(); ++l) {
    s.mW.push_back(Eigen::MatrixXd::Zero(m.W[l].rows(), m.W[l].cols()));
    s.vW.push_back(Eigen::MatrixXd::Zero(m.W[l].rows(), m.W[l].cols()));
    s.mb.push_back(Eigen::VectorXd::Zero(m.b[l].size()));
    s.vb.push_back(Eigen::VectorXd::Zero(m.b[l].size()));
  }
  return s;
}

void adam_step(VelocityModel& model, const ModelGrad& grad, AdamState& state,
               double lr, double beta1, double beta2, double eps) {
  state.step += 1;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
  for (size_t l = 0; l < model.W.size(); ++l) {
    state.mW[l] = beta1 * state.mW[l] + (1.0 - beta1) * grad.dW[l];
    state.vW[l] =
        beta2 * state.vW[l].array() + (1.0 - beta2) * grad.dW[l].array().square();
    state.mb[l] = beta1 * state.mb[l] + (1.0 - beta1) * grad.db[l];
    state.vb[l] =
        beta2 * state.vb[l].array() + (1.0 - beta2) * grad.db[l].array().square();
    model.W[l].array() -= lr * (state.mW[l].array() / bc1) /
                          ((state.vW[l].array() / bc2).sqrt() + eps);
    model.b[l].array() -= lr * (state.mb[l].array() / bc1) /
                          ((state.vb[l].array() / bc2).sqrt() + eps);
  }
}

} // namespace condot
