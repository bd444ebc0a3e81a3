#include "condot/flow_matching.hpp"

#include <cmath>

#include "condot/ot_exact.hpp"

namespace condot {

CouplingKind coupling_kind_from_string(const std::string& s) {
  if (s == "independent") return CouplingKind::independent;
  if (s == "ot") return CouplingKind::ot;
  if (s == "diagonal-bayes") return CouplingKind::diagonal_bayes;
  if (s == "ot-bayes") return CouplingKind::ot_bayes;
  throw ValidationError("unknown coupling mode: " + s);
}

std::string to_string(CouplingKind kind) {
  switch (kind) {
    case CouplingKind::independent: return "independent";
    case CouplingKind::ot: return "ot";
    case CouplingKind::diagonal_bayes: return "diagonal-bayes";
    case CouplingKind::ot_bayes: return "ot-bayes";
  }
  return "?";
}

PairBatch make_batch_pairs(const PairBatch& batch, const CouplingMode& mode,
                           double cond_tol) {
  mode.validate();
  const int n = batch.size();
  if (n < 1) throw ValidationError("make_batch_pairs: empty batch");
  if (batch.y.rows() != n || batch.x.rows() != n)
    throw ValidationError("make_batch_pairs: block row mismatch");
  if (batch.z.cols() != batch.x.cols())
    throw ValidationError("make_batch_pairs: z and x dimensions differ");

  if (mode.kind == CouplingKind::independent ||
      mode.kind == CouplingKind::diagonal_bayes)
    return batch;

  if (n > 1024)
    throw ValidationError(
        "make_batch_pairs: batch too large for the exact assignment solver");

  Eigen::MatrixXd C(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double c = (batch.z.row(i) - batch.x.row(j)).squaredNorm();
      if (mode.kind == CouplingKind::ot_bayes) {
        const double dy2 = (batch.y.row(i) - batch.y.row(j)).squaredNorm();
        if (mode.strict) {
          if (std::sqrt(dy2) > cond_tol)
            c = std::numeric_limits<double>::infinity();
        } else {
          c += mode.beta * dy2;
        }
      }
      C(i, j) = c;
    }

  const auto sol = solve_assignment(C);
  PairBatch out;
  out.z = batch.z;
  out.y.resize(n, batch.y.cols());
  out.x.resize(n, batch.x.cols());
  for (int i = 0; i < n; ++i) {
    out.y.row(i) = batch.y.row(sol.perm[i]);
    out.x.row(i) = batch.x.row(sol.perm[i]);
  }
  return out;
}

TrainingTargets training_targets(const PairBatch& paired,
                                 const Eigen::VectorXd& t) {
  const int n = paired.size();
  if (t.size() != n)
    throw ValidationError("training_targets: one t per pair required");
  for (int i = 0; i < n; ++i)
    if (!(t[i] >= 0.0 && t[i] <= 1.0))
      throw ValidationError("training_targets: t must lie in [0, 1]");

  TrainingTargets out;
  out.t = t;
  out.y = paired.y;
  out.x_t.resize(n, paired.x.cols());
  out.target = paired.x - paired.z;
  for (int i = 0; i < n; ++i)
    out.x_t.row(i) = (1.0 - t[i]) * paired.z.row(i) + t[i] * paired.x.row(i);
  return out;
}

Eigen::MatrixXd assemble_inputs(const VelocityModel& model,
                                const Eigen::VectorXd& t,
                                const Eigen::MatrixXd& y,
                                const Eigen::MatrixXd& x_t) {
  const int n = static_cast<int>(t.size());
  Eigen::MatrixXd in(model.input_dim(), n);
  for (int i = 0; i < n; ++i) {
    in.col(i).head(kTimeFeatures) = time_features(t[i]);
    in.col(i).segment(kTimeFeatures, model.dim_y) = y.row(i).transpose();
    in.col(i).tail(model.dim_x) = x_t.row(i).transpose();
  }
  return in;
}

void TrainConfig::validate(const Dataset& train, const Dataset& val) const {
  mode.validate();
  if (iterations < 0) throw ValidationError("train: iterations must be >= 0");
  if (coupling_batch < 1 || grad_batch < 1)
    throw ValidationError("train: batch sizes must be >= 1");
  if (grad_batch > coupling_batch)
    throw ValidationError("train: grad_batch cannot exceed coupling_batch");
  if (train.size() < coupling_batch || val.size() < 1)
    throw ValidationError("train: dataset smaller than the coupling batch");
  if (val_every < 1) throw ValidationError("train: val_every must be >= 1");
  if (euler_steps < 1) throw ValidationError("train: euler_steps must be >= 1");
}

namespace {

PairBatch draw_coupled_batch(const Dataset& data, int batch, int dim_x,
                             const CouplingMode& mode, Rng& rng) {
  PairBatch raw;
  raw.z.resize(batch, dim_x);
  raw.y.resize(batch, data.ys.cols());
  raw.x.resize(batch, dim_x);
  for (int i = 0; i < batch; ++i) {
    const int idx = static_cast<int>(rng.uniform_int(data.size()));
    raw.y.row(i) = data.ys.row(idx);
    raw.x.row(i) = data.xs.row(idx);
    for (int j = 0; j < dim_x; ++j) raw.z(i, j) = rng.normal();
  }
  return make_batch_pairs(raw, mode);
}

} // namespace

TrainResult train(const TrainConfig& cfg, const Dataset& train_data,
                  const Dataset& val_data) {
  cfg.validate(train_data, val_data);
  const int d = static_cast<int>(train_data.ys.cols());
  const int m = static_cast<int>(train_data.xs.cols());

  Rng root(cfg.seed);
  Rng model_rng = root.split(0);
  Rng batch_rng = root.split(1);
  Rng t_rng = root.split(2);
  Rng val_rng = root.split(3);

  VelocityModel model =
      VelocityModel::create(d, m, cfg.hidden, model_rng.uniform_int(1ull << 62));

  // Fixed validation pack: pairing and times are drawn once so successive
  // evaluations are comparable.
  Eigen::MatrixXd val_in, val_tgt;
  {
    const int nv = val_data.size();
    std::vector<TrainingTargets> packs;
    int done = 0;
    while (done < nv) {
      const int b = std::min(cfg.coupling_batch, nv - done);
      PairBatch raw;
      raw.z.resize(b, m);
      raw.y = val_data.ys.middleRows(done, b);
      raw.x = val_data.xs.middleRows(done, b);
      for (int i = 0; i < b; ++i)
        for (int j = 0; j < m; ++j) raw.z(i, j) = val_rng.normal();
      PairBatch paired = make_batch_pairs(raw, cfg.mode);
      Eigen::VectorXd t(b);
      for (int i = 0; i < b; ++i) t[i] = val_rng.uniform();
      packs.push_back(training_targets(paired, t));
      done += b;
    }
    val_in.resize(model.input_dim(), nv);
    val_tgt.resize(m, nv);
    int at = 0;
    for (const auto& p : packs) {
      const int b = static_cast<int>(p.t.size());
      val_in.middleCols(at, b) = assemble_inputs(model, p.t, p.y, p.x_t);
      val_tgt.middleCols(at, b) = p.target.transpose();
      at += b;
    }
  }

  TrainResult out;
  out.best_val_loss = loss_only(model, val_in, val_tgt);
  out.model = model;

  AdamState adam = AdamState::zeros_like(model);
  ModelGrad grad;
  int iter = 0;
  PairBatch coupled;
  int cursor = 0; // next unused pair inside the coupled batch

  while (iter < cfg.iterations) {
    if (coupled.size() == 0 || cursor + cfg.grad_batch > coupled.size()) {
      coupled = draw_coupled_batch(train_data, cfg.coupling_batch, m, cfg.mode,
                                   batch_rng);
      cursor = 0;
    }

    PairBatch chunk;
    chunk.z = coupled.z.middleRows(cursor, cfg.grad_batch);
    chunk.y = coupled.y.middleRows(cursor, cfg.grad_batch);
    chunk.x = coupled.x.middleRows(cursor, cfg.grad_batch);
    cursor += cfg.grad_batch;

    Eigen::VectorXd t(cfg.grad_batch);
    for (int i = 0; i < cfg.grad_batch; ++i) t[i] = t_rng.uniform();
    const auto tt = training_targets(chunk, t);
    const Eigen::MatrixXd in = assemble_inputs(model, tt.t, tt.y, tt.x_t);
    const Eigen::MatrixXd tgt = tt.target.transpose();

    const double loss = loss_and_grad(model, in, tgt, &grad);
    if (!std::isfinite(loss))
      throw NumericError("train: loss became non-finite at iteration " +
                         std::to_string(iter));
    adam_step(model, grad, adam, cfg.lr);
    ++iter;

    if (iter % cfg.val_every == 0 || iter == cfg.iterations) {
      const double val_loss = loss_only(model, val_in, val_tgt);
      out.curve.push_back({iter, loss, val_loss});
      if (val_loss < out.best_val_loss) {
        out.best_val_loss = val_loss;
        out.model = model;
      }
    }
  }
  out.final_model = model;
  return out;
}

Eigen::MatrixXd sample_posterior(const VelocityModel& model,
                                 const Eigen::VectorXd& y, int n_samples,
                                 int euler_steps, Rng& rng) {
  if (n_samples < 1) throw ValidationError("sample_posterior: n_samples >= 1");
  if (euler_steps < 1) throw ValidationError("sample_posterior: euler_steps >= 1");
  if (y.size() != model.dim_y)
    throw ValidationError("sample_posterior: condition dimension mismatch");

  const int m = model.dim_x;
  Eigen::MatrixXd x(n_samples, m);
  for (int i = 0; i < n_samples; ++i)
    for (int j = 0; j < m; ++j) x(i, j) = rng.normal();

  const double h = 1.0 / euler_steps;
  Eigen::MatrixXd in(model.input_dim(), n_samples);
  for (int s = 0; s < euler_steps; ++s) {
    const double t = s * h;
    const Eigen::VectorXd tf = time_features(t);
    for (int i = 0; i < n_samples; ++i) {
      in.col(i).head(kTimeFeatures) = tf;
      in.col(i).segment(kTimeFeatures, model.dim_y) = y;
      in.col(i).tail(m) = x.row(i).transpose();
    }
    x += h * model.forward_batch(in).transpose();
  }
  return x;
}

} // namespace condot
