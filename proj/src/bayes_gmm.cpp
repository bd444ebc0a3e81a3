#include "condot/bayes_gmm.hpp"

#include <cmath>

namespace condot {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;

double diag_gauss_log_density(const Eigen::VectorXd& x,
                              const Eigen::VectorXd& mean,
                              const Eigen::VectorXd& var) {
  double acc = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    const double d = x[i] - mean[i];
    acc += -0.5 * (kLog2Pi + std::log(var[i]) + d * d / var[i]);
  }
  return acc;
}
} // namespace

void GmmModel::validate() const {
  const int k = components();
  if (k < 1) throw ValidationError("gmm: needs at least one component");
  if (static_cast<int>(means.size()) != k ||
      static_cast<int>(var_diag.size()) != k)
    throw ValidationError("gmm: component list size mismatch");
  double total = 0.0;
  for (int c = 0; c < k; ++c) {
    if (!(weights[c] >= 0.0)) throw ValidationError("gmm: negative weight");
    total += weights[c];
    if (means[c].size() != dim() || var_diag[c].size() != dim())
      throw ValidationError("gmm: component dimension mismatch");
    for (int i = 0; i < var_diag[c].size(); ++i)
      if (!(var_diag[c][i] > 0.0))
        throw ValidationError("gmm: variances must be positive definite");
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw ValidationError("gmm: weights must sum to 1 within 1e-12");
}

GmmModel make_paper_gmm(uint64_t seed) {
  constexpr int k = 10, d = 5;
  constexpr double std_dev = 0.1;
  Rng rng(seed);
  GmmModel gmm;
  gmm.weights = Eigen::VectorXd::Constant(k, 1.0 / k);
  for (int c = 0; c < k; ++c) {
    Eigen::VectorXd mean(d);
    for (int i = 0; i < d; ++i) mean[i] = rng.uniform(-1.0, 1.0);
    gmm.means.push_back(mean);
    gmm.var_diag.push_back(Eigen::VectorXd::Constant(d, std_dev * std_dev));
  }
  return gmm;
}

LinearGaussianForward make_paper_forward(int dim) {
  LinearGaussianForward fwd;
  fwd.f_diag.resize(dim);
  for (int i = 0; i < dim; ++i) fwd.f_diag[i] = 0.1 / (i + 1);
  fwd.noise_std = 0.1;
  return fwd;
}

Eigen::MatrixXd sample_gmm(const GmmModel& gmm, int n, Rng& rng) {
  gmm.validate();
  Eigen::MatrixXd out(n, gmm.dim());
  for (int i = 0; i < n; ++i) {
    // categorical draw by cumulative weight
    const double u = rng.uniform();
    int c = 0;
    double acc = gmm.weights[0];
    while (c + 1 < gmm.components() && u >= acc) acc += gmm.weights[++c];
    for (int j = 0; j < gmm.dim(); ++j)
      out(i, j) = gmm.means[c][j] + std::sqrt(gmm.var_diag[c][j]) * rng.normal();
  }
  return out;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd>
sample_joint(const GmmModel& gmm, const LinearGaussianForward& fwd, int n,
             uint64_t seed) {
  gmm.validate();
  fwd.validate();
  if (n < 1) throw ValidationError("sample_joint: n must be >= 1");
  if (fwd.f_diag.size() != gmm.dim())
    throw ValidationError("sample_joint: forward dimension mismatch");

  Rng rng(seed);
  Rng x_rng = rng.split(0), noise_rng = rng.split(1);
  Eigen::MatrixXd xs = sample_gmm(gmm, n, x_rng);
  Eigen::MatrixXd ys(n, gmm.dim());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < gmm.dim(); ++j)
      ys(i, j) = fwd.f_diag[j] * xs(i, j) + fwd.noise_std * noise_rng.normal();
  return {ys, xs};
}

GmmModel analytic_posterior(const GmmModel& gmm,
                            const LinearGaussianForward& fwd,
                            const Eigen::VectorXd& y) {
  gmm.validate();
  fwd.validate();
  const int d = gmm.dim();
  if (fwd.f_diag.size() != d || y.size() != d)
    throw ValidationError("analytic_posterior: dimension mismatch");

  const double nv = fwd.noise_std * fwd.noise_std;
  GmmModel post;
  post.weights.resize(gmm.components());
  Eigen::VectorXd log_evidence(gmm.components());

  for (int c = 0; c < gmm.components(); ++c) {
    Eigen::VectorXd var(d), mean(d), ev_var(d), ev_mean(d);
    for (int i = 0; i < d; ++i) {
      const double f = fwd.f_diag[i];
      const double prior_var = gmm.var_diag[c][i];
      // precision update per coordinate
      const double prec = 1.0 / prior_var + f * f / nv;
      var[i] = 1.0 / prec;
      mean[i] = var[i] * (gmm.means[c][i] / prior_var + f * y[i] / nv);
      // evidence of y under this component
      ev_mean[i] = f * gmm.means[c][i];
      ev_var[i] = f * f * prior_var + nv;
    }
    post.means.push_back(mean);
    post.var_diag.push_back(var);
    log_evidence[c] = std::log(gmm.weights[c]) +
                      diag_gauss_log_density(y, ev_mean, ev_var);
  }

  const double mx = log_evidence.maxCoeff();
  for (int c = 0; c < gmm.components(); ++c)
    post.weights[c] = std::exp(log_evidence[c] - mx);
  post.weights /= post.weights.sum();
  return post;
}

Eigen::MatrixXd sample_posterior_exact(const GmmModel& posterior, int n,
                                       uint64_t seed) {
  if (n < 1) throw ValidationError("sample_posterior_exact: n must be >= 1");
  Rng rng(seed);
  return sample_gmm(posterior, n, rng);
}

double gmm_log_density(const GmmModel& gmm, const Eigen::VectorXd& x) {
  gmm.validate();
  double best = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd logs(gmm.components());
  for (int c = 0; c < gmm.components(); ++c) {
    logs[c] = std::log(gmm.weights[c]) +
              diag_gauss_log_density(x, gmm.means[c], gmm.var_diag[c]);
    best = std::max(best, logs[c]);
  }
  double s = 0.0;
  for (int c = 0; c < gmm.components(); ++c) s += std::exp(logs[c] - best);
  return best + std::log(s);
}

} // namespace condot
