#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "condot/errors.hpp"
#include "condot/rng.hpp"

namespace condot {

// Gaussian mixture with axis-aligned components. Priors are isotropic
// (var_diag constant per component), conjugate posteriors stay diagonal
// because the forward operator is diagonal.
struct GmmModel {
  Eigen::VectorXd weights;              // simplex
  std::vector<Eigen::VectorXd> means;   // one per component
  std::vector<Eigen::VectorXd> var_diag; // positive, one per component

  int dim() const { return means.empty() ? 0 : static_cast<int>(means[0].size()); }
  int components() const { return static_cast<int>(weights.size()); }
  void validate() const;
};

// Observation model y = diag(f) x + noise_std * N(0, I).
struct LinearGaussianForward {
  Eigen::VectorXd f_diag;
  double noise_std = 0.1;

  void validate() const {
    if (!(noise_std > 0.0))
      throw ValidationError("LinearGaussianForward: noise_std must be > 0");
    if (f_diag.size() < 1)
      throw ValidationError("LinearGaussianForward: empty diagonal");
  }
};

// 10 components in R^5, uniform weights, means i.i.d. uniform on [-1,1]^5,
// standard deviation 0.1; deterministic per seed.
GmmModel make_paper_gmm(uint64_t seed);

// Matching forward operator: f_ii = 0.1 / (i+1), noise std 0.1.
LinearGaussianForward make_paper_forward(int dim = 5);

// Draws (y, x) rows: x from the mixture, y = f x + noise.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd>
sample_joint(const GmmModel& gmm, const LinearGaussianForward& fwd, int n,
             uint64_t seed);

// Conjugate posterior for the observation y: per-component Gaussian update
// plus evidence reweighting, renormalized.
GmmModel analytic_posterior(const GmmModel& gmm,
                            const LinearGaussianForward& fwd,
                            const Eigen::VectorXd& y);

// Categorical-then-Gaussian exact sampling. One row per draw.
Eigen::MatrixXd sample_gmm(const GmmModel& gmm, int n, Rng& rng);
Eigen::MatrixXd sample_posterior_exact(const GmmModel& posterior, int n,
                                       uint64_t seed);

// Mixture log density (diagonal components).
double gmm_log_density(const GmmModel& gmm, const Eigen::VectorXd& x);

} // namespace condot
