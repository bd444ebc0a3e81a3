#include "condot.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "condot/experiments.hpp"
#include "condot/measures.hpp"
#include "condot/ot_exact.hpp"
#include "condot/serialize.hpp"
#include "condot/sinkhorn.hpp"

using namespace condot;

struct condot_measure {
  DiscreteJointMeasure value;
};

struct condot_plan {
  Plan4 value;
  double distance = 0.0;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    return CONDOT_OK;
  } catch (const ValidationError& e) {
    g_last_error = e.what();
    return CONDOT_ERR_VALIDATION;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CONDOT_ERR_NUMERIC;
  }
}

int require(bool ok, const char* message) {
  if (!ok) {
    g_last_error = message;
    return CONDOT_ERR_VALIDATION;
  }
  return CONDOT_OK;
}

} // namespace

extern "C" {

const char* condot_version(void) { return kVersionString; }

const char* condot_last_error(void) { return g_last_error.c_str(); }

void condot_string_free(char* s) { std::free(s); }

int condot_measure_from_json(const char* json, condot_measure** out) {
  if (int rc = require(json && out, "null argument")) return rc;
  return guarded([&] {
    auto* h = new condot_measure{measure_from_json(json)};
    *out = h;
  });
}

int condot_measure_to_json(const condot_measure* mu, char** out) {
  if (int rc = require(mu && out, "null argument")) return rc;
  return guarded([&] { *out = dup_string(measure_to_json(mu->value)); });
}

void condot_measure_free(condot_measure* mu) { delete mu; }

int condot_measure_counts(const condot_measure* mu, int* atoms, int* dim_y,
                          int* dim_x) {
  if (int rc = require(mu != nullptr, "null measure")) return rc;
  if (atoms) *atoms = mu->value.num_atoms();
  if (dim_y) *dim_y = mu->value.dim_y();
  if (dim_x) *dim_x = mu->value.dim_x();
  return CONDOT_OK;
}

int condot_random_instance(uint64_t seed, int dim_y, int dim_x,
                           int n_conditions, int n_per_condition,
                           condot_measure** mu, condot_measure** nu) {
  if (int rc = require(mu && nu, "null output")) return rc;
  return guarded([&] {
    auto [a, b] =
        random_joint_instance(seed, dim_y, dim_x, n_conditions, n_per_condition);
    *mu = new condot_measure{std::move(a)};
    *nu = new condot_measure{std::move(b)};
  });
}

int condot_same_condition_marginal(const condot_measure* mu,
                                   const condot_measure* nu, double tol,
                                   int* out) {
  if (int rc = require(mu && nu && out, "null argument")) return rc;
  return guarded(
      [&] { *out = same_condition_marginal(mu->value, nu->value, tol) ? 1 : 0; });
}

int condot_conditional_wasserstein(const condot_measure* mu,
                                   const condot_measure* nu, double p,
                                   double* value, condot_plan** plan) {
  if (int rc = require(mu && nu && value, "null argument")) return rc;
  return guarded([&] {
    auto res = conditional_wasserstein(mu->value, nu->value, p);
    *value = res.value;
    if (plan) *plan = new condot_plan{std::move(res.plan), res.value};
  });
}

int condot_relaxed_wasserstein(const condot_measure* mu,
                               const condot_measure* nu, double p, double beta,
                               double* value, condot_plan** plan) {
  if (int rc = require(mu && nu && value, "null argument")) return rc;
  return guarded([&] {
    auto res = relaxed_wasserstein(mu->value, nu->value, {p, beta, false});
    *value = res.value;
    if (plan) *plan = new condot_plan{std::move(res.plan), res.value};
  });
}

int condot_wasserstein_joint(const condot_measure* mu, const condot_measure* nu,
                             double p, double* value) {
  if (int rc = require(mu && nu && value, "null argument")) return rc;
  return guarded([&] { *value = wasserstein_joint(mu->value, nu->value, p).value; });
}

int condot_plan_y_leakage(const condot_plan* plan, double p, double* out) {
  if (int rc = require(plan && out, "null argument")) return rc;
  return guarded([&] { *out = y_leakage(plan->value, p); });
}

int condot_plan_to_json(const condot_plan* plan, char** out) {
  if (int rc = require(plan && out, "null argument")) return rc;
  return guarded(
      [&] { *out = dup_string(plan_to_json(plan->value, plan->distance)); });
}

void condot_plan_free(condot_plan* plan) { delete plan; }

int condot_dual_gap(const condot_measure* mu, const condot_measure* nu,
                    double* primal, double* dual, double* gap) {
  if (int rc = require(mu && nu, "null argument")) return rc;
  return guarded([&] {
    const auto cert = dual_certificate(mu->value, nu->value);
    if (primal) *primal = cert.primal_value;
    if (dual) *dual = cert.dual_value;
    if (gap) *gap = cert.gap;
  });
}

int condot_sinkhorn_divergence(const condot_measure* mu,
                               const condot_measure* nu, double p, double beta,
                               double epsilon, double* out) {
  if (int rc = require(mu && nu && out, "null argument")) return rc;
  return guarded([&] {
    const CostSpec spec{p, beta, false};
    const double eps =
        epsilon > 0.0 ? epsilon : default_epsilon(mu->value, nu->value, spec);
    *out = sinkhorn_divergence(mu->value, nu->value, spec, eps);
  });
}

int condot_command_defaults(const char* command, char** config_json) {
  if (int rc = require(command && config_json, "null argument")) return rc;
  return guarded([&] { *config_json = dup_string(command_defaults(command)); });
}

int condot_run_command(const char* command, const char* config_json,
                       int64_t seed_override, const char* out_dir, int jobs,
                       char** report_json) {
  if (int rc = require(command && out_dir, "null argument")) return rc;
  return guarded([&] {
    std::optional<int64_t> seed;
    if (seed_override >= 0) seed = seed_override;
    const std::string report =
        run_command(command, config_json ? config_json : "", seed, out_dir, jobs);
    if (report_json) *report_json = dup_string(report);
  });
}

} // extern "C"
