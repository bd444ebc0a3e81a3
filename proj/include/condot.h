/* C interface to the conditional optimal transport toolkit.
 *
 * All functions return a status code: 0 on success, 1 on numerical failure,
 * 2 on validation failure (bad inputs, malformed configs). On failure the
 * thread-local message from condot_last_error() describes the problem.
 * Objects are opaque handles released with the matching *_free function;
 * strings returned through char** are released with condot_string_free.
 */
#ifndef CONDOT_H
#define CONDOT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define CONDOT_OK 0
#define CONDOT_ERR_NUMERIC 1
#define CONDOT_ERR_VALIDATION 2

typedef struct condot_measure condot_measure;
typedef struct condot_plan condot_plan;

const char* condot_version(void);
const char* condot_last_error(void);
void condot_string_free(char* s);

/* ----- measures ----------------------------------------------------------
 * Interchange document: {"d":int,"m":int,"atoms":[{"y":[..],"x":[..],"w":w}]}
 */
int condot_measure_from_json(const char* json, condot_measure** out);
int condot_measure_to_json(const condot_measure* mu, char** out);
void condot_measure_free(condot_measure* mu);
int condot_measure_counts(const condot_measure* mu, int* atoms, int* dim_y,
                          int* dim_x);
int condot_random_instance(uint64_t seed, int dim_y, int dim_x,
                           int n_conditions, int n_per_condition,
                           condot_measure** mu, condot_measure** nu);
int condot_same_condition_marginal(const condot_measure* mu,
                                   const condot_measure* nu, double tol,
                                   int* out);

/* ----- distances and plans ------------------------------------------------
 * Plans serialize to {"entries":[{"i":..,"j":..,"m":..}],"y_diagonal":..,
 * "value":..}. A null plan output pointer skips plan construction.
 */
int condot_conditional_wasserstein(const condot_measure* mu,
                                   const condot_measure* nu, double p,
                                   double* value, condot_plan** plan);
int condot_relaxed_wasserstein(const condot_measure* mu,
                               const condot_measure* nu, double p, double beta,
                               double* value, condot_plan** plan);
int condot_wasserstein_joint(const condot_measure* mu, const condot_measure* nu,
                             double p, double* value);
int condot_plan_y_leakage(const condot_plan* plan, double p, double* out);
int condot_plan_to_json(const condot_plan* plan, char** out);
void condot_plan_free(condot_plan* plan);

/* Primal value, dual value and gap of the conditional Kantorovich dual
 * (p = 1). */
int condot_dual_gap(const condot_measure* mu, const condot_measure* nu,
                    double* primal, double* dual, double* gap);

/* Debiased entropic divergence under the relaxed cost. epsilon <= 0 selects
 * the default 1e-3 * mean pairwise cost. */
int condot_sinkhorn_divergence(const condot_measure* mu,
                               const condot_measure* nu, double p, double beta,
                               double epsilon, double* out);

/* ----- experiment commands -------------------------------------------------
 * Commands: counterexample, beta_sweep, duality_check, geodesic_check,
 * particle_flow, gmm_train, gmm_eval. config_json may be NULL or "" for
 * defaults; seed_override < 0 keeps the config seed. The report JSON is also
 * written to the run directory together with manifest and metrics.
 */
int condot_command_defaults(const char* command, char** config_json);
int condot_run_command(const char* command, const char* config_json,
                       int64_t seed_override, const char* out_dir, int jobs,
                       char** report_json);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CONDOT_H */
