/* dmfland: closed-form critical points and landscape classification for
 * regularized deep matrix factorization.
 *
 * C interface to the shared library. Objects are opaque handles created from
 * JSON documents; analysis results come back as JSON (or CSV) strings
 * allocated by the library and released with dmfland_free_string(). Every
 * function returns a status code; on failure dmfland_last_error() holds a
 * thread-local message.
 *
 * JSON schemas (see README for details):
 *   problem  {"dims":[d0..dL], "lambdas":[l1..lL],
 *             "Y":{"dense":[[..]]}} or {"Y":{"singular_values":[..]}}
 *   spec     {"sigma":[..], "pi":[0-based permutation of d_Y]}
 *   stack    {"coord":"F"|"G", "matrices":[[[..]] per layer, row arrays]}
 */
#ifndef DMFLAND_H
#define DMFLAND_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dmfland_status {
  DMFLAND_OK = 0,
  DMFLAND_ERR_DOMAIN = 1,  /* validation / domain error */
  DMFLAND_ERR_PARSE = 2,   /* malformed input document */
  DMFLAND_ERR_NUMERIC = 3, /* numerical failure (bug signal) */
} dmfland_status;

typedef struct dmfland_problem dmfland_problem;
typedef struct dmfland_stack dmfland_stack;

const char* dmfland_version(void);
/* Thread-local message for the most recent failure in this thread. */
const char* dmfland_last_error(void);
void dmfland_free_string(char* s);

/* ---- handles ---- */

dmfland_status dmfland_problem_from_json(const char* json_text, dmfland_problem** out);
void dmfland_problem_free(dmfland_problem* p);

dmfland_status dmfland_stack_from_json(const char* json_text, dmfland_stack** out);
dmfland_status dmfland_stack_to_json(const dmfland_stack* w, char** json_out);
void dmfland_stack_free(dmfland_stack* w);

/* ---- scalar analysis ---- */

/* RootProfile JSON: kind, roots [{x,label}], x_star, y_star. */
dmfland_status dmfland_analyze_roots(double y, double lambda, int depth, double tol,
                                     double eq_tol, char** json_out);

/* ---- critical points ---- */

/* spec validation report: {"ok":bool, "violation":...} */
dmfland_status dmfland_validate(const dmfland_problem* p, const char* spec_json,
                                char** json_out);

/* dressing: "canonical" or "random" (seeded). coord: "F" or "G". */
dmfland_status dmfland_construct(const dmfland_problem* p, const char* spec_json,
                                 const char* coord, const char* dressing, uint64_t seed,
                                 dmfland_stack** out);

/* Family JSON: {"complete":bool, "specs":[{id, sigma, pi, r_sigma}]}.
 * max_support < 0 means d_min; max_d_y <= 0 keeps the default cap (8). */
dmfland_status dmfland_enumerate(const dmfland_problem* p, int max_support,
                                 int max_d_y, int64_t max_specs, char** json_out);

dmfland_status dmfland_global_specs(const dmfland_problem* p, char** json_out);

/* ---- classification ---- */

/* {"class", "clause", "rationale", "labels", "certificate"?, "global_min_value_F"} */
dmfland_status dmfland_classify(const dmfland_problem* p, const char* spec_json,
                                char** json_out);

/* RegularizationReport JSON. eq_tol <= 0 keeps the default (1e-9). */
dmfland_status dmfland_check_lambda(const dmfland_problem* p, double eq_tol, char** json_out);

/* Atlas rows for every enumerated spec:
 * [{id, r_sigma, class, loss_F, min_probe}]. */
dmfland_status dmfland_atlas(const dmfland_problem* p, int probe_n, uint64_t probe_seed,
                             int max_d_y, char** json_out);

dmfland_status dmfland_global_min_value(const dmfland_problem* p, const char* coord,
                                        double* out);

/* ---- numeric verification ---- */

dmfland_status dmfland_loss(const dmfland_problem* p, const dmfland_stack* w,
                            const char* which, double* out);
dmfland_status dmfland_grad_norm(const dmfland_problem* p, const dmfland_stack* w,
                                 const char* which, double* out);

/* ProbeReport JSON. */
dmfland_status dmfland_probe(const dmfland_problem* p, const dmfland_stack* w,
                             const char* loss, int n, uint64_t seed, char** json_out);

/* Gradient / balancedness / FD / spec-matching report for one stack. */
dmfland_status dmfland_verify_stack(const dmfland_problem* p, const dmfland_stack* w,
                                    int probe_n, uint64_t probe_seed, char** json_out);

/* Plain gradient descent on F from a seeded random init (or init_or_null).
 * Stops at ||grad_F|| <= grad_tol * (1 + ||Y||_F). TrainResult JSON includes
 * the terminal stack and its classification. */
dmfland_status dmfland_train(const dmfland_problem* p, const dmfland_stack* init_or_null,
                             uint64_t seed, double step, int64_t max_iter, double grad_tol,
                             char** json_out);

/* Landscape slice values as CSV text (alpha,beta,value per row, shifted by
 * the reference loss at (0,0)); the reference value is reported through
 * ref_out when non-null. */
dmfland_status dmfland_landscape(const dmfland_problem* p, const dmfland_stack* ref,
                                 const char* loss, uint64_t seed, double half_range,
                                 int resolution, double* ref_out, char** csv_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* DMFLAND_H */
