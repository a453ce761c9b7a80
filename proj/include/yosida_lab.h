/* SPDX-License-Identifier: Apache-2.0 */

#ifndef YOSIDA_LAB_H
#define YOSIDA_LAB_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define YL_API __declspec(dllexport)
#else
#define YL_API __attribute__((visibility("default")))
#endif

typedef enum yl_status {
  YL_OK = 0,
  YL_VERIFICATION_FAILED = 1, /* computation ran, checked property does not hold */
  YL_INCONCLUSIVE = 2,        /* estimate did not converge */
  YL_NUMERICAL_ERROR = 3,
  YL_INVALID_INPUT = 4,
  YL_IO_ERROR = 5,
  YL_INTERNAL = 6
} yl_status;

typedef struct yl_matrix yl_matrix;

/* Process exit code for a status: 0 pass, 2 verification failure, 3 numerical
   or inconclusive, 4 bad input. */
YL_API int yl_exit_code(yl_status status);

/* Message of the last failing call on this thread ("" if none). */
YL_API const char *yl_last_error(void);
YL_API const char *yl_version(void);

/* Strings returned through char** outputs are owned by the caller. */
YL_API void yl_string_free(char *s);

/* Row-major entries; im may be NULL for a real matrix. */
YL_API yl_status yl_matrix_create(int dim, const double *re, const double *im, yl_matrix **out);
YL_API yl_status yl_matrix_load(const char *path, yl_matrix **out);
/* text_format != 0 writes the whitespace "re im" format, JSON otherwise. */
YL_API yl_status yl_matrix_save(const yl_matrix *m, const char *path, int text_format);
YL_API yl_status yl_matrix_dim(const yl_matrix *m, int *dim);
YL_API yl_status yl_matrix_get(const yl_matrix *m, double *re, double *im);
YL_API void yl_matrix_free(yl_matrix *m);

YL_API yl_status yl_operator_norm(const yl_matrix *a, double *out);
YL_API yl_status yl_resolvent(const yl_matrix *a, double lambda_re, double lambda_im,
                              yl_matrix **out);
YL_API yl_status yl_matrix_exp(const yl_matrix *a, double t, yl_matrix **out);
YL_API yl_status yl_fractional_power(const yl_matrix *a, double alpha, yl_matrix **out);

/* Report-producing calls fill *report_json even when the verdict is
   YL_VERIFICATION_FAILED or YL_INCONCLUSIVE. grid_points <= 0 keeps the default. */
YL_API yl_status yl_yosida_distance(const yl_matrix *a, const yl_matrix *b, int grid_points,
                                    char **report_json);
YL_API yl_status yl_check_hyperbolic(const yl_matrix *g, char **report_json);
YL_API yl_status yl_persistence(const yl_matrix *g0, const yl_matrix *g1, char **report_json);

/* command: "roots", "dicho" or "ydist". config_text is JSON or TOML; relative
   file names resolve against base_dir (NULL means "."). */
YL_API yl_status yl_delay(const char *command, const char *config_text, const char *base_dir,
                          char **report_json);

/* command: "build", "check62" or "check64". seed may be NULL. */
YL_API yl_status yl_model(const char *command, const char *config_text, const uint64_t *seed,
                          char **report_json);

/* csv may be NULL. seed overrides the config seed when not NULL. */
YL_API yl_status yl_sweep(const char *config_text, const uint64_t *seed, char **report_json,
                          char **csv);

YL_API yl_status yl_demo_domain(double b0, double b1, char **report_json);

/* out_dir may be NULL (compare only). */
YL_API yl_status yl_regress(const char *baseline_dir, const char *out_dir, int bless,
                            char **summary_json);

#ifdef __cplusplus
}
#endif

#endif /* YOSIDA_LAB_H */
