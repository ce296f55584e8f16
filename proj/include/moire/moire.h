/* moire: spectra and Bloch-type solutions of incommensurate bilayer
 * Schrodinger operators, computed through regularized higher-dimensional
 * Bloch fibers.
 *
 * C89-compatible surface over the C++ core. All functions return a
 * moire_status; every non-OK return leaves a message retrievable with
 * moire_last_error() (thread-local). Handles are opaque and must be released
 * with their matching *_free function.
 */
#ifndef MOIRE_MOIRE_H
#define MOIRE_MOIRE_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum moire_status {
  MOIRE_OK = 0,
  MOIRE_ERR_INVALID_ARGUMENT = 1,
  MOIRE_ERR_CONFIG = 2, /* CLI exit code for config problems */
  MOIRE_ERR_SOLVER = 3, /* CLI exit code for solver failures */
  MOIRE_ERR_COMPARE = 4, /* CLI exit code for failed comparisons */
  MOIRE_ERR_IO = 5,
  MOIRE_ERR_INTERNAL = 6
} moire_status;

const char* moire_version(void);
const char* moire_status_name(moire_status status);

/* Message for the most recent failure on this thread; never NULL. */
const char* moire_last_error(void);

/* ---- configuration ----------------------------------------------------- */

typedef struct moire_config moire_config;

moire_status moire_config_load(const char* path, moire_config** out);
moire_status moire_config_parse(const char* json_text, const char* base_dir,
                                moire_config** out);
void moire_config_free(moire_config* cfg);

/* Hex hashes (17 bytes including NUL). The model hash covers only the
 * lattice and potential blocks; artifacts refuse comparisons across
 * different model hashes. */
moire_status moire_config_hash(const moire_config* cfg, char* buf, size_t buflen);
moire_status moire_config_model_hash(const moire_config* cfg, char* buf, size_t buflen);

/* ---- one-shot pipeline runner (what the CLI calls) ---------------------- */

/* Runs a subcommand (check|bands|continuation|spectrum|residual|reference|
 * compare), writing artifacts under out_dir (NULL: the config's output
 * directory). workers <= 0 means all cores. The returned status doubles as
 * the CLI exit code for the documented values 0/2/3/4. */
moire_status moire_run(const moire_config* cfg, const char* subcommand,
                       const char* out_dir, int workers, int verbose);

/* ---- incommensurability verdict ----------------------------------------- */

/* commensurate: 0 or 1. When 1, witness_m/witness_n (length dim) receive the
 * smallest witness indices. qmax_used reports the search bound. */
moire_status moire_check(const moire_config* cfg, int* commensurate, int* witness_m,
                         int* witness_n, int* qmax_used);

/* Formatted verdict, e.g. "NoWitnessUpTo(100)" or "Commensurate(m=[2], n=[1])". */
moire_status moire_check_verdict(const moire_config* cfg, char* buf, size_t buflen);

/* ---- band structures ----------------------------------------------------- */

typedef struct moire_bands moire_bands;

moire_status moire_compute_bands(const moire_config* cfg, double delta, int workers,
                                 moire_bands** out);
size_t moire_bands_num_kpoints(const moire_bands* bands);
size_t moire_bands_num_bands(const moire_bands* bands);
moire_status moire_bands_value(const moire_bands* bands, size_t k_index,
                               size_t band_index, double* value);
moire_status moire_bands_kpoint(const moire_bands* bands, size_t k_index,
                                double* k_frac, double* kp_frac);
void moire_bands_free(moire_bands* bands);

/* ---- spectrum estimates -------------------------------------------------- */

typedef struct moire_spectrum moire_spectrum;

/* Extrapolated delta -> 0+ spectrum over the configured k-grid and ladder. */
moire_status moire_compute_spectrum(const moire_config* cfg, int workers,
                                    moire_spectrum** out);
size_t moire_spectrum_num_intervals(const moire_spectrum* spectrum);
moire_status moire_spectrum_interval(const moire_spectrum* spectrum, size_t index,
                                     double* lo, double* hi);
void moire_spectrum_free(moire_spectrum* spectrum);

/* ---- delta continuation -------------------------------------------------- */

typedef struct moire_continuation moire_continuation;

/* Ladder at the config's probe k-point (residual block). */
moire_status moire_compute_continuation(const moire_config* cfg, int workers,
                                        moire_continuation** out);
size_t moire_continuation_num_rungs(const moire_continuation* table);
size_t moire_continuation_num_bands(const moire_continuation* table);
moire_status moire_continuation_value(const moire_continuation* table, size_t rung,
                                      size_t band, double* delta, double* value);
moire_status moire_continuation_extrapolated(const moire_continuation* table,
                                             size_t band, double* value);
void moire_continuation_free(moire_continuation* table);

/* ---- residual certification ---------------------------------------------- */

typedef struct moire_residual moire_residual;

/* Solves the configured (k~, delta, band) fiber, restricts to the diagonal
 * and certifies. Ball residuals are evaluated at the configured radii. */
moire_status moire_compute_residual(const moire_config* cfg, int workers,
                                    moire_residual** out);
moire_status moire_residual_exact(const moire_residual* report, double* value);
moire_status moire_residual_lambda(const moire_residual* report, double* value);
size_t moire_residual_num_ball_values(const moire_residual* report);
moire_status moire_residual_ball_value(const moire_residual* report, size_t index,
                                       double* radius, double* value);
void moire_residual_free(moire_residual* report);

/* ---- real-space oracle and comparison ------------------------------------ */

typedef struct moire_reference moire_reference;

moire_status moire_compute_reference(const moire_config* cfg, moire_reference** out);
size_t moire_reference_num_eigenvalues(const moire_reference* reference);
moire_status moire_reference_eigenvalue(const moire_reference* reference, size_t index,
                                        double* value);
void moire_reference_free(moire_reference* reference);

/* Windowed Hausdorff distance between the extrapolated spectrum and the
 * oracle eigenvalues. within_tolerance: 0 or 1. */
moire_status moire_compare(const moire_spectrum* spectrum,
                           const moire_reference* reference, double window_lo,
                           double window_hi, double tolerance, double* distance,
                           int* within_tolerance);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* MOIRE_MOIRE_H */
