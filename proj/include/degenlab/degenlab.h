/* Stable C interface to the degenlab numerical core.
 *
 * Every fallible call returns dl_status. On failure the message is kept in
 * thread-local storage and read with dl_last_error(); it stays valid until
 * the next failing call on the same thread. Handles are opaque and owned by
 * the caller; destroy functions accept NULL. */
#ifndef DEGENLAB_H
#define DEGENLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define DL_API __declspec(dllexport)
#else
#define DL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dl_status {
  DL_OK = 0,
  DL_ERR_PARAMETER = 1,
  DL_ERR_DEGENERATE_PROFILE = 2,
  DL_ERR_RESOLUTION = 3,
  DL_ERR_OVERFLOW = 4,
  DL_ERR_NOT_EIGENVALUE = 5,
  DL_ERR_RESONANCE = 6,
  DL_ERR_TRUNCATION = 7,
  DL_ERR_SOLVER = 8,
  DL_ERR_CONFIG = 9,
  DL_ERR_IO = 10,
  DL_ERR_SCHEMA = 11,
  DL_ERR_INTERNAL = 12
} dl_status;

typedef enum dl_profile_kind { DL_PROFILE_CONSTANT = 0, DL_PROFILE_POLYNOMIAL = 1, DL_PROFILE_TABULATED = 2 } dl_profile_kind;
typedef enum dl_torus_variant { DL_TORUS_INVERTIBLE = 0, DL_TORUS_DIFFUSION = 1 } dl_torus_variant;

typedef struct dl_profile dl_profile;
typedef struct dl_torus dl_torus;

/* Receives one line of text without the trailing newline. */
typedef void (*dl_line_callback)(const char* line, void* user);

DL_API const char* dl_version(void);
DL_API const char* dl_last_error(void);
DL_API const char* dl_status_name(dl_status status);
/* Process exit status for a status: 0 ok, 2 config, 3 resonance, 4 solver,
 * 5 io, 1 anything else. */
DL_API int dl_exit_code(dl_status status);

DL_API dl_status dl_profile_create(dl_profile_kind kind, const double* alpha, size_t n_alpha, const double* beta,
                                   size_t n_beta, int m, dl_profile** out);
DL_API void dl_profile_destroy(dl_profile* profile);
/* Up to `capacity` exceptional indices s_k are written to s_out; *count
 * receives the number found. s0 may be NULL. */
DL_API dl_status dl_profile_sigma(const dl_profile* profile, size_t max_count, double w_max, double* s_out,
                                  size_t capacity, size_t* count, double* s0);

DL_API dl_status dl_torus_create(const dl_profile* profile, double period_x, double period_t, int nx, int nt,
                                 dl_torus_variant variant, dl_torus** out);
DL_API void dl_torus_destroy(dl_torus* torus);
DL_API dl_status dl_torus_size(const dl_torus* torus, size_t* n);
DL_API dl_status dl_torus_defects(const dl_torus* torus, double* symmetry, double* row_sum);
DL_API dl_status dl_torus_spectral_gap(const dl_torus* torus, double* lambda1);
DL_API dl_status dl_torus_write_triplets(const dl_torus* torus, const char* path);

/* Runs the experiment described by the config file. `experiment` may be
 * NULL to use the config's [experiment] type; `out_dir` may be NULL to use
 * its [output] dir. When has_seed is zero the config seed is kept. The
 * 16-hex-digit config checksum is copied into checksum (buffer of at least
 * 17 bytes) when checksum is not NULL. */
DL_API dl_status dl_run_config(const char* config_path, const char* experiment, const char* out_dir, int grid_scale,
                               int has_seed, uint64_t seed, char* checksum, size_t checksum_size);
DL_API dl_status dl_plot(const char* report_csv, const char* kind, const char* svg_path);
/* *passed is set to 1 when every check passed. */
DL_API dl_status dl_selftest(const char* golden_dir, dl_line_callback on_line, void* user, int* passed);

#ifdef __cplusplus
}
#endif

#endif
