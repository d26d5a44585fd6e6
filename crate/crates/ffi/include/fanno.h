#ifndef FANNO_H
#define FANNO_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

/*
 Status codes; the nonzero values 1 to 4 match the `fanno` exit codes.
 */
typedef enum FannoStatus {
  FANNO_STATUS_OK = 0,
  FANNO_STATUS_INTERNAL = 1,
  /*
   Duct longer than the maximal length, or no steady solution over it.
   */
  FANNO_STATUS_CHOKED = 2,
  FANNO_STATUS_SUPERSONICITY_LOST = 3,
  FANNO_STATUS_CONFIG = 4,
  FANNO_STATUS_NULL_POINTER = 5,
  /*
   Index or buffer length out of range.
   */
  FANNO_STATUS_OUT_OF_RANGE = 6,
  /*
   Requested quantity does not exist for this object.
   */
  FANNO_STATUS_UNAVAILABLE = 7,
} FannoStatus;

/*
 Validated scenario.
 */
typedef struct FannoConfig FannoConfig;

/*
 Gas parameters `gamma`, `alpha`, `beta`.
 */
typedef struct FannoGas FannoGas;

/*
 Steady profile sampled on a uniform grid.
 */
typedef struct FannoProfile FannoProfile;

/*
 Finished transient run with its diagnostics.
 */
typedef struct FannoRun FannoRun;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread, or NULL. The pointer
 stays valid until the next call into this library from the same thread.
 */
const char *fanno_last_error(void);

/*
 # Safety
 `out` must be a valid pointer to writable storage for one handle.
 */
enum FannoStatus fanno_gas_new(double gamma, double alpha, double beta, struct FannoGas **out);

/*
 # Safety
 `gas` must be NULL or a handle from [`fanno_gas_new`] not yet freed.
 */
void fanno_gas_free(struct FannoGas *gas);

/*
 Sonic speed `s_c` reached at the end of a maximal-length duct.

 # Safety
 `gas` must be a live handle and `out` writable.
 */
enum FannoStatus fanno_critical_speed(const struct FannoGas *gas,
                                      double c_minus,
                                      double u_minus,
                                      double *out);

/*
 Maximal duct length. `*unbounded` is set to 1 (and `*out` to infinity)
 when no finite limit exists.

 # Safety
 `gas` must be a live handle; `out` and `unbounded` writable.
 */
enum FannoStatus fanno_max_duct_length(const struct FannoGas *gas,
                                       double c_minus,
                                       double u_minus,
                                       double *out,
                                       int32_t *unbounded);

/*
 Solves the steady profile on `n_points` uniform points of `[0, length]`.

 # Safety
 `gas` must be a live handle and `out` writable.
 */
enum FannoStatus fanno_profile_solve(const struct FannoGas *gas,
                                     double c_minus,
                                     double u_minus,
                                     double length,
                                     size_t n_points,
                                     struct FannoProfile **out);

/*
 Number of grid points, or 0 for NULL.

 # Safety
 `profile` must be NULL or a live handle.
 */
size_t fanno_profile_len(const struct FannoProfile *profile);

/*
 Regime code: 1 forced subsonic, 2 forced supersonic, 3 friction
 subsonic, 4 friction supersonic, 0 uniform (`beta = 0`).

 # Safety
 `profile` must be a live handle and `out` writable.
 */
enum FannoStatus fanno_profile_regime(const struct FannoProfile *profile, int32_t *out);

/*
 Copies the profile into caller buffers of length `len`, which must equal
 [`fanno_profile_len`]. Any of the four buffers may be NULL to skip it.

 # Safety
 Non-NULL buffers must hold `len` doubles.
 */
enum FannoStatus fanno_profile_copy(const struct FannoProfile *profile,
                                    double *x,
                                    double *u,
                                    double *c,
                                    double *rho,
                                    size_t len);

/*
 # Safety
 `profile` must be NULL or a live handle.
 */
void fanno_profile_free(struct FannoProfile *profile);

/*
 Parses a scenario in the `section.key = value` format.

 # Safety
 `text` must be a NUL-terminated string and `out` writable.
 */
enum FannoStatus fanno_config_parse(const char *text, struct FannoConfig **out);

/*
 # Safety
 `config` must be NULL or a live handle.
 */
void fanno_config_free(struct FannoConfig *config);

/*
 Runs the scenario. When supersonicity is lost during the run, the
 handle is still produced (for [`fanno_run_failure`]) and the status is
 `SupersonicityLost`. Failures before the run starts produce no handle.

 # Safety
 `config` must be a live handle and `out` writable.
 */
enum FannoStatus fanno_simulate(const struct FannoConfig *config, struct FannoRun **out);

/*
 Writes the first-failure coordinates and returns 1 if the run lost
 supersonicity, returns 0 otherwise (or for NULL arguments).

 # Safety
 `run` must be NULL or a live handle; `t` and `x` writable if non-NULL.
 */
int32_t fanno_run_failure(const struct FannoRun *run, double *t, double *x);

/*
 Max periodicity residual over one period after flushing.

 # Safety
 `run` must be a live handle and `out` writable.
 */
enum FannoStatus fanno_run_residual_max(const struct FannoRun *run, double *out);

/*
 Sup-norm of the perturbation from the steady profile and of its
 x-derivative, over all snapshots.

 # Safety
 `run` must be a live handle; `value` and `derivative` writable.
 */
enum FannoStatus fanno_run_perturbation_norms(const struct FannoRun *run,
                                              double *value,
                                              double *derivative);

/*
 Number of stored snapshots, or 0 for NULL.

 # Safety
 `run` must be NULL or a live handle.
 */
size_t fanno_run_snapshot_count(const struct FannoRun *run);

/*
 Copies snapshot `index` as primitive variables into buffers of length
 `len` (the grid size). `*time` receives the snapshot time.

 # Safety
 `run` must be a live handle; `time` writable; `rho` and `u` hold `len` doubles.
 */
enum FannoStatus fanno_run_snapshot(const struct FannoRun *run,
                                    size_t index,
                                    double *time,
                                    double *rho,
                                    double *u,
                                    size_t len);

/*
 # Safety
 `run` must be NULL or a live handle.
 */
void fanno_run_free(struct FannoRun *run);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FANNO_H */
