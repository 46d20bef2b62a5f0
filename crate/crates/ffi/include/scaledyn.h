#ifndef SCALEDYN_H
#define SCALEDYN_H

/* Generated by cbindgen from scaledyn-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Column selector for [`sdn_observables_fill`].
 */
typedef enum SdnObservableColumn {
  SDN_OBSERVABLE_COLUMN_TIME = 0,
  /**
   * NaN while the trap is unbound (ω ≤ 0).
   */
  SDN_OBSERVABLE_COLUMN_QSTAR,
  SDN_OBSERVABLE_COLUMN_MEAN_E,
  /**
   * Adiabatic reference energy; NaN while the trap is unbound.
   */
  SDN_OBSERVABLE_COLUMN_MEAN_E_ADIABATIC,
  SDN_OBSERVABLE_COLUMN_MEAN_E2,
  /**
   * Energy variance clamped to ≥ 0.
   */
  SDN_OBSERVABLE_COLUMN_VAR_E,
  /**
   * Energy variance before the clamp (can undershoot by rounding).
   */
  SDN_OBSERVABLE_COLUMN_VAR_E_RAW,
  SDN_OBSERVABLE_COLUMN_MEAN_Q,
  SDN_OBSERVABLE_COLUMN_MEAN_Q2,
  SDN_OBSERVABLE_COLUMN_MEAN_C,
  SDN_OBSERVABLE_COLUMN_MEAN_C2,
} SdnObservableColumn;

/**
 * Result of every fallible call in this API.
 */
typedef enum SdnStatus {
  SDN_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  SDN_STATUS_NULL_ARGUMENT = 1,
  /**
   * A numeric argument or argument combination was rejected.
   */
  SDN_STATUS_INVALID_PARAMETER = 2,
  /**
   * The adaptive integrator failed to reach the requested time.
   */
  SDN_STATUS_INTEGRATION_FAILED = 3,
  /**
   * The request is well-formed but not defined for these inputs.
   */
  SDN_STATUS_UNSUPPORTED = 4,
  /**
   * An internal invariant failed; file a bug.
   */
  SDN_STATUS_INTERNAL = 5,
} SdnStatus;

/**
 * Column selector for [`sdn_trajectory_fill`].
 */
typedef enum SdnTrajectoryColumn {
  SDN_TRAJECTORY_COLUMN_TIME = 0,
  SDN_TRAJECTORY_COLUMN_B,
  SDN_TRAJECTORY_COLUMN_BDOT,
  SDN_TRAJECTORY_COLUMN_BDDOT,
  SDN_TRAJECTORY_COLUMN_OMEGA,
  SDN_TRAJECTORY_COLUMN_OMEGA_SQ,
  /**
   * NaN while the trap is unbound (ω ≤ 0).
   */
  SDN_TRAJECTORY_COLUMN_QSTAR,
} SdnTrajectoryColumn;

/**
 * Opaque table of energy observables along a trajectory.
 */
typedef struct SdnObservables SdnObservables;

/**
 * Opaque trap-frequency protocol ω²(t).
 */
typedef struct SdnProtocol SdnProtocol;

/**
 * Opaque initial-state moment table.
 */
typedef struct SdnState SdnState;

/**
 * Opaque solution b(t), ḃ(t), b̈(t), Q*(t) of the scaling equation.
 */
typedef struct SdnTrajectory SdnTrajectory;

/**
 * Unit system for state constructors; `sdn_units_natural()` gives ħ = m = 1.
 */
typedef struct SdnUnits {
  double hbar;
  double mass;
} SdnUnits;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Natural units ħ = m = 1.
 */
struct SdnUnits sdn_units_natural(void);

/**
 * Message of the most recent failing call on this thread, as a
 * NUL-terminated UTF-8 string. Empty if nothing failed yet. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *sdn_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sdn_version(void);

/**
 * Static trap at `omega0`.
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum SdnStatus sdn_protocol_constant(double omega0, struct SdnProtocol **out);

/**
 * Trap switched off at t = 0 (free expansion).
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum SdnStatus sdn_protocol_free_expansion(double omega0, struct SdnProtocol **out);

/**
 * Instantaneous jump `omega0` → `omega_f` at t = 0.
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum SdnStatus sdn_protocol_sudden_quench(double omega0, double omega_f, struct SdnProtocol **out);

/**
 * Linear ramp of ω² from `omega0`² to `omega_f`² over [0, t_f].
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum SdnStatus sdn_protocol_linear_ramp(double omega0,
                                        double omega_f,
                                        double t_f,
                                        struct SdnProtocol **out);

/**
 * Shortcut-to-adiabaticity drive: ω²(t) engineered so the scaling factor
 * follows a smooth polynomial from equilibrium at `omega0` to equilibrium at
 * `omega_f` in time `t_f`. Check `sdn_protocol_is_feasible` — fast schedules
 * can require an inverted trap along the way.
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum SdnStatus sdn_protocol_sta(double omega0,
                                double omega_f,
                                double t_f,
                                struct SdnProtocol **out);

/**
 * Local counterdiabatic drive dressing a smooth polynomial reference ramp
 * from `omega0` to `omega_f` over [0, t_f].
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum SdnStatus sdn_protocol_lcd(double omega0,
                                double omega_f,
                                double t_f,
                                struct SdnProtocol **out);

/**
 * # Safety
 * `p` must be a pointer returned by a protocol constructor, not yet
 * destroyed, or null (no-op).
 */
void sdn_protocol_destroy(struct SdnProtocol *p);

/**
 * ω²(t) of the protocol (right-continuous at jumps).
 *
 * # Safety
 * `p` must be a live protocol handle; `out` valid for writing one double.
 */
enum SdnStatus sdn_protocol_omega_sq(const struct SdnProtocol *p, double t, double *out);

/**
 * Whether ω²(t) ≥ 0 over the whole drive (engineered protocols can dip
 * below zero; they are still integrable, but Q* is undefined there).
 *
 * # Safety
 * `p` must be a live protocol handle; `out` valid for writing one bool.
 */
enum SdnStatus sdn_protocol_is_feasible(const struct SdnProtocol *p, bool *out);

/**
 * Harmonic-oscillator eigenstate `n` prepared in the trap at `omega0`.
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum SdnStatus sdn_state_eigenstate(struct SdnUnits units,
                                    uint32_t n,
                                    double omega0,
                                    struct SdnState **out);

/**
 * Thermal (Gibbs) state at inverse temperature `beta` in the trap at
 * `omega0`.
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum SdnStatus sdn_state_thermal(struct SdnUnits units,
                                 double beta,
                                 double omega0,
                                 struct SdnState **out);

/**
 * Calogero–Sutherland ground state of `n_particles` at coupling `g` ≥ 0.
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum SdnStatus sdn_state_csm_ground(struct SdnUnits units,
                                    uint32_t n_particles,
                                    double g,
                                    double omega0,
                                    struct SdnState **out);

/**
 * Unitary Fermi gas parameterized by its scaled energy variance `sigma2`.
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum SdnStatus sdn_state_unitary_fermi(struct SdnUnits units,
                                       double sigma2,
                                       double omega0,
                                       struct SdnState **out);

/**
 * Generic homogeneous state with moment exponent `c` > 0.
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum SdnStatus sdn_state_homogeneous(struct SdnUnits units,
                                     double c,
                                     double omega0,
                                     struct SdnState **out);

/**
 * # Safety
 * `s` must be a pointer returned by a state constructor, not yet destroyed,
 * or null (no-op).
 */
void sdn_state_destroy(struct SdnState *s);

/**
 * Integrate the scaling equation under `p` and sample `n_samples` points
 * uniformly on [0, t_end]. `rel_tol` is the local error target per step,
 * accepted in [1e-13, 1e-6]; 1e-10 is a good default.
 *
 * # Safety
 * `p` must be a live protocol handle; `out` valid for writing one pointer.
 */
enum SdnStatus sdn_trajectory_compute(const struct SdnProtocol *p,
                                      double t_end,
                                      size_t n_samples,
                                      double rel_tol,
                                      struct SdnTrajectory **out);

/**
 * Integrate the scaling equation under `p` and sample at caller-provided
 * `times` (must be finite, start at 0, and be nondecreasing); the
 * integration ends at the last entry.
 *
 * # Safety
 * `p` must be a live protocol handle, `times` valid for reading `len`
 * doubles, and `out` valid for writing one pointer.
 */
enum SdnStatus sdn_trajectory_compute_at(const struct SdnProtocol *p,
                                         const double *times,
                                         size_t len,
                                         double rel_tol,
                                         struct SdnTrajectory **out);

/**
 * Number of samples held by the trajectory (0 for null).
 *
 * # Safety
 * `t` must be a live trajectory handle or null.
 */
size_t sdn_trajectory_len(const struct SdnTrajectory *t);

/**
 * Copy one column of the trajectory into `out`. `len` must equal
 * `sdn_trajectory_len(t)` exactly.
 *
 * # Safety
 * `t` must be a live trajectory handle and `out` valid for writing `len`
 * doubles.
 */
enum SdnStatus sdn_trajectory_fill(const struct SdnTrajectory *t,
                                   enum SdnTrajectoryColumn column,
                                   double *out,
                                   size_t len);

/**
 * # Safety
 * `t` must be a pointer returned by a trajectory constructor, not yet
 * destroyed, or null (no-op).
 */
void sdn_trajectory_destroy(struct SdnTrajectory *t);

/**
 * Evaluate all energy observables of `state` along `traj`. Fails with
 * `SDN_STATUS_INVALID_PARAMETER` if the state was prepared at a different
 * `omega0` than the trajectory's protocol drives from.
 *
 * # Safety
 * `traj` and `state` must be live handles; `out` valid for writing one
 * pointer.
 */
enum SdnStatus sdn_observables_compute(const struct SdnTrajectory *traj,
                                       const struct SdnState *state,
                                       struct SdnObservables **out);

/**
 * Number of samples held by the observables table (0 for null).
 *
 * # Safety
 * `o` must be a live observables handle or null.
 */
size_t sdn_observables_len(const struct SdnObservables *o);

/**
 * Copy one column of the observables table into `out`. `len` must equal
 * `sdn_observables_len(o)` exactly.
 *
 * # Safety
 * `o` must be a live observables handle and `out` valid for writing `len`
 * doubles.
 */
enum SdnStatus sdn_observables_fill(const struct SdnObservables *o,
                                    enum SdnObservableColumn column,
                                    double *out,
                                    size_t len);

/**
 * # Safety
 * `o` must be a pointer returned by `sdn_observables_compute`, not yet
 * destroyed, or null (no-op).
 */
void sdn_observables_destroy(struct SdnObservables *o);

/**
 * Nonadiabatic factor Q*(b, ḃ; ω, ω₀). Fails with `SDN_STATUS_UNSUPPORTED`
 * when ω ≤ 0 (factor undefined in an unbound trap).
 *
 * # Safety
 * `out` must be valid for writing one double.
 */
enum SdnStatus sdn_nonadiabatic_factor(double b,
                                       double bdot,
                                       double omega,
                                       double omega0,
                                       double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SCALEDYN_H */
