/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef GEOPHASE_H
#define GEOPHASE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result code of every fallible call.
 */
typedef enum GpStatus {
  GP_STATUS_OK = 0,
  GP_STATUS_NULL_POINTER = 1,
  GP_STATUS_INVALID_ARGUMENT = 2,
  GP_STATUS_NUMERICAL_FAILURE = 3,
  GP_STATUS_PANIC = 4,
} GpStatus;

/*
 Selects how phase coefficients are computed.
 */
typedef enum GpCoefficientSource {
  GP_COEFFICIENT_SOURCE_CLOSED = 0,
  GP_COEFFICIENT_SOURCE_QUADRATURE = 1,
} GpCoefficientSource;

/*
 Opaque per-sector phase table.
 */
typedef struct GpPhaseTable GpPhaseTable;

/*
 Opaque pulse design: `F(t) = F0 sin(G m t)`, `Delta = 2 n G`, `T = 2 pi / G`.
 */
typedef struct GpProtocol GpProtocol;

/*
 Taylor coefficients of the sector phase.
 */
typedef struct GpCoefficients {
  double phi0;
  double phi1;
  double phi2;
} GpCoefficients;

typedef struct GpEntanglement {
  double log_negativity;
  double max_entanglement;
  double normalized;
} GpEntanglement;

typedef struct GpFeasibility {
  double delta_min;
  double g_eff;
  double gamma_eff;
  double alpha_sq_max;
  double kappa_eff;
  double gate_time_short;
  double gate_time_pulse;
  /*
   1 when the requested photon number is within the bound.
   */
  int32_t feasible;
} GpFeasibility;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failure on the calling thread. The pointer stays
 valid until the next failing call on this thread. Never NULL.
 */
const char *gp_last_error_message(void);

/*
 Creates a protocol handle. `f0` is the absolute drive amplitude.

 # Safety
 `out` must be valid for writing one pointer.
 */
enum GpStatus gp_protocol_new(double coupling,
                              int64_t n,
                              uint32_t m,
                              double f0,
                              struct GpProtocol **out);

/*
 # Safety
 `protocol` must be NULL or a handle from `gp_protocol_new` not yet freed.
 */
void gp_protocol_free(struct GpProtocol *protocol);

/*
 `|alpha_c(T)|` for sector `(s1, s2)`.

 # Safety
 `protocol` must be a live handle; `out` valid for one write.
 */
enum GpStatus gp_protocol_closure_residual(const struct GpProtocol *protocol,
                                           int32_t s1,
                                           int32_t s2,
                                           size_t steps,
                                           double *out);

/*
 Geometric phase of sector `(s1, s2)` after one pulse.

 # Safety
 `protocol` must be a live handle; `out` valid for one write.
 */
enum GpStatus gp_protocol_sector_phase(const struct GpProtocol *protocol,
                                       int32_t s1,
                                       int32_t s2,
                                       size_t steps,
                                       double *out);

/*
 Phase coefficients at the protocol's detuning. `steps` is ignored for
 the closed form.

 # Safety
 `protocol` must be a live handle; `out` valid for one write.
 */
enum GpStatus gp_protocol_coefficients(const struct GpProtocol *protocol,
                                       enum GpCoefficientSource source,
                                       size_t steps,
                                       struct GpCoefficients *out);

/*
 Total two-stage phase table (closed-form coefficients).

 # Safety
 `protocol` must be a live handle; `out` valid for one pointer write.
 */
enum GpStatus gp_phase_table_total(const struct GpProtocol *protocol,
                                   size_t n1,
                                   size_t n2,
                                   struct GpPhaseTable **out);

/*
 Pure entangling table `phi2 * s1 * s2`.

 # Safety
 `out` must be valid for one pointer write.
 */
enum GpStatus gp_phase_table_entangling(size_t n1,
                                        size_t n2,
                                        double phi2,
                                        struct GpPhaseTable **out);

/*
 Phase of sector `(s1, s2)`.

 # Safety
 `table` must be a live handle; `out` valid for one write.
 */
enum GpStatus gp_phase_table_get(const struct GpPhaseTable *table,
                                 int32_t s1,
                                 int32_t s2,
                                 double *out);

/*
 Sector-independent part of the table.

 # Safety
 `table` must be a live handle; `out` valid for one write.
 */
enum GpStatus gp_phase_table_gauge(const struct GpPhaseTable *table, double *out);

/*
 # Safety
 `table` must be NULL or a live handle.
 */
void gp_phase_table_free(struct GpPhaseTable *table);

/*
 Logarithmic negativity of spin coherent states `(theta, phi)` after
 `table`, with remnant `(delta_alpha, delta_theta)`.

 # Safety
 `table` must be a live handle; `out` valid for one write.
 */
enum GpStatus gp_log_negativity(const struct GpPhaseTable *table,
                                double theta,
                                double phi,
                                double delta_alpha,
                                double delta_theta,
                                struct GpEntanglement *out);

/*
 Feasibility bounds; all rates in one frequency unit.

 # Safety
 `out` must be valid for one write.
 */
enum GpStatus gp_feasibility(double g0,
                             double kappa,
                             double gamma,
                             uint64_t atoms,
                             double requested_alpha_sq,
                             struct GpFeasibility *out);

/*
 Library version as a static NUL-terminated string.
 */
const char *gp_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GEOPHASE_H */
