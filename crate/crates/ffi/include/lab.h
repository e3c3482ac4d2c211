/* C interface of the 3-torus spectral laboratory. */

#ifndef LAB_FFI_H
#define LAB_FFI_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Dealiasing rule selector: 0 keeps the full cube, 1 applies the
// two-thirds rule.
typedef enum LabDealias {
  LAB_DEALIAS_NONE = 0,
  LAB_DEALIAS_TWO_THIRDS = 1,
} LabDealias;

// Status codes returned by every entry point.
typedef enum LabStatus {
  LAB_STATUS_OK = 0,
  LAB_STATUS_NULL_POINTER = 1,
  LAB_STATUS_INVALID_ARGUMENT = 2,
  LAB_STATUS_IO_ERROR = 3,
  LAB_STATUS_NUMERIC_ERROR = 4,
  LAB_STATUS_GUARD_EXCEEDED = 5,
  LAB_STATUS_PANIC = 6,
} LabStatus;

// Opaque handle around a spectral velocity field.
typedef struct LabField LabField;

// One audited inequality in flat form.
typedef struct LabAudit {
  double lhs;
  double rhs;
  double constant;
  double slack;
  // 1 when the audit passes, 0 otherwise.
  int32_t pass;
} LabAudit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the most recent error on this thread. The pointer
// stays valid until the next failing call on the same thread.
const char *lab_last_error_message(void);

// Library version as a static string.
const char *lab_version(void);

// Taylor-Green vortex coefficients at the given amplitude.
//
// # Safety
// `out` must point to writable storage for one handle pointer.
enum LabStatus lab_field_taylor_green(uint32_t n,
                                      enum LabDealias dealias,
                                      double amplitude,
                                      struct LabField **out);

// Deterministic random divergence-free field with `|k|^-slope` decay.
//
// # Safety
// `out` must point to writable storage for one handle pointer.
enum LabStatus lab_field_random_solenoidal(uint32_t n,
                                           enum LabDealias dealias,
                                           double slope,
                                           uint64_t seed,
                                           struct LabField **out);

// Read a `SPECFIELD v1` snapshot.
//
// # Safety
// `path` must be a NUL-terminated string; `out` as above.
enum LabStatus lab_field_read(const char *path, enum LabDealias dealias, struct LabField **out);

// Write a `SPECFIELD v1` snapshot.
//
// # Safety
// `field` must be a live handle; `path` a NUL-terminated string.
enum LabStatus lab_field_write(const struct LabField *field, const char *path);

// Release a field handle. Null is accepted.
//
// # Safety
// `field` must come from a `lab_field_*` constructor and not be used
// afterwards.
void lab_field_free(struct LabField *field);

// Lattice resolution N of a field handle.
//
// # Safety
// `field` must be a live handle.
uint32_t lab_field_resolution(const struct LabField *field);

// Homogeneous Sobolev norm of order s.
//
// # Safety
// `field` must be a live handle and `out` writable.
enum LabStatus lab_sobolev_norm(const struct LabField *field, double s, double *out);

// Absolute-sum norm with weight `|k|^r`.
//
// # Safety
// `field` must be a live handle and `out` writable.
enum LabStatus lab_fr_norm(const struct LabField *field, double r, double *out);

// L2 norm of a field.
//
// # Safety
// `field` must be a live handle and `out` writable.
enum LabStatus lab_l2_norm(const struct LabField *field, double *out);

// The convection trilinear form via the fast pseudo-spectral route.
//
// # Safety
// `field` must be a live handle and `out` writable.
enum LabStatus lab_trilinear_form(const struct LabField *field, double s, double *out);

// Normalized residual of the cancellation identity.
//
// # Safety
// `field` must be a live handle and `out` writable.
enum LabStatus lab_cancellation_residual(const struct LabField *field, double s, double *out);

// Carlson integral constant `int_0^inf y^{3/2-s}/(1+y^2) dy`.
//
// # Safety
// `out` must be writable.
enum LabStatus lab_carlson_integral_constant(double s, double *out);

// F^1 integral constant `int_0^inf y^2/(1+y^{2s-2}) dy`.
//
// # Safety
// `out` must be writable.
enum LabStatus lab_euler_integral_constant(double s, double *out);

// Existence-time lower bound `K_s ||u0||_s^{-4/(2s-1)}` at viscosity nu.
//
// # Safety
// `field` must be a live handle and `out` writable.
enum LabStatus lab_existence_time_bound(const struct LabField *field,
                                        double s,
                                        double nu,
                                        double *out);

// Carlson majorant audit of `sum |u_hat| |k|^{(s-1/2)/2}`.
//
// # Safety
// `field` must be a live handle and `out` writable.
enum LabStatus lab_carlson_majorant_audit(const struct LabField *field,
                                          double s,
                                          struct LabAudit *out);

// F^1 majorant audit for s > 5/2.
//
// # Safety
// `field` must be a live handle and `out` writable.
enum LabStatus lab_f1_majorant_audit(const struct LabField *field, double s, struct LabAudit *out);

// Integrate the truncated dynamics from the handle's field and write the
// trajectory CSV to `csv_path`. The handle itself is not modified.
//
// # Safety
// `field` must be a live handle; `csv_path` a NUL-terminated string.
enum LabStatus lab_evolve_to_csv(const struct LabField *field,
                                 double nu,
                                 double dt,
                                 double t_end,
                                 uint32_t sample_every,
                                 double s,
                                 const char *csv_path);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* LAB_FFI_H */
