#ifndef KRUGLOV_H
#define KRUGLOV_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of a call. The numeric values match the CLI exit codes.
typedef enum KrStatus {
  KR_STATUS_OK = 0,
  // A verification ran and at least one check failed.
  KR_STATUS_CHECK_FAILED = 1,
  // Malformed input, bad argument or null pointer.
  KR_STATUS_INVALID_INPUT = 2,
  // A mathematical precondition does not hold.
  KR_STATUS_PRECONDITION = 3,
  // An atom or dimension cap was hit.
  KR_STATUS_CAP_EXCEEDED = 4,
  // The library panicked. This is a bug.
  KR_STATUS_INTERNAL = 5,
} KrStatus;

// Opaque finitely supported probability law.
typedef struct KrDistribution KrDistribution;

// Opaque Orlicz function.
typedef struct KrOrlicz KrOrlicz;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread, or null if none.
// The pointer stays valid until the next failing call on the same thread.
const char *kr_last_error(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void kr_string_free(char *s);

// Parses an Orlicz function from its JSON description,
// e.g. `{"family":"Mp","p":1.5}`.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a writable pointer.
enum KrStatus kr_orlicz_from_json(const char *json, struct KrOrlicz **out);

// Releases an Orlicz handle. Null is ignored.
//
// # Safety
// `m` must come from [`kr_orlicz_from_json`] and not have been freed.
void kr_orlicz_free(struct KrOrlicz *m);

// `M(t)`, or NaN for a null handle.
//
// # Safety
// `m` must be null or a live handle.
double kr_orlicz_eval(const struct KrOrlicz *m, double t);

// Luxemburg norm of the sequence `x[0..len]` in `l_M`.
//
// # Safety
// `m` must be a live handle, `x` must hold `len` values, `out` must be writable.
enum KrStatus kr_luxemburg_seq_norm(const struct KrOrlicz *m,
                                    const double *x,
                                    size_t len,
                                    double *out);

// Builds a law from `len` atoms `(values[i], masses[i])`. Total mass must not exceed 1;
// any deficit is placed at 0.
//
// # Safety
// `values` and `masses` must hold `len` values, `out` must be writable.
enum KrStatus kr_distribution_new(const double *values,
                                  const double *masses,
                                  size_t len,
                                  struct KrDistribution **out);

// Releases a law handle. Null is ignored.
//
// # Safety
// `d` must come from this library and not have been freed.
void kr_distribution_free(struct KrDistribution *d);

// Number of atoms, or 0 for a null handle.
//
// # Safety
// `d` must be null or a live handle.
size_t kr_distribution_len(const struct KrDistribution *d);

// Copies the atoms, sorted by value, into `values` and `masses`.
// `cap` is the capacity of both buffers and must be at least the atom count.
//
// # Safety
// `d` must be a live handle and both buffers must hold `cap` values.
enum KrStatus kr_distribution_atoms(const struct KrDistribution *d,
                                    double *values,
                                    double *masses,
                                    size_t cap);

// Exact Kruglov law truncated after `kmax` convolution powers. The omitted
// mass is written to `tail_mass` when it is non-null.
//
// # Safety
// `d` must be a live handle and `out` writable.
enum KrStatus kr_kruglov_exact(const struct KrDistribution *d,
                               size_t kmax,
                               struct KrDistribution **out,
                               double *tail_mass);

// Empirical Kruglov law from `trials` seeded samples.
//
// # Safety
// `d` must be a live handle and `out` writable.
enum KrStatus kr_kruglov_mc(const struct KrDistribution *d,
                            uint64_t seed,
                            uint64_t trials,
                            struct KrDistribution **out);

// Characteristic function of the Kruglov law at `t`, in closed form.
//
// # Safety
// `d` must be a live handle and `re`, `im` writable.
enum KrStatus kr_kruglov_charfn(const struct KrDistribution *d, double t, double *re, double *im);

// Runs a verification suite by name (`first-orlicz`, `kws`, ..., `all`).
// `trials == 0` keeps each suite's default. On `Ok` or `CheckFailed`,
// `*out` receives a JSON array of reports to release with [`kr_string_free`].
//
// # Safety
// `suite` must be a NUL-terminated string and `out` writable.
enum KrStatus kr_verify_suite_json(const char *suite, uint64_t seed, size_t trials, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KRUGLOV_H */
