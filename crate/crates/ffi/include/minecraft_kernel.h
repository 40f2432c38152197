#ifndef MINECRAFT_KERNEL_H
#define MINECRAFT_KERNEL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum MkStatus {
  MK_STATUS_OK = 0,
  MK_STATUS_NULL_POINTER = 1,
  MK_STATUS_INVALID_ARGUMENT = 2,
  MK_STATUS_CONFIG = 3,
  MK_STATUS_NUMERICAL = 4,
  MK_STATUS_IO = 5,
  MK_STATUS_PANIC = 6,
} MkStatus;

/**
 * A stationary multi-output kernel.
 */
typedef struct MkKernel MkKernel;

/**
 * A real multi-output spectral density.
 */
typedef struct MkSpectrum MkSpectrum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failing call on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *mk_last_error(void);

/**
 * Library version, NUL terminated, static.
 */
const char *mk_version(void);

/**
 * Builds a kernel from a TOML table with a `type` key.
 *
 * # Safety
 * `toml` must be a NUL-terminated string and `out` a writable pointer.
 */
enum MkStatus mk_kernel_from_toml(const char *toml, struct MkKernel **out);

/**
 * Releases a kernel; NULL is ignored.
 *
 * # Safety
 * `kernel` must come from [`mk_kernel_from_toml`] and not be used again.
 */
void mk_kernel_free(struct MkKernel *kernel);

/**
 * Number of outputs and input dimension.
 *
 * # Safety
 * `kernel` must be a live handle; `outputs` and `dim` writable or NULL.
 */
enum MkStatus mk_kernel_shape(const struct MkKernel *kernel, size_t *outputs, size_t *dim);

/**
 * `K_ij(lag)` with `lag` of length `dim`.
 *
 * # Safety
 * `kernel` must be a live handle, `lag` readable for `dim` values and
 * `out` writable.
 */
enum MkStatus mk_kernel_eval(const struct MkKernel *kernel,
                             size_t i,
                             size_t j,
                             const double *lag,
                             size_t dim,
                             double *out);

/**
 * Gram matrix of `n` points: `x` is `n x dim` row-major, `channels` has
 * `n` entries and `out` receives `n x n` row-major values.
 *
 * # Safety
 * Pointers must be valid for the stated lengths; `out` must not alias the
 * inputs.
 */
enum MkStatus mk_kernel_gram(const struct MkKernel *kernel,
                             const double *x,
                             const size_t *channels,
                             size_t n,
                             size_t dim,
                             double *out);

/**
 * Builds the spectral density of a Gaussian multi-output, unshifted
 * Minecraft or LMC kernel table.
 *
 * # Safety
 * `toml` must be a NUL-terminated string and `out` a writable pointer.
 */
enum MkStatus mk_spectrum_from_toml(const char *toml, struct MkSpectrum **out);

/**
 * Releases a spectrum; NULL is ignored.
 *
 * # Safety
 * `spectrum` must come from [`mk_spectrum_from_toml`] and not be used again.
 */
void mk_spectrum_free(struct MkSpectrum *spectrum);

/**
 * Spectral matrix at `nu` written row-major into `out`, which must hold
 * `channels * channels` values.
 *
 * # Safety
 * `spectrum` must be a live handle and the buffers valid for their lengths.
 */
enum MkStatus mk_spectrum_density(const struct MkSpectrum *spectrum,
                                  const double *nu,
                                  size_t dim,
                                  double *out,
                                  size_t out_len);

/**
 * Number of channels and input dimension.
 *
 * # Safety
 * `spectrum` must be a live handle; `channels` and `dim` writable or NULL.
 */
enum MkStatus mk_spectrum_shape(const struct MkSpectrum *spectrum, size_t *channels, size_t *dim);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MINECRAFT_KERNEL_H */
