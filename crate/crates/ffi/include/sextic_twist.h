#ifndef SEXTIC_TWIST_H
#define SEXTIC_TWIST_H

/* Generated by cbindgen from sextic-twist-ffi; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Success.
 */
#define STX_OK 0

/**
 * Invalid parameters or a null pointer.
 */
#define STX_ERR_INVALID 2

/**
 * A configured cap was exceeded.
 */
#define STX_ERR_CAP 3

/**
 * An internal identity failed; no result is produced.
 */
#define STX_ERR_IDENTITY 4

/**
 * A panic was caught at the boundary.
 */
#define STX_ERR_PANIC 5

/**
 * Opaque dossier handle.
 */
typedef struct stx_dossier stx_dossier;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Build the full dossier for the twist y^2 = x^3 + t^(p^f) - t over
 * F_(p^nu)(t) and store a handle in `out`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one pointer.
 * On STX_OK the handle must be released with stx_dossier_free.
 */
int32_t stx_dossier_new(uint64_t p, uint32_t nu, uint32_t f, stx_dossier **out);

/**
 * Release a dossier handle.  A null handle is a no-op.
 *
 * # Safety
 * `handle` must be null or a pointer returned by stx_dossier_new that
 * has not been freed yet.
 */
void stx_dossier_free(stx_dossier *handle);

/**
 * Canonical JSON for the dossier; the string is owned by the caller.
 *
 * # Safety
 * `handle` must be a live handle from stx_dossier_new; `out` must point
 * to writable storage for one pointer.  Release the string with
 * stx_string_free.
 */
int32_t stx_dossier_json(const stx_dossier *handle, char **out);

/**
 * Analytic rank (equals the Mordell-Weil rank here).
 *
 * # Safety
 * `handle` must be a live handle; `out` must be writable.
 */
int32_t stx_dossier_rank(const stx_dossier *handle, uint32_t *out);

/**
 * Degree of the L-polynomial, 2(q-1).
 *
 * # Safety
 * `handle` must be a live handle; `out` must be writable.
 */
int32_t stx_dossier_l_degree(const stx_dossier *handle, uint64_t *out);

/**
 * Sign of the functional equation, +1 or -1.
 *
 * # Safety
 * `handle` must be a live handle; `out` must be writable.
 */
int32_t stx_dossier_functional_sign(const stx_dossier *handle, int8_t *out);

/**
 * p-adic valuation of the special value L*.
 *
 * # Safety
 * `handle` must be a live handle; `out` must be writable.
 */
int32_t stx_dossier_ord_p_lstar(const stx_dossier *handle, int64_t *out);

/**
 * Dimension of Sha: floor(q/6) when p = -1 mod 6, else 0.
 *
 * # Safety
 * `handle` must be a live handle; `out` must be writable.
 */
int32_t stx_dossier_dim_sha(const stx_dossier *handle, uint64_t *out);

/**
 * Brauer-Siegel ratio log(Reg |Sha|) / log H.
 *
 * # Safety
 * `handle` must be a live handle; `out` must be writable.
 */
int32_t stx_dossier_brauer_siegel(const stx_dossier *handle, double *out);

/**
 * Exact special value L* as a "num/den" string owned by the caller.
 *
 * # Safety
 * `handle` must be a live handle; `out` must point to writable storage
 * for one pointer.  Release the string with stx_string_free.
 */
int32_t stx_dossier_lstar(const stx_dossier *handle, char **out);

/**
 * Message for the most recent error on this thread, or null if none.
 * The string is owned by the caller.
 *
 * # Safety
 * The returned pointer, when non-null, must be released with
 * stx_string_free.
 */
char *stx_last_error_message(void);

/**
 * Release a string returned by this library.  A null pointer is a no-op.
 *
 * # Safety
 * `text` must be null or a string pointer returned by this library that
 * has not been freed yet.
 */
void stx_string_free(char *text);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* SEXTIC_TWIST_H */
