#ifndef HALLCANON_H
#define HALLCANON_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result of every call.
 */
typedef enum HcStatus {
  HC_STATUS_OK = 0,
  HC_STATUS_NULL_POINTER = 1,
  HC_STATUS_INVALID_ARGUMENT = 2,
  HC_STATUS_BUDGET = 3,
  HC_STATUS_UNSUPPORTED = 4,
  HC_STATUS_INTERNAL = 5,
  HC_STATUS_PANIC = 6,
} HcStatus;

/*
 A computed canonical basis of one class in one window.
 */
typedef struct HcBasis HcBasis;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Computes the canonical basis of class `(rank, degree)` at `window`.

 # Safety
 `out` must be valid for a pointer write. On success `*out` owns a handle
 that must be released with [`hc_basis_free`].
 */
enum HcStatus hc_basis_new(int32_t rank, int32_t degree, int32_t window, struct HcBasis **out);

/*
 Releases a basis handle. Null is ignored.

 # Safety
 `basis` must be null or a handle from [`hc_basis_new`] not yet freed.
 */
void hc_basis_free(struct HcBasis *basis);

/*
 Number of canonical elements.

 # Safety
 `basis` must be a live handle and `out` valid for a write.
 */
enum HcStatus hc_basis_len(const struct HcBasis *basis, size_t *out);

/*
 The PBW monomial indexing element `i`, e.g. `E[-1] s[1]`.

 # Safety
 `basis` must be a live handle and `out` valid for a pointer write. The
 string must be released with [`hc_string_free`].
 */
enum HcStatus hc_basis_index(const struct HcBasis *basis, size_t i, char **out);

/*
 Element `i` as JSON: class, window and `[e_part, partition, coefficient]`
 terms.

 # Safety
 As for [`hc_basis_index`].
 */
enum HcStatus hc_basis_element_json(const struct HcBasis *basis, size_t i, char **out);

/*
 Number of subsheaves `B <= C` with `C/B ~ A` over `F_q`. Sheaves use
 the text form `O(-1)+O+T(inf;2,1)`.

 # Safety
 The strings must be nul-terminated and `out` valid for a write.
 */
enum HcStatus hc_hall_number(uint32_t q,
                             const char *c,
                             const char *b,
                             const char *a,
                             uint64_t *out);

/*
 Order of the automorphism group of a sheaf over `F_q`.

 # Safety
 `sheaf` must be nul-terminated and `out` valid for a write.
 */
enum HcStatus hc_aut_count(uint32_t q, const char *sheaf, uint64_t *out);

/*
 Copy of the calling thread's last error message, or null if none.

 # Safety
 The returned string must be released with [`hc_string_free`].
 */
char *hc_last_error(void);

/*
 Releases a string returned by this library. Null is ignored.

 # Safety
 `s` must be null or a string from this library not yet freed.
 */
void hc_string_free(char *s);

/*
 Library version, a static string the caller must not free.
 */
const char *hc_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HALLCANON_H */
