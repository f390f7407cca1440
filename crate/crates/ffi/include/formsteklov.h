#ifndef FORMSTEKLOV_H
#define FORMSTEKLOV_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/*
 Status codes returned by every fallible function.
 */
typedef enum FsStatus {
  FS_STATUS_OK = 0,
  FS_STATUS_NULL_POINTER = 1,
  FS_STATUS_INVALID_ARGUMENT = 2,
  FS_STATUS_SOLVER_FAILURE = 3,
  FS_STATUS_IO = 4,
  FS_STATUS_BUFFER_TOO_SMALL = 5,
  FS_STATUS_PANIC = 6,
} FsStatus;

/*
 A simplicial mesh of a benchmark domain.
 */
typedef struct FsMesh FsMesh;

/*
 Lowest eigenvalues of one DtN problem on one mesh.
 */
typedef struct FsSpectrum FsSpectrum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread; empty after a success.
 The pointer stays valid until the next call on the same thread.
 */
const char *fs_last_error_message(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *fs_version(void);

/*
 Generates a benchmark mesh. `family_json` names the family and its
 parameters, e.g. `{"family":"ellipse","a":1.0,"b":0.7}`.

 # Safety
 `family_json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum FsStatus fs_mesh_generate(const char *family_json, uint32_t level, struct FsMesh **out);

/*
 Reads a mesh file written by [`fs_mesh_write`] or `formsteklov gen`.

 # Safety
 `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum FsStatus fs_mesh_read(const char *path, struct FsMesh **out);

/*
 # Safety
 `mesh` must come from this library and `path` be a NUL-terminated string.
 */
enum FsStatus fs_mesh_write(const struct FsMesh *mesh, const char *path);

/*
 Spatial dimension of the mesh (2 or 3).

 # Safety
 `mesh` must come from this library and `out` be a valid pointer.
 */
enum FsStatus fs_mesh_dim(const struct FsMesh *mesh, uint32_t *out);

/*
 Number of k-simplices.

 # Safety
 `mesh` must come from this library and `out` be a valid pointer.
 */
enum FsStatus fs_mesh_count(const struct FsMesh *mesh, uint32_t k, uintptr_t *out);

/*
 Betti numbers `b_0..b_dim` written into `buf`, which must hold
 `dim + 1` entries.

 # Safety
 `mesh` must come from this library and `buf` hold `cap` entries.
 */
enum FsStatus fs_mesh_betti(const struct FsMesh *mesh, uintptr_t *buf, uintptr_t cap);

/*
 # Safety
 `mesh` must come from this library or be null; it is invalid afterwards.
 */
void fs_mesh_free(struct FsMesh *mesh);

/*
 Lowest `count` eigenvalues of the absolute (`relative = false`) or
 relative DtN problem in degree `degree`.

 # Safety
 `mesh` must come from this library and `out` be a valid pointer.
 */
enum FsStatus fs_spectrum_compute(const struct FsMesh *mesh,
                                  uint32_t degree,
                                  bool relative,
                                  uint32_t count,
                                  struct FsSpectrum **out);

/*
 Number of eigenvalues held.

 # Safety
 `spectrum` must come from this library and `out` be a valid pointer.
 */
enum FsStatus fs_spectrum_len(const struct FsSpectrum *spectrum, uintptr_t *out);

/*
 Copies the eigenvalues, ascending, into `buf`.

 # Safety
 `spectrum` must come from this library and `buf` hold `cap` entries.
 */
enum FsStatus fs_spectrum_eigenvalues(const struct FsSpectrum *spectrum,
                                      double *buf,
                                      uintptr_t cap);

/*
 Number of eigenvalues counted as kernel.

 # Safety
 `spectrum` must come from this library and `out` be a valid pointer.
 */
enum FsStatus fs_spectrum_kernel_dim(const struct FsSpectrum *spectrum, uintptr_t *out);

/*
 # Safety
 `spectrum` must come from this library or be null; it is invalid
 afterwards.
 */
void fs_spectrum_free(struct FsSpectrum *spectrum);

/*
 Relative spread of the boundary flux of the mean exit time.

 # Safety
 `mesh` must come from this library and `out` be a valid pointer.
 */
enum FsStatus fs_exit_time_defect(const struct FsMesh *mesh, double *out);

/*
 First biharmonic Steklov eigenvalue.

 # Safety
 `mesh` must come from this library and `out` be a valid pointer.
 */
enum FsStatus fs_biharmonic_mu1(const struct FsMesh *mesh, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FORMSTEKLOV_H */
