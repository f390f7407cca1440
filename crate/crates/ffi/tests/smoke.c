#include <stdio.h>
#include <string.h>

#include "formsteklov.h"

#define CHECK(call)                                                            \
  do {                                                                         \
    enum FsStatus s = (call);                                                  \
    if (s != FS_STATUS_OK) {                                                   \
      fprintf(stderr, "%s -> %d: %s\n", #call, (int)s, fs_last_error_message()); \
      return 1;                                                                \
    }                                                                          \
  } while (0)

int main(void) {
  FsMesh *mesh = NULL;
  FsSpectrum *spec = NULL;
  size_t len = 0, kernel = 0, betti[3] = {0};
  double ev[8];

  CHECK(fs_mesh_generate("{\"family\":\"disk\"}", 3, &mesh));
  CHECK(fs_mesh_betti(mesh, betti, 3));
  CHECK(fs_spectrum_compute(mesh, 0, false, 4, &spec));
  CHECK(fs_spectrum_len(spec, &len));
  CHECK(fs_spectrum_eigenvalues(spec, ev, 8));
  CHECK(fs_spectrum_kernel_dim(spec, &kernel));
  printf("%s b0=%zu kernel=%zu nu2=%.6f\n", fs_version(), betti[0], kernel, ev[1]);
  if (len != 4 || kernel != 1 || ev[1] < 0.99 || ev[1] > 1.01) return 2;

  if (fs_mesh_generate("{\"family\":\"ellipse\",\"a\":0.5,\"b\":1.0}", 0, &mesh) != FS_STATUS_INVALID_ARGUMENT) return 3;
  if (strlen(fs_last_error_message()) == 0) return 4;

  fs_spectrum_free(spec);
  fs_mesh_free(mesh);
  return 0;
}
