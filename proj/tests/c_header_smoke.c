#include <math.h>
#include <stdio.h>

#include "psflow/psflow.h"

int main(void) {
  psf_mesh* mesh = NULL;
  psf_result* result = NULL;
  psf_result_info info;
  if (psf_mesh_structured(2, &mesh) != PSF_OK) return 1;
  if (psf_solve(mesh, PSF_SOLENOIDAL, 1.0, 1, &result) != PSF_OK) return 1;
  if (psf_result_info_get(result, &info) != PSF_OK) return 1;
  printf("psflow %s: dof_v=%d err_u_h1=%.3e\n", psf_version(), info.dof_v, info.err_u_h1);
  psf_result_free(result);
  psf_mesh_free(mesh);
  return info.dof_v == 3 && isfinite(info.err_u_h1) ? 0 : 1;
}
