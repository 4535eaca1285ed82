#include <math.h>
#include <stdio.h>
#include <string.h>

#include "bvstar.h"

#define CHECK(cond)                                              \
  do {                                                           \
    if (!(cond)) {                                               \
      fprintf(stderr, "check failed line %d: %s\n", __LINE__, #cond); \
      return 1;                                                  \
    }                                                            \
  } while (0)

int main(void) {
  double left[1] = {1.0};
  double right[1] = {0.0};
  BvsRiemann *sol = NULL;
  CHECK(bvs_riemann_solve(BVS_FLUX_BURGERS, 0.0, 0.0, left, right, 1, &sol) == BVS_STATUS_OK);
  CHECK(bvs_riemann_wave_count(sol) == 1);
  BvsWaveInfo wave;
  CHECK(bvs_riemann_wave(sol, 0, &wave) == BVS_STATUS_OK);
  CHECK(wave.kind == BVS_WAVE_KIND_SHOCK);
  CHECK(fabs(wave.speed_lo - 0.5) < 1e-12);
  double u[1];
  CHECK(bvs_riemann_sample(sol, 0.25, 1.0, u, 1) == BVS_STATUS_OK && u[0] == 1.0);
  CHECK(bvs_riemann_wave(sol, 3, &wave) == BVS_STATUS_OUT_OF_RANGE);
  CHECK(strlen(bvs_last_error_message()) > 0);
  bvs_riemann_free(sol);

  double vl[2] = {1.0, -10.0};
  double vr[2] = {1.0, 10.0};
  CHECK(bvs_riemann_solve(BVS_FLUX_P_SYSTEM, 1.0, 1.4, vl, vr, 2, &sol) == BVS_STATUS_VACUUM);
  CHECK(sol == NULL);

  double bps[1] = {0.3};
  double coeffs[4] = {0.0, 1.0, 2.0, 1.0};
  size_t lengths[2] = {2, 2};
  BvsBV *f = NULL;
  CHECK(bvs_bv_from_monomials(0.0, 1.0, bps, 1, coeffs, lengths, &f) == BVS_STATUS_OK);
  double tv = 0.0;
  CHECK(bvs_bv_total_variation(f, &tv) == BVS_STATUS_OK && fabs(tv - 3.0) < 1e-12);
  CHECK(bvs_bv_jump_count(f) == 1);
  bvs_bv_free(f);

  char *report = NULL;
  const char *cfg = "{\"flux\": {\"model\": \"burgers\"}, \"left\": [1], \"right\": [0], \"window\": [-2, 2]}";
  CHECK(bvs_run_json("riemann", cfg, -1, &report) == BVS_STATUS_OK);
  CHECK(strstr(report, "\"shock\"") != NULL);
  bvs_string_free(report);
  printf("ok %s\n", bvs_version());
  return 0;
}
