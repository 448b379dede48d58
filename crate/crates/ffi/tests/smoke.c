#include <math.h>
#include <stdio.h>
#include <string.h>
#include "covqec.h"

#define CHECK(cond)                                              \
  do {                                                           \
    if (!(cond)) {                                               \
      fprintf(stderr, "check failed at line %d: %s\n", __LINE__, \
              #cond);                                            \
      return 1;                                                  \
    }                                                            \
  } while (0)

int main(int argc, char **argv) {
  CovqecU1Code *code = NULL;
  CHECK(covqec_u1_code_sample(6, 1, 3, 7, &code) == COVQEC_STATUS_OK);
  CovqecErrorReport report;
  CHECK(covqec_u1_code_errors(code, 1, &report) == COVQEC_STATUS_OK);
  CHECK(report.eps_choi_upper > 0.0 && report.eps_choi_upper < 1.0);
  CHECK(report.decoupling_term + report.symmetry_term >= report.eps_choi_upper - 1e-10);
  if (argc > 1) {
    CovqecU1Code *loaded = NULL;
    CovqecErrorReport again;
    CHECK(covqec_u1_code_save(code, argv[1]) == COVQEC_STATUS_OK);
    CHECK(covqec_u1_code_load(argv[1], &loaded) == COVQEC_STATUS_OK);
    CHECK(covqec_u1_code_errors(loaded, 1, &again) == COVQEC_STATUS_OK);
    CHECK(memcmp(&report, &again, sizeof report) == 0);
    covqec_u1_code_free(loaded);
  }
  covqec_u1_code_free(code);

  CovqecSymmetryTerm sym;
  CHECK(covqec_u1_choi_symmetry_term(1000, 1, 1, 500, &sym) == COVQEC_STATUS_OK);
  CHECK(fabs(sym.purified * 2000.0 - 1.0) < 0.05);

  CHECK(covqec_u1_code_sample(4, 4, 1, 0, &code) == COVQEC_STATUS_INVALID_ARGUMENT);
  CHECK(covqec_last_error() != NULL && strlen(covqec_last_error()) > 0);
  CHECK(covqec_u1_code_errors(NULL, 1, &report) == COVQEC_STATUS_NULL_POINTER);

  double bell_re[16] = {0.5, 0, 0, 0.5, 0, 0, 0, 0, 0, 0, 0, 0, 0.5, 0, 0, 0.5};
  double zeros[16] = {0};
  double h = 0.0;
  CHECK(covqec_hmin_sdp(bell_re, zeros, 2, 2, &h) == COVQEC_STATUS_OK);
  CHECK(fabs(h + 1.0) < 1e-6);

  CovqecSchur *schur = NULL;
  size_t count = 0, l = 0, r = 0, total = 0;
  CHECK(covqec_schur_new(3, 2, &schur) == COVQEC_STATUS_OK);
  CHECK(covqec_schur_block_count(schur, &count) == COVQEC_STATUS_OK);
  for (size_t i = 0; i < count; i++) {
    CHECK(covqec_schur_block_dims(schur, i, &l, &r) == COVQEC_STATUS_OK);
    total += l * r;
  }
  CHECK(total == 8);
  CHECK(covqec_schur_block_dims(schur, count, &l, &r) == COVQEC_STATUS_INVALID_ARGUMENT);
  covqec_schur_free(schur);
  printf("ok %s\n", covqec_version());
  return 0;
}
