/* The public header must compile as C. */
#include "laplace/laplace_asym.h"

int main(void) {
  lasym_quadrature_config cfg;
  lasym_quadrature_defaults(&cfg);
  return cfg.base_order > 1 && lasym_version()[0] != '\0' ? 0 : 1;
}
