#include <stdio.h>
#include "orient_ffi.h"
int main(void) {
  OrientGraph *g = NULL;
  if (orient_graph_parse("0 1 0.5\n0 2 0.5\n1 2 0.5\n", &g) != ORIENT_STATUS_OK) return 1;
  size_t s[] = {0}, t[] = {1};
  double p = 0;
  OrientStatus st = orient_exact(g, ORIENT_METHOD_RECURSION, s, 1, t, 1, &p);
  printf("%d %.17g %s\n", st, p, orient_version());
  orient_graph_free(g);
  return 0;
}
