/* Compiles the public header as C and exercises a minimal round trip. */
#include <stdio.h>

#include "rss/rss.h"

int main(void) {
  rss_geometry *g = NULL;
  int shifts[8];
  if (rss_geometry_linear(8, 0.7, 0, &g) != RSS_OK) return 1;
  if (rss_compute_delays(g, 90.0, shifts) != RSS_OK) return 1;
  for (int i = 0; i < 8; ++i)
    if (shifts[i] != 0) return 1;
  if (rss_geometry_linear(0, 0.7, 0, NULL) == RSS_OK) return 1;
  printf("rss %s\n", rss_version());
  rss_geometry_free(g);
  return 0;
}
