// Temporary diagnostic: wmmse_pmo objective deltas per outer iteration.
#include "test_util.hpp"

#include <cstdio>

using namespace rimsa;

int main() {
  Rng rng = test::make_rng(421);
  MimoConfig cfg = test::small_mimo_config(4, 2, 2, 2, 2, 2, std::pow(10.0, 0.5));
  RcgParams rcg;
  rcg.max_iter = 60;
  const auto ch = test::random_mimo_channel(cfg, rng, 5);
  const WmmsePmoResult res = wmmse_pmo(ch, cfg, 60, rcg, rng);
  std::printf("converged=%d outer=%d\n", res.converged, res.outer_iterations);
  for (std::size_t i = 1; i < res.objective_trace.size(); ++i)
    std::printf("%2zu  obj=%.12f  delta=%.3e  rate=%.6f\n", i, res.objective_trace[i],
                res.objective_trace[i - 1] - res.objective_trace[i], res.rate_trace[i]);
  return 0;
}
