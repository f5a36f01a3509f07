// Temporary diagnostic: how non-monotone is the printed FP update?
#include "test_util.hpp"

#include <cstdio>

using namespace rimsa;

int main() {
  Rng rng = test::make_rng(221);
  const MisoConfig cfg = test::small_miso_config(4, 4, 2, 2, std::pow(10.0, 0.5));

  double worst_fp_drop = 0.0, worst_outer_drop = 0.0;
  for (int k = 0; k < 40; ++k) {
    const auto ch = test::random_miso_channel(cfg, rng, 4);
    MisoState st = MisoState::init(cfg, rng);
    double prev_rate = sum_rate(st, ch, cfg);
    for (int outer = 0; outer < 30; ++outer) {
      // FP block only, tracking the rate between rounds.
      for (int r = 0; r < 50; ++r) {
        st.eta = update_eta(st, ch, cfg);
        st.alpha = update_alpha(st, ch, cfg);
        auto [lambda, w] = solve_lambda(st, ch, cfg);
        st.lambda = lambda;
        st.w = w;
        const double rate = sum_rate(st, ch, cfg);
        if (rate < prev_rate) worst_fp_drop = std::max(worst_fp_drop, prev_rate - rate);
        prev_rate = rate;
      }
      // PMO block.
      FpPmoOptions opt;
      opt.outer_iters = 1;
      opt.fp_max_rounds = 0;
      RcgParams rcg;
      rcg.max_iter = 60;
      opt.rcg = rcg;
      FpPmoResult res = fp_pmo(ch, cfg, opt, st);
      st = res.state;
      const double rate = sum_rate(st, ch, cfg);
      if (rate < prev_rate) worst_outer_drop = std::max(worst_outer_drop, prev_rate - rate);
      prev_rate = rate;
    }
  }
  std::printf("worst FP-round drop:  %.3e bits\n", worst_fp_drop);
  std::printf("worst PMO-step drop:  %.3e bits\n", worst_outer_drop);
  return 0;
}
