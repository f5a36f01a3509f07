// Temporary diagnostic: why does the MIMO rate oscillate between outers?
#include "test_util.hpp"

#include <cstdio>

using namespace rimsa;

int main() {
  Rng rng = test::make_rng(421);
  MimoConfig cfg = test::small_mimo_config(4, 2, 2, 2, 2, 2, std::pow(10.0, 0.5));
  RcgParams rcg;
  rcg.max_iter = 60;
  const auto ch = test::random_mimo_channel(cfg, rng, 5);

  MimoState st = MimoState::init(cfg, rng);
  for (int i = 0; i < cfg.n_users; ++i) st.u[i] = update_combiner(i, st, ch, cfg);

  for (int outer = 1; outer <= 40; ++outer) {
    WmmsePmoOptions opt;
    opt.outer_iters = 1;
    opt.rcg = rcg;
    WmmsePmoResult res = wmmse_pmo(ch, cfg, opt, st);
    st = res.state;

    double rate = 0.0;
    double min_eig = 1e300, min_su = 1e300;
    for (int i = 0; i < cfg.n_users; ++i) {
      rate += user_rate(i, st, ch, cfg);
      const MatC g = st.w_rf[i].values * (ch.per_user[i] * st.v.values);
      MatC rn = MatC::Zero(cfg.n_streams, cfg.n_streams);
      for (int j = 0; j < cfg.n_users; ++j) {
        if (j == i) continue;
        const MatC x = st.u[i] * (g * st.w_d_user(j, cfg));
        rn += x * x.adjoint();
      }
      const MatC uw = st.u[i] * st.w_rf[i].values;
      rn += cfg.noise_var * uw * uw.adjoint();
      Eigen::SelfAdjointEigenSolver<MatC> es(rn);
      min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
      Eigen::JacobiSVD<MatC> svd(st.u[i]);
      min_su = std::min(min_su, svd.singularValues().minCoeff());
    }
    std::printf("%2d rate=%9.4f  min_eig(Rn)=%.3e  min_sv(U)=%.3e\n", outer, rate, min_eig,
                min_su);
  }
  return 0;
}
