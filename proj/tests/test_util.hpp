#pragma once

#include "rimsa/channel.hpp"
#include "rimsa/manifold.hpp"
#include "rimsa/mimo.hpp"
#include "rimsa/miso.hpp"

#include <functional>

namespace rimsa::test {

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

inline MatC random_complex(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  MatC m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = complex_normal(rng);
  return m;
}

// Schoolbook matrix product, kept independent of the library's Eigen path.
inline MatC naive_mul(const MatC& a, const MatC& b) {
  MatC out = MatC::Zero(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j)
      for (Eigen::Index k = 0; k < a.cols(); ++k) out(i, j) += a(i, k) * b(k, j);
  return out;
}

// Central finite differences of a real scalar over the supported entries of
// an ambient matrix, packed as d/dRe + j d/dIm.
inline MatC central_diff(const std::function<double(const MatC&)>& f, const MatC& x,
                         const BlockDiagPattern& support, double step = 1e-6) {
  MatC grad = MatC::Zero(x.rows(), x.cols());
  for (const auto& b : support.blocks) {
    for (Eigen::Index j = 0; j < b.cols; ++j)
      for (Eigen::Index i = 0; i < b.rows; ++i) {
        const Eigen::Index r = b.row + i;
        const Eigen::Index c = b.col + j;
        MatC xp = x, xm = x;
        xp(r, c) += step;
        xm(r, c) -= step;
        const double dre = (f(xp) - f(xm)) / (2.0 * step);
        xp = x;
        xm = x;
        xp(r, c) += Cplx(0.0, step);
        xm(r, c) -= Cplx(0.0, step);
        const double dim = (f(xp) - f(xm)) / (2.0 * step);
        grad(r, c) = Cplx(dre, dim);
      }
  }
  return grad;
}

inline MisoConfig small_miso_config(int n_rf = 2, int n_per = 2, int users = 2, int n_rx = 2,
                                    double power = 4.0) {
  MisoConfig cfg;
  cfg.n_rf = n_rf;
  cfg.n_per_rimsa = n_per;
  cfg.n_users = users;
  cfg.n_rx = n_rx;
  cfg.power = power;
  cfg.noise_vars = VecD::Ones(users);
  return cfg;
}

// Feasible state with random phases, a random precoder at 80% of the power
// budget, and FP auxiliaries consistent with it.
inline MisoState random_miso_state(const MisoConfig& cfg, const ChannelRealization& ch, Rng& rng) {
  MisoState st = MisoState::init(cfg, rng);
  st.w = random_complex(cfg.n_rf, cfg.n_users, rng);
  const double power = (st.v.values * st.w).squaredNorm();
  st.w *= std::sqrt(0.8 * cfg.power / power);
  st.eta = update_eta(st, ch, cfg);
  st.alpha = update_alpha(st, ch, cfg);
  return st;
}

inline ChannelRealization random_miso_channel(const MisoConfig& cfg, Rng& rng, int n_paths = 3) {
  return sample_multiuser_channel(rng, upa_for(cfg.n_t()), upa_for(cfg.n_rx), cfg.n_users,
                                  n_paths);
}

inline MimoConfig small_mimo_config(int n_rf_tx = 2, int n_per_tx = 2, int users = 2,
                                    int n_rf_rx = 2, int n_per_rx = 2, int streams = 2,
                                    double power = 4.0) {
  MimoConfig cfg;
  cfg.n_rf_tx = n_rf_tx;
  cfg.n_per_rimsa_tx = n_per_tx;
  cfg.n_users = users;
  cfg.n_rf_rx = n_rf_rx;
  cfg.n_per_rimsa_rx = n_per_rx;
  cfg.n_streams = streams;
  cfg.power = power;
  cfg.noise_var = 1.0;
  return cfg;
}

inline ChannelRealization random_mimo_channel(const MimoConfig& cfg, Rng& rng, int n_paths = 3) {
  return sample_multiuser_channel(rng, upa_for(cfg.n_t()), upa_for(cfg.n_r()), cfg.n_users,
                                  n_paths);
}

// Feasible state with random phases, random digital matrices at 80% power,
// random Hermitian PD weights.
inline MimoState random_mimo_state(const MimoConfig& cfg, const ChannelRealization& ch, Rng& rng) {
  MimoState st = MimoState::init(cfg, rng);
  st.w_d = random_complex(cfg.n_rf_tx, cfg.n_users * cfg.n_streams, rng);
  st.w_d *= std::sqrt(0.8 * cfg.power / (st.v.values * st.w_d).squaredNorm());
  for (int i = 0; i < cfg.n_users; ++i) {
    st.u[i] = random_complex(cfg.n_streams, cfg.n_rf_rx, rng);
    const MatC a = random_complex(cfg.n_streams, cfg.n_streams, rng);
    st.weights[i] = a * a.adjoint() + 0.5 * MatC::Identity(cfg.n_streams, cfg.n_streams);
  }
  return st;
}

}  // namespace rimsa::test
