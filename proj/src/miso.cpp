#include "rimsa/miso.hpp"

#include "power_bisect.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rimsa {

namespace {

constexpr double kLn2 = 0.6931471805599453;
constexpr double kPowerRelTol = 1e-10;
constexpr double kLambdaIntervalTol = 1e-12;

struct PhiStats {
  VecD signal;      // |Phi_mm|^2
  VecD intf_noise;  // sum_{i != m} |Phi_mi|^2 + N_r sigma_m^2
  VecD total;       // sum_i |Phi_mi|^2 + N_r sigma_m^2
};

PhiStats phi_stats(const MatC& phi, const MisoConfig& cfg) {
  const int m_users = cfg.n_users;
  PhiStats s;
  s.signal.resize(m_users);
  s.intf_noise.resize(m_users);
  s.total.resize(m_users);
  for (int m = 0; m < m_users; ++m) {
    const double row_power = phi.row(m).squaredNorm();
    const double sig = std::norm(phi(m, m));
    const double noise = cfg.noise_vars[m] * cfg.n_rx;
    s.signal[m] = sig;
    s.intf_noise[m] = row_power - sig + noise;
    s.total[m] = row_power + noise;
  }
  return s;
}

MatC build_phi_raw(const MatC& v, const MatC& f, const MatC& w, const ChannelRealization& ch) {
  return f * (ch.stacked * (v * w));
}

// M x N_RF matrix whose m-th row is the equivalent channel f_m^H H_m V.
MatC effective_channel_matrix(const MisoState& state, const ChannelRealization& ch) {
  return state.f.values * (ch.stacked * state.v.values);
}

double power_of(const MatC& v, const MatC& w) { return (v * w).squaredNorm(); }

// Shared middle factor of the Appendix-style gradients:
//   S = (Phi^H .* offdiag) D1 - Phi^H D2
// with D1/D2 the diagonal inverses of the two determinant arguments.
MatC gradient_core(const MatC& phi, const PhiStats& s) {
  MatC phi_h = phi.adjoint();
  MatC phi_h_off = phi_h;
  phi_h_off.diagonal().setZero();
  const VecC d1 = s.intf_noise.cwiseInverse().cast<Cplx>();
  const VecC d2 = s.total.cwiseInverse().cast<Cplx>();
  return phi_h_off * d1.asDiagonal() - phi_h * d2.asDiagonal();
}

void g2_grads_raw(const MatC& v, const MatC& f, const MatC& w, const ChannelRealization& ch,
                  const MisoConfig& cfg, MatC* grad_v, MatC* grad_f) {
  const MatC vw = v * w;
  const MatC hvw = ch.stacked * vw;
  const MatC phi = f * hvw;
  const PhiStats s = phi_stats(phi, cfg);
  const MatC core = gradient_core(phi, s);
  const double scale = 2.0 / kLn2;
  if (grad_f) {
    const MatC a = hvw * core;  // M N_r x M
    *grad_f = scale * cfg.f_pattern().mask(a.adjoint());
  }
  if (grad_v) {
    const MatC fh = f * ch.stacked;   // M x N_t
    const MatC b = w * core * fh;     // N_RF x N_t
    *grad_v = scale * cfg.v_pattern().mask(b.adjoint());
  }
}

// FP surrogate of the augmented problem, in nats: substituting the optimal
// eta recovers ln(2) times the sum rate.
double fp_surrogate(const MisoState& state, const ChannelRealization& ch, const MisoConfig& cfg) {
  const MatC heff = effective_channel_matrix(state, ch);
  const MatC hw = heff * state.w;  // (m, i) = h_m^H w_i
  double value = 0.0;
  for (int m = 0; m < cfg.n_users; ++m) {
    const double denom = hw.row(m).squaredNorm() + cfg.noise_vars[m] * cfg.n_rx;
    const double frac = (1.0 + state.eta[m]) * std::norm(hw(m, m)) / denom;
    value += std::log1p(state.eta[m]) - state.eta[m] + frac;
  }
  return value;
}

void check_channels(const ChannelRealization& ch, const MisoConfig& cfg) {
  if (ch.n_users() != cfg.n_users || ch.stacked.cols() != cfg.n_t() ||
      ch.per_user.front().rows() != cfg.n_rx)
    throw std::invalid_argument("miso: channel shapes do not match the config");
}

}  // namespace

void MisoConfig::validate() const {
  if (n_rf < 1 || n_per_rimsa < 1 || n_users < 1 || n_rx < 1)
    throw std::invalid_argument("MisoConfig: dimensions must be positive");
  if (power <= 0.0) throw std::invalid_argument("MisoConfig: power must be positive");
  if (noise_vars.size() != n_users)
    throw std::invalid_argument("MisoConfig: noise_vars must have one entry per user");
  if ((noise_vars.array() <= 0.0).any())
    throw std::invalid_argument("MisoConfig: noise variances must be positive");
}

BlockDiagPattern MisoConfig::v_pattern() const {
  return BlockDiagPattern::repeated(n_rf, n_per_rimsa, 1);
}

BlockDiagPattern MisoConfig::f_pattern() const {
  return BlockDiagPattern::repeated(n_users, 1, n_rx);
}

MisoState MisoState::init(const MisoConfig& cfg, Rng& rng) {
  cfg.validate();
  MisoState st;
  st.v = PhaseMatrix::random(cfg.v_pattern(), rng);
  st.f = PhaseMatrix::random(cfg.f_pattern(), rng);
  st.w = MatC::Zero(cfg.n_rf, cfg.n_users);
  const int k = std::min(cfg.n_rf, cfg.n_users);
  for (int i = 0; i < k; ++i) st.w(i, i) = 1.0;
  // Tr(V W W^H V^H) = n_per_rimsa * k for the identity pad; rescale to P.
  st.w *= std::sqrt(cfg.power / (static_cast<double>(cfg.n_per_rimsa) * k));
  st.eta = VecD::Zero(cfg.n_users);
  st.alpha = VecC::Zero(cfg.n_users);
  return st;
}

VecC MisoState::f_vector(int m, const MisoConfig& cfg) const {
  return f.values.block(m, m * cfg.n_rx, 1, cfg.n_rx).adjoint();
}

VecC effective_channel(const VecC& f_m, const MatC& h_m, const MatC& v) {
  if (f_m.size() != h_m.rows() || h_m.cols() != v.rows())
    throw std::invalid_argument("effective_channel: shape mismatch");
  return (f_m.adjoint() * h_m * v).adjoint();
}

double sinr(int m, const MisoState& state, const ChannelRealization& channels,
            const MisoConfig& cfg) {
  check_channels(channels, cfg);
  const MatC phi = build_phi(state, channels, cfg);
  const PhiStats s = phi_stats(phi, cfg);
  return s.signal[m] / s.intf_noise[m];
}

double sum_rate(const MisoState& state, const ChannelRealization& channels,
                const MisoConfig& cfg) {
  check_channels(channels, cfg);
  const PhiStats s = phi_stats(build_phi(state, channels, cfg), cfg);
  double rate = 0.0;
  for (int m = 0; m < cfg.n_users; ++m) rate += std::log2(1.0 + s.signal[m] / s.intf_noise[m]);
  return rate;
}

VecD update_eta(const MisoState& state, const ChannelRealization& channels,
                const MisoConfig& cfg) {
  check_channels(channels, cfg);
  const PhiStats s = phi_stats(build_phi(state, channels, cfg), cfg);
  return s.signal.cwiseQuotient(s.intf_noise);
}

VecC update_alpha(const MisoState& state, const ChannelRealization& channels,
                  const MisoConfig& cfg) {
  check_channels(channels, cfg);
  const MatC hw = effective_channel_matrix(state, channels) * state.w;
  VecC alpha(cfg.n_users);
  for (int m = 0; m < cfg.n_users; ++m) {
    const double denom = hw.row(m).squaredNorm() + cfg.noise_vars[m] * cfg.n_rx;
    alpha[m] = std::sqrt(1.0 + state.eta[m]) * hw(m, m) / denom;
  }
  return alpha;
}

MatC update_precoder(const MisoState& state, const ChannelRealization& channels,
                     const MisoConfig& cfg, double lambda) {
  check_channels(channels, cfg);
  if (lambda < 0.0) throw std::invalid_argument("update_precoder: lambda must be >= 0");
  const bool alpha_zero = state.alpha.isZero(0.0);
  if (lambda == 0.0 && alpha_zero)
    throw std::domain_error("update_precoder: singular system (lambda = 0 with zero alpha)");

  const MatC heff = effective_channel_matrix(state, channels);  // rows h_m^H
  const VecC weights = state.alpha.cwiseAbs2().cast<Cplx>();
  MatC a = heff.adjoint() * weights.asDiagonal() * heff;
  a += lambda * static_cast<double>(cfg.n_per_rimsa) *
       MatC::Identity(cfg.n_rf, cfg.n_rf);  // V^H V = n_per_rimsa * I

  MatC rhs = heff.adjoint();  // columns h_m
  for (int m = 0; m < cfg.n_users; ++m)
    rhs.col(m) *= std::sqrt(1.0 + state.eta[m]) * state.alpha[m];

  if (lambda > 0.0) return a.llt().solve(rhs);
  // lambda = 0 with rank-deficient quadratic term: minimum-power solution of
  // the consistent system.
  return a.completeOrthogonalDecomposition().solve(rhs);
}

std::pair<double, MatC> solve_lambda(const MisoState& state, const ChannelRealization& channels,
                                     const MisoConfig& cfg) {
  check_channels(channels, cfg);
  if (state.alpha.isZero(0.0)) return {0.0, MatC::Zero(cfg.n_rf, cfg.n_users)};
  return detail::min_power_multiplier(
      [&](double lambda) { return update_precoder(state, channels, cfg, lambda); },
      [&](const MatC& w) { return power_of(state.v.values, w); }, cfg.power, kPowerRelTol,
      kLambdaIntervalTol);
}

MatC build_phi(const MisoState& state, const ChannelRealization& channels, const MisoConfig& cfg) {
  check_channels(channels, cfg);
  return build_phi_raw(state.v.values, state.f.values, state.w, channels);
}

double g2(const MatC& v, const MatC& f, const MatC& w, const ChannelRealization& channels,
          const MisoConfig& cfg) {
  const PhiStats s = phi_stats(build_phi_raw(v, f, w, channels), cfg);
  double value = 0.0;
  for (int m = 0; m < cfg.n_users; ++m) value += std::log2(s.intf_noise[m]) - std::log2(s.total[m]);
  return value;
}

double g2(const MisoState& state, const ChannelRealization& channels, const MisoConfig& cfg) {
  check_channels(channels, cfg);
  return g2(state.v.values, state.f.values, state.w, channels, cfg);
}

MatC euclid_grad_f(const MisoState& state, const ChannelRealization& channels,
                   const MisoConfig& cfg) {
  check_channels(channels, cfg);
  MatC grad;
  g2_grads_raw(state.v.values, state.f.values, state.w, channels, cfg, nullptr, &grad);
  return grad;
}

MatC euclid_grad_v(const MisoState& state, const ChannelRealization& channels,
                   const MisoConfig& cfg) {
  check_channels(channels, cfg);
  MatC grad;
  g2_grads_raw(state.v.values, state.f.values, state.w, channels, cfg, &grad, nullptr);
  return grad;
}

FpPmoResult fp_pmo(const ChannelRealization& channels, const MisoConfig& cfg,
                   const FpPmoOptions& options, MisoState state) {
  cfg.validate();
  check_channels(channels, cfg);

  FpPmoResult res;
  res.state = std::move(state);
  res.rate_trace.push_back(sum_rate(res.state, channels, cfg));

  for (int outer = 1; outer <= options.outer_iters; ++outer) {
    // (i) FP rounds on the digital precoder.
    double prev_surrogate = std::numeric_limits<double>::quiet_NaN();
    for (int round = 0; round < options.fp_max_rounds; ++round) {
      res.state.eta = update_eta(res.state, channels, cfg);
      res.state.alpha = update_alpha(res.state, channels, cfg);
      std::tie(res.state.lambda, res.state.w) = solve_lambda(res.state, channels, cfg);
      const double surrogate = fp_surrogate(res.state, channels, cfg);
      if (round > 0 && std::abs(surrogate - prev_surrogate) < options.fp_tol) break;
      prev_surrogate = surrogate;
    }

    // (ii) Riemannian CG over the requested analog stages.
    if (options.optimize_v || options.optimize_f) {
      PointTuple tuple;
      if (options.optimize_v) tuple.push_back(res.state.v);
      if (options.optimize_f) tuple.push_back(res.state.f);

      const MatC fixed_v = res.state.v.values;
      const MatC fixed_f = res.state.f.values;
      const MatC w = res.state.w;
      auto pick = [&](const PointTuple& pts, bool want_v) -> const MatC& {
        if (want_v) return options.optimize_v ? pts[0].values : fixed_v;
        return options.optimize_f ? pts[options.optimize_v ? 1 : 0].values : fixed_f;
      };
      Objective objective = [&](const PointTuple& pts) {
        return g2(pick(pts, true), pick(pts, false), w, channels, cfg);
      };
      EuclideanGradient egrad = [&](const PointTuple& pts) {
        MatC gv, gf;
        g2_grads_raw(pick(pts, true), pick(pts, false), w, channels, cfg,
                     options.optimize_v ? &gv : nullptr, options.optimize_f ? &gf : nullptr);
        std::vector<MatC> out;
        if (options.optimize_v) out.push_back(std::move(gv));
        if (options.optimize_f) out.push_back(std::move(gf));
        return out;
      };

      RcgResult rcg = rcg_minimize(objective, egrad, std::move(tuple), options.rcg);
      std::size_t idx = 0;
      if (options.optimize_v) res.state.v = rcg.points[idx++];
      if (options.optimize_f) res.state.f = rcg.points[idx];
    }

    const double rate = sum_rate(res.state, channels, cfg);
    res.rate_trace.push_back(rate);
    res.outer_iterations = outer;
    if (rate - res.rate_trace[res.rate_trace.size() - 2] < options.rate_tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

FpPmoResult fp_pmo(const ChannelRealization& channels, const MisoConfig& cfg,
                   const FpPmoOptions& options, Rng& rng) {
  return fp_pmo(channels, cfg, options, MisoState::init(cfg, rng));
}

FpPmoResult fp_pmo(const ChannelRealization& channels, const MisoConfig& cfg, int outer_iters,
                   const RcgParams& rcg_params, Rng& rng) {
  FpPmoOptions options;
  options.outer_iters = outer_iters;
  options.rcg = rcg_params;
  return fp_pmo(channels, cfg, options, rng);
}

}  // namespace rimsa
