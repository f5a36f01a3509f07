#include "rimsa/mimo.hpp"

#include "power_bisect.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rimsa {

namespace {

constexpr double kLn2 = 0.6931471805599453;
constexpr double kRegularization = 1e-12;

// ln det of a Hermitian positive-definite matrix; regularizes once with
// kRegularization * I if the factorization fails.
double logdet_hpd(MatC a) {
  Eigen::LLT<MatC> llt(a);
  if (llt.info() != Eigen::Success) {
    a += kRegularization * MatC::Identity(a.rows(), a.cols());
    llt.compute(a);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("logdet_hpd: matrix is not positive definite");
  }
  return 2.0 * llt.matrixLLT().diagonal().real().array().log().sum();
}

// Effective digital-domain channel of UE i: G_i = W_rf^(i) H_i V.
MatC effective_rx_channel(int i, const MimoState& state, const ChannelRealization& ch,
                          const MimoConfig& cfg) {
  return state.w_rf[i].values * (ch.per_user[i] * state.v.values);
}

// Received-signal covariance J_i before the digital combiner.
MatC received_covariance(int i, const MimoState& state, const ChannelRealization& ch,
                         const MimoConfig& cfg) {
  const MatC g = effective_rx_channel(i, state, ch, cfg);
  const MatC gw = g * state.w_d;  // n_rf_rx x M*n_streams
  MatC j = gw * gw.adjoint();
  j.noalias() += cfg.noise_var * state.w_rf[i].values * state.w_rf[i].values.adjoint();
  return j;
}

void check_channels(const ChannelRealization& ch, const MimoConfig& cfg) {
  if (ch.n_users() != cfg.n_users || ch.stacked.cols() != cfg.n_t() ||
      ch.per_user.front().rows() != cfg.n_r())
    throw std::invalid_argument("mimo: channel shapes do not match the config");
}

}  // namespace

void MimoConfig::validate() const {
  if (n_rf_tx < 1 || n_per_rimsa_tx < 1 || n_users < 1 || n_rf_rx < 1 || n_per_rimsa_rx < 1 ||
      n_streams < 1)
    throw std::invalid_argument("MimoConfig: dimensions must be positive");
  if (n_streams > n_rf_rx)
    throw std::invalid_argument("MimoConfig: n_streams must not exceed n_rf_rx");
  if (power <= 0.0) throw std::invalid_argument("MimoConfig: power must be positive");
  if (noise_var <= 0.0) throw std::invalid_argument("MimoConfig: noise_var must be positive");
}

BlockDiagPattern MimoConfig::v_pattern() const {
  return BlockDiagPattern::repeated(n_rf_tx, n_per_rimsa_tx, 1);
}

BlockDiagPattern MimoConfig::wrf_pattern() const {
  return BlockDiagPattern::repeated(n_rf_rx, 1, n_per_rimsa_rx);
}

BlockDiagPattern MimoConfig::wrf_stacked_pattern() const {
  return BlockDiagPattern::repeated(static_cast<Eigen::Index>(n_users) * n_rf_rx, 1,
                                    n_per_rimsa_rx);
}

MimoState MimoState::init(const MimoConfig& cfg, Rng& rng) {
  cfg.validate();
  MimoState st;
  st.v = PhaseMatrix::random(cfg.v_pattern(), rng);
  st.w_rf.reserve(cfg.n_users);
  for (int i = 0; i < cfg.n_users; ++i) st.w_rf.push_back(PhaseMatrix::random(cfg.wrf_pattern(), rng));

  const int total_streams = cfg.n_users * cfg.n_streams;
  st.w_d = MatC::Zero(cfg.n_rf_tx, total_streams);
  const int k = std::min(cfg.n_rf_tx, total_streams);
  for (int i = 0; i < k; ++i) st.w_d(i, i) = 1.0;
  st.w_d *= std::sqrt(cfg.power / (static_cast<double>(cfg.n_per_rimsa_tx) * k));

  st.weights.assign(cfg.n_users, MatC::Identity(cfg.n_streams, cfg.n_streams));
  st.u.assign(cfg.n_users, MatC::Zero(cfg.n_streams, cfg.n_rf_rx));
  st.mu = 0.0;
  return st;
}

Eigen::Block<const MatC> MimoState::w_d_user(int i, const MimoConfig& cfg) const {
  return w_d.block(0, static_cast<Eigen::Index>(i) * cfg.n_streams, cfg.n_rf_tx, cfg.n_streams);
}

MatC MimoState::stacked_wrf(const MimoConfig& cfg) const {
  const Eigen::Index rows = static_cast<Eigen::Index>(cfg.n_users) * cfg.n_rf_rx;
  const Eigen::Index cols = static_cast<Eigen::Index>(cfg.n_users) * cfg.n_r();
  MatC out = MatC::Zero(rows, cols);
  for (int i = 0; i < cfg.n_users; ++i)
    out.block(static_cast<Eigen::Index>(i) * cfg.n_rf_rx, static_cast<Eigen::Index>(i) * cfg.n_r(),
              cfg.n_rf_rx, cfg.n_r()) = w_rf[i].values;
  return out;
}

MatC MimoState::stacked_u(const MimoConfig& cfg) const {
  const Eigen::Index rows = static_cast<Eigen::Index>(cfg.n_users) * cfg.n_streams;
  const Eigen::Index cols = static_cast<Eigen::Index>(cfg.n_users) * cfg.n_rf_rx;
  MatC out = MatC::Zero(rows, cols);
  for (int i = 0; i < cfg.n_users; ++i)
    out.block(static_cast<Eigen::Index>(i) * cfg.n_streams,
              static_cast<Eigen::Index>(i) * cfg.n_rf_rx, cfg.n_streams, cfg.n_rf_rx) =
        u[i];
  return out;
}

double user_rate(int i, const MimoState& state, const ChannelRealization& channels,
                 const MimoConfig& cfg) {
  check_channels(channels, cfg);
  // The determinant ratio below is invariant under left multiplication of
  // U_i by any invertible matrix, so the combiner rows can be equilibrated
  // to unit norm; rows that are exactly zero carry no stream and drop out
  // (their limit contribution to the ratio is 1).
  std::vector<int> live;
  for (int s = 0; s < cfg.n_streams; ++s)
    if (state.u[i].row(s).norm() > 0.0) live.push_back(s);
  if (live.empty()) return 0.0;

  MatC u(static_cast<Eigen::Index>(live.size()), cfg.n_rf_rx);
  for (std::size_t s = 0; s < live.size(); ++s)
    u.row(s) = state.u[i].row(live[s]) / state.u[i].row(live[s]).norm();

  const MatC g = effective_rx_channel(i, state, channels, cfg);
  const MatC ugw_i = u * (g * state.w_d_user(i, cfg));
  const MatC signal = ugw_i * ugw_i.adjoint();

  MatC rn = MatC::Zero(u.rows(), u.rows());
  for (int j = 0; j < cfg.n_users; ++j) {
    if (j == i) continue;
    const MatC ugw_j = u * (g * state.w_d_user(j, cfg));
    rn.noalias() += ugw_j * ugw_j.adjoint();
  }
  const MatC uw = u * state.w_rf[i].values;
  rn.noalias() += cfg.noise_var * uw * uw.adjoint();

  Eigen::LLT<MatC> llt(rn);
  if (llt.info() != Eigen::Success) rn += kRegularization * MatC::Identity(u.rows(), u.rows());
  const double rate = (logdet_hpd(rn + signal) - logdet_hpd(rn)) / kLn2;
  return std::max(rate, 0.0);
}

double sum_rate(const MimoState& state, const ChannelRealization& channels,
                const MimoConfig& cfg) {
  double r = 0.0;
  for (int i = 0; i < cfg.n_users; ++i) r += user_rate(i, state, channels, cfg);
  return r;
}

MatC mse_matrix(int i, const MimoState& state, const ChannelRealization& channels,
                const MimoConfig& cfg) {
  check_channels(channels, cfg);
  const MatC g = effective_rx_channel(i, state, channels, cfg);
  const MatC ugw = state.u[i] * (g * state.w_d_user(i, cfg));
  const MatC j = received_covariance(i, state, channels, cfg);
  MatC e = MatC::Identity(cfg.n_streams, cfg.n_streams);
  e -= ugw;
  e -= ugw.adjoint();
  e.noalias() += state.u[i] * j * state.u[i].adjoint();
  return 0.5 * (e + e.adjoint());  // clear roundoff skew
}

MatC update_weights(const MatC& e) {
  if (e.rows() != e.cols()) throw std::invalid_argument("update_weights: E must be square");
  Eigen::LLT<MatC> llt(e);
  MatC lambda;
  if (llt.info() == Eigen::Success) {
    lambda = llt.solve(MatC::Identity(e.rows(), e.cols()));
  } else {
    const MatC reg = e + kRegularization * MatC::Identity(e.rows(), e.cols());
    lambda = reg.llt().solve(MatC::Identity(e.rows(), e.cols()));
  }
  return 0.5 * (lambda + lambda.adjoint());
}

MatC update_combiner(int i, const MimoState& state, const ChannelRealization& channels,
                     const MimoConfig& cfg) {
  check_channels(channels, cfg);
  const MatC g = effective_rx_channel(i, state, channels, cfg);
  const MatC j = received_covariance(i, state, channels, cfg);
  return j.llt().solve(g * state.w_d_user(i, cfg)).adjoint();
}

std::pair<MatC, double> update_digital_precoder(const MimoState& state,
                                                const ChannelRealization& channels,
                                                const MimoConfig& cfg) {
  check_channels(channels, cfg);
  const int n_rf_tx = cfg.n_rf_tx;
  MatC quad = MatC::Zero(n_rf_tx, n_rf_tx);
  MatC rhs(n_rf_tx, static_cast<Eigen::Index>(cfg.n_users) * cfg.n_streams);
  for (int j = 0; j < cfg.n_users; ++j) {
    const MatC g = effective_rx_channel(j, state, channels, cfg);
    const MatC ug = state.u[j] * g;  // n_streams x n_rf_tx
    quad.noalias() += ug.adjoint() * state.weights[j] * ug;
    rhs.middleCols(static_cast<Eigen::Index>(j) * cfg.n_streams, cfg.n_streams) =
        ug.adjoint() * state.weights[j];
  }

  auto solve = [&](double mu) -> MatC {
    if (mu == 0.0) return quad.completeOrthogonalDecomposition().solve(rhs);
    const MatC a = quad + mu * MatC::Identity(n_rf_tx, n_rf_tx);
    return a.llt().solve(rhs);
  };
  auto power = [&](const MatC& wd) { return (state.v.values * wd).squaredNorm(); };

  auto [mu, wd] = detail::min_power_multiplier(solve, power, cfg.power);
  return {std::move(wd), mu};
}

double weighted_mse_objective(const MimoState& state, const ChannelRealization& channels,
                              const MimoConfig& cfg) {
  check_channels(channels, cfg);
  double obj = 0.0;
  for (int i = 0; i < cfg.n_users; ++i) {
    const MatC e = mse_matrix(i, state, channels, cfg);
    obj += (state.weights[i] * e).trace().real() - logdet_hpd(state.weights[i]);
  }
  return obj;
}

double f1(const MatC& v, const MatC& wrf_stacked, const MimoState& state,
          const ChannelRealization& channels, const MimoConfig& cfg) {
  const MatC u = state.stacked_u(cfg);
  // Rows of W_rf H stack per user as W_rf^(i) H_i.
  const Eigen::Index n_r = cfg.n_r();
  MatC wrf_h(static_cast<Eigen::Index>(cfg.n_users) * cfg.n_rf_rx, cfg.n_t());
  for (int i = 0; i < cfg.n_users; ++i)
    wrf_h.middleRows(static_cast<Eigen::Index>(i) * cfg.n_rf_rx, cfg.n_rf_rx) =
        wrf_stacked.block(static_cast<Eigen::Index>(i) * cfg.n_rf_rx,
                          static_cast<Eigen::Index>(i) * n_r, cfg.n_rf_rx, n_r) *
        channels.per_user[i];
  const MatC t = u * (wrf_h * v);  // M*n_streams x n_rf_tx
  const MatC s = t * state.w_d;    // M*n_streams x M*n_streams

  double linear = 0.0;
  double quad = 0.0;
  for (int i = 0; i < cfg.n_users; ++i) {
    const Eigen::Index r0 = static_cast<Eigen::Index>(i) * cfg.n_streams;
    const auto s_rows = s.middleRows(r0, cfg.n_streams);
    linear += (state.weights[i] * s_rows.middleCols(r0, cfg.n_streams)).trace().real();
    quad += (state.weights[i] * (s_rows * s_rows.adjoint())).trace().real();
  }
  return -2.0 * linear + quad;
}

double f1(const MimoState& state, const ChannelRealization& channels, const MimoConfig& cfg) {
  check_channels(channels, cfg);
  return f1(state.v.values, state.stacked_wrf(cfg), state, channels, cfg);
}

namespace {

// Euclidean gradients of f1 at the stacked analog matrices (masked).
void f1_grads_raw(const MatC& v, const MatC& wrf_stacked, const MimoState& state,
                  const ChannelRealization& ch, const MimoConfig& cfg, MatC* grad_v,
                  MatC* grad_wrf) {
  const MatC u = state.stacked_u(cfg);
  MatC lambda = MatC::Zero(u.rows(), u.rows());
  for (int i = 0; i < cfg.n_users; ++i)
    lambda.block(static_cast<Eigen::Index>(i) * cfg.n_streams,
                 static_cast<Eigen::Index>(i) * cfg.n_streams, cfg.n_streams, cfg.n_streams) =
        state.weights[i];

  MatC wrf_h(static_cast<Eigen::Index>(cfg.n_users) * cfg.n_rf_rx, cfg.n_t());
  for (int i = 0; i < cfg.n_users; ++i)
    wrf_h.middleRows(static_cast<Eigen::Index>(i) * cfg.n_rf_rx, cfg.n_rf_rx) =
        wrf_stacked.block(static_cast<Eigen::Index>(i) * cfg.n_rf_rx,
                          static_cast<Eigen::Index>(i) * cfg.n_r(), cfg.n_rf_rx, cfg.n_r()) *
        ch.per_user[i];

  if (grad_v) {
    const MatC p = u * wrf_h;  // M*n_streams x N_t
    const MatC t = p * v;      // M*n_streams x n_rf_tx
    const MatC lp = lambda * p;
    const MatC c = state.w_d * (state.w_d.adjoint() * (t.adjoint() * lp)) - state.w_d * lp;
    *grad_v = 2.0 * cfg.v_pattern().mask(c.adjoint());
  }
  if (grad_wrf) {
    const MatC hv = ch.stacked * v;       // M*N_r x n_rf_tx
    const MatC r1 = hv * state.w_d;       // M*N_r x M*n_streams
    const MatC lu = lambda * u;           // M*n_streams x M*n_rf_rx
    const MatC uwrf = u * wrf_stacked;    // M*n_streams x M*N_r
    const MatC d = (r1 * (r1.adjoint() * uwrf.adjoint())) * lu - r1 * lu;
    *grad_wrf = 2.0 * cfg.wrf_stacked_pattern().mask(d.adjoint());
  }
}

std::vector<PhaseMatrix> split_wrf(const PhaseMatrix& stacked, const MimoConfig& cfg) {
  std::vector<PhaseMatrix> out;
  out.reserve(cfg.n_users);
  const BlockDiagPattern per_user = cfg.wrf_pattern();
  for (int i = 0; i < cfg.n_users; ++i) {
    MatC vals = stacked.values.block(static_cast<Eigen::Index>(i) * cfg.n_rf_rx,
                                     static_cast<Eigen::Index>(i) * cfg.n_r(), cfg.n_rf_rx,
                                     cfg.n_r());
    out.emplace_back(per_user, std::move(vals));
  }
  return out;
}

}  // namespace

MatC euclid_grad_v_mimo(const MimoState& state, const ChannelRealization& channels,
                        const MimoConfig& cfg) {
  check_channels(channels, cfg);
  MatC grad;
  f1_grads_raw(state.v.values, state.stacked_wrf(cfg), state, channels, cfg, &grad, nullptr);
  return grad;
}

MatC euclid_grad_wrf(const MimoState& state, const ChannelRealization& channels,
                     const MimoConfig& cfg) {
  check_channels(channels, cfg);
  MatC grad;
  f1_grads_raw(state.v.values, state.stacked_wrf(cfg), state, channels, cfg, nullptr, &grad);
  return grad;
}

WmmsePmoResult wmmse_pmo(const ChannelRealization& channels, const MimoConfig& cfg,
                         const WmmsePmoOptions& options, MimoState state) {
  cfg.validate();
  check_channels(channels, cfg);

  WmmsePmoResult res;
  res.state = std::move(state);
  res.rate_trace.push_back(sum_rate(res.state, channels, cfg));
  res.objective_trace.push_back(weighted_mse_objective(res.state, channels, cfg));

  for (int outer = 1; outer <= options.outer_iters; ++outer) {
    for (int i = 0; i < cfg.n_users; ++i)
      res.state.u[i] = update_combiner(i, res.state, channels, cfg);
    for (int i = 0; i < cfg.n_users; ++i)
      res.state.weights[i] = update_weights(mse_matrix(i, res.state, channels, cfg));
    std::tie(res.state.w_d, res.state.mu) = update_digital_precoder(res.state, channels, cfg);

    if (options.optimize_analog) {
      PointTuple tuple;
      tuple.push_back(res.state.v);
      tuple.emplace_back(cfg.wrf_stacked_pattern(), res.state.stacked_wrf(cfg));

      Objective objective = [&](const PointTuple& pts) {
        return f1(pts[0].values, pts[1].values, res.state, channels, cfg);
      };
      EuclideanGradient egrad = [&](const PointTuple& pts) {
        MatC gv, gw;
        f1_grads_raw(pts[0].values, pts[1].values, res.state, channels, cfg, &gv, &gw);
        std::vector<MatC> out;
        out.push_back(std::move(gv));
        out.push_back(std::move(gw));
        return out;
      };

      RcgResult rcg = rcg_minimize(objective, egrad, std::move(tuple), options.rcg);
      res.state.v = rcg.points[0];
      res.state.w_rf = split_wrf(rcg.points[1], cfg);
    }

    res.rate_trace.push_back(sum_rate(res.state, channels, cfg));
    res.objective_trace.push_back(weighted_mse_objective(res.state, channels, cfg));
    res.outer_iterations = outer;
    const double delta = std::abs(res.objective_trace[res.objective_trace.size() - 2] -
                                  res.objective_trace.back());
    if (delta < options.objective_tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

WmmsePmoResult wmmse_pmo(const ChannelRealization& channels, const MimoConfig& cfg,
                         const WmmsePmoOptions& options, Rng& rng) {
  MimoState st = MimoState::init(cfg, rng);
  for (int i = 0; i < cfg.n_users; ++i) st.u[i] = update_combiner(i, st, channels, cfg);
  return wmmse_pmo(channels, cfg, options, std::move(st));
}

WmmsePmoResult wmmse_pmo(const ChannelRealization& channels, const MimoConfig& cfg,
                         int outer_iters, const RcgParams& rcg_params, Rng& rng) {
  WmmsePmoOptions options;
  options.outer_iters = outer_iters;
  options.rcg = rcg_params;
  return wmmse_pmo(channels, cfg, options, rng);
}

double verify_rate_mse_equivalence(const MimoState& state, const ChannelRealization& channels,
                                   const MimoConfig& cfg) {
  check_channels(channels, cfg);
  if (cfg.n_rf_rx != cfg.n_streams)
    throw std::invalid_argument(
        "verify_rate_mse_equivalence: requires n_rf_rx == n_streams");
  double residual = 0.0;
  for (int i = 0; i < cfg.n_users; ++i) {
    const MatC e = mse_matrix(i, state, channels, cfg);
    const double rate_from_mse = -logdet_hpd(e) / kLn2;
    residual = std::max(residual, std::abs(user_rate(i, state, channels, cfg) - rate_from_mse));
  }
  return residual;
}

}  // namespace rimsa
