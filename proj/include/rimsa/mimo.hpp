#pragma once

#include "rimsa/channel.hpp"
#include "rimsa/manifold.hpp"

namespace rimsa {

/// MU-MIMO downlink dimensions. The BS has n_rf_tx RF chains with
/// n_per_rimsa_tx elements each (N_t total); every UE has n_rf_rx RF chains
/// with n_per_rimsa_rx elements each (N_r total) and receives n_streams
/// data streams.
struct MimoConfig {
  int n_rf_tx = 1;
  int n_per_rimsa_tx = 1;
  int n_users = 1;
  int n_rf_rx = 1;
  int n_per_rimsa_rx = 1;
  int n_streams = 1;
  double power = 1.0;
  double noise_var = 1.0;

  int n_t() const { return n_rf_tx * n_per_rimsa_tx; }
  int n_r() const { return n_rf_rx * n_per_rimsa_rx; }
  void validate() const;

  BlockDiagPattern v_pattern() const;            // n_rf_tx blocks of (n_per_rimsa_tx x 1)
  BlockDiagPattern wrf_pattern() const;          // per UE: n_rf_rx blocks of (1 x K)
  BlockDiagPattern wrf_stacked_pattern() const;  // all UEs: M*n_rf_rx blocks of (1 x K)
};

/// Iterates of the MU-MIMO weighted-MMSE alternating optimization. w_rf[i]
/// stores the i-th UE analog combiner row-blockwise (conjugated responses);
/// w_d groups the per-user digital precoders column-wise; weights are the
/// Hermitian PD MSE weights.
struct MimoState {
  PhaseMatrix v;                  // N_t x n_rf_tx
  std::vector<PhaseMatrix> w_rf;  // each n_rf_rx x N_r
  MatC w_d;                       // n_rf_tx x (M * n_streams)
  std::vector<MatC> u;            // each n_streams x n_rf_rx
  std::vector<MatC> weights;      // each n_streams x n_streams
  double mu = 0.0;

  /// Random phases for the analog stages, identity-padded w_d at full power,
  /// combiners set by one MMSE update, unit weights.
  static MimoState init(const MimoConfig& cfg, Rng& rng);

  Eigen::Block<const MatC> w_d_user(int i, const MimoConfig& cfg) const;
  MatC stacked_wrf(const MimoConfig& cfg) const;  // M*n_rf_rx x M*N_r
  MatC stacked_u(const MimoConfig& cfg) const;    // M*n_streams x M*n_rf_rx
};

/// Rate of UE i in bits, log2 det(I + S R_{n,i}^{-1}) with S the desired
/// signal covariance after the full receive chain. A singular interference
/// covariance is regularized with 1e-12 * I.
double user_rate(int i, const MimoState& state, const ChannelRealization& channels,
                 const MimoConfig& cfg);
double sum_rate(const MimoState& state, const ChannelRealization& channels,
                const MimoConfig& cfg);

/// MSE matrix E_i of the i-th UE (Hermitian PSD).
MatC mse_matrix(int i, const MimoState& state, const ChannelRealization& channels,
                const MimoConfig& cfg);

/// Optimal MSE weight Lambda = E^{-1}, symmetrized; a singular E is
/// regularized with 1e-12 * I.
MatC update_weights(const MatC& e);

/// MMSE combiner U_i = (J_i^{-1} W_rf H_i V W_i)^H.
MatC update_combiner(int i, const MimoState& state, const ChannelRealization& channels,
                     const MimoConfig& cfg);

/// Closed-form digital precoder for all users plus the smallest multiplier
/// mu >= 0 meeting the power constraint Tr(V W_D W_D^H V^H) <= P.
std::pair<MatC, double> update_digital_precoder(const MimoState& state,
                                                const ChannelRealization& channels,
                                                const MimoConfig& cfg);

/// Weighted sum-MSE objective sum_i (Tr(Lambda_i E_i) - ln det Lambda_i).
double weighted_mse_objective(const MimoState& state, const ChannelRealization& channels,
                              const MimoConfig& cfg);

/// The (V, W_rf)-dependent part of the weighted sum-MSE objective.
double f1(const MimoState& state, const ChannelRealization& channels, const MimoConfig& cfg);
/// Ambient-domain overload on the stacked analog matrices (for gradient checks).
double f1(const MatC& v, const MatC& wrf_stacked, const MimoState& state,
          const ChannelRealization& channels, const MimoConfig& cfg);

/// Euclidean gradients of f1 (same Re/Im packing as the MISO gradients),
/// zero off the block-diagonal supports.
MatC euclid_grad_v_mimo(const MimoState& state, const ChannelRealization& channels,
                        const MimoConfig& cfg);
MatC euclid_grad_wrf(const MimoState& state, const ChannelRealization& channels,
                     const MimoConfig& cfg);

struct WmmsePmoOptions {
  int outer_iters = 30;
  RcgParams rcg;
  bool optimize_analog = true;  // false pins V and W_rf (baselines)
  double objective_tol = 1e-6;  // outer stop on the weighted-MSE objective
};

struct WmmsePmoResult {
  MimoState state;
  std::vector<double> rate_trace;       // sum rate after init and each outer iteration
  std::vector<double> objective_trace;  // weighted-MSE objective, same instants
  int outer_iterations = 0;
  bool converged = false;
};

/// Alternating optimization: per outer iteration update all combiners, all
/// weights, the digital precoder (with mu-bisection), then run Riemannian CG
/// over (V, stacked W_rf) on f1. Stops when the weighted-MSE objective
/// changes by less than objective_tol or outer_iters is exhausted.
WmmsePmoResult wmmse_pmo(const ChannelRealization& channels, const MimoConfig& cfg,
                         int outer_iters, const RcgParams& rcg_params, Rng& rng);
WmmsePmoResult wmmse_pmo(const ChannelRealization& channels, const MimoConfig& cfg,
                         const WmmsePmoOptions& options, Rng& rng);
WmmsePmoResult wmmse_pmo(const ChannelRealization& channels, const MimoConfig& cfg,
                         const WmmsePmoOptions& options, MimoState state);

/// Max over users of |r_i - log2 det((E_i)^{-1})|; requires n_rf_rx ==
/// n_streams (throws otherwise). Near zero exactly when u holds the MMSE
/// combiners.
double verify_rate_mse_equivalence(const MimoState& state, const ChannelRealization& channels,
                                   const MimoConfig& cfg);

}  // namespace rimsa
