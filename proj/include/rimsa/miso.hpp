#pragma once

#include "rimsa/channel.hpp"
#include "rimsa/manifold.hpp"

namespace rimsa {

/// MU-MISO downlink dimensions: the BS drives n_rf RF chains, each feeding a
/// metasurface of n_per_rimsa elements (N_t = n_rf * n_per_rimsa in total);
/// every UE combines n_rx elements onto a single output.
struct MisoConfig {
  int n_rf = 1;
  int n_per_rimsa = 1;
  int n_users = 1;
  int n_rx = 1;
  double power = 1.0;
  VecD noise_vars;  // per-user noise variance, length n_users

  int n_t() const { return n_rf * n_per_rimsa; }
  void validate() const;

  BlockDiagPattern v_pattern() const;  // n_rf blocks of (n_per_rimsa x 1)
  BlockDiagPattern f_pattern() const;  // n_users blocks of (1 x n_rx)
};

/// All iterates of the MU-MISO alternating optimization. f stores the
/// conjugated UE responses row-blockwise, i.e. F = blkdiag(f_1^H ... f_M^H),
/// so f_vector(m) recovers the response vector itself.
struct MisoState {
  PhaseMatrix v;  // N_t x n_rf
  PhaseMatrix f;  // n_users x n_users*n_rx
  MatC w;         // n_rf x n_users digital precoder
  VecD eta;
  VecC alpha;
  double lambda = 0.0;

  /// Random phases for v and f; w is the identity-padded precoder scaled to
  /// satisfy the power constraint with equality; eta/alpha zero.
  static MisoState init(const MisoConfig& cfg, Rng& rng);

  VecC f_vector(int m, const MisoConfig& cfg) const;
};

/// Equivalent digital-domain channel h_m with h_m^H = f_m^H H_m V.
VecC effective_channel(const VecC& f_m, const MatC& h_m, const MatC& v);

double sinr(int m, const MisoState& state, const ChannelRealization& channels,
            const MisoConfig& cfg);
double sum_rate(const MisoState& state, const ChannelRealization& channels,
                const MisoConfig& cfg);

VecD update_eta(const MisoState& state, const ChannelRealization& channels,
                const MisoConfig& cfg);

/// Quadratic-transform auxiliary
///   alpha_m = sqrt(1 + eta_m) h_m^H w_m / (sum_i |h_m^H w_i|^2 + sigma_m^2 N_r).
VecC update_alpha(const MisoState& state, const ChannelRealization& channels,
                  const MisoConfig& cfg);

/// Closed-form precoder columns
///   w_m = sqrt(1 + eta_m) alpha_m (sum_i |alpha_i|^2 h_i h_i^H + lambda V^H V)^{-1} h_m
/// with V^H V = n_per_rimsa * I for any feasible V. Throws std::domain_error
/// when lambda == 0 and every alpha is zero.
MatC update_precoder(const MisoState& state, const ChannelRealization& channels,
                     const MisoConfig& cfg, double lambda);

/// Smallest lambda >= 0 whose precoder satisfies Tr(V W W^H V^H) <= P, by
/// doubling + bisection on the monotone power curve. Returns the multiplier
/// and the matching precoder.
std::pair<double, MatC> solve_lambda(const MisoState& state, const ChannelRealization& channels,
                                     const MisoConfig& cfg);

/// Received-signal matrix Phi = F H V W, entry (m, i) = f_m^H H_m V w_i.
MatC build_phi(const MisoState& state, const ChannelRealization& channels, const MisoConfig& cfg);

/// Sum-rate reformulation objective (bits); g2 == -sum_rate for every state.
double g2(const MisoState& state, const ChannelRealization& channels, const MisoConfig& cfg);
/// Ambient-domain overload used by gradient checks; v/f/w need not be feasible.
double g2(const MatC& v, const MatC& f, const MatC& w, const ChannelRealization& channels,
          const MisoConfig& cfg);

/// Euclidean gradients of the base-2 g2, packed so Re/Im parts are the
/// partial derivatives w.r.t. Re/Im of the supported entries; zero off the
/// block-diagonal support.
MatC euclid_grad_f(const MisoState& state, const ChannelRealization& channels,
                   const MisoConfig& cfg);
MatC euclid_grad_v(const MisoState& state, const ChannelRealization& channels,
                   const MisoConfig& cfg);

struct FpPmoOptions {
  int outer_iters = 50;
  RcgParams rcg;
  bool optimize_v = true;   // false pins V (fully digital baseline)
  bool optimize_f = true;   // false pins F (random-phase baseline)
  double rate_tol = 1e-4;   // outer stop: sum-rate improvement below this
  int fp_max_rounds = 50;   // inner FP loop budget
  double fp_tol = 1e-6;     // inner stop on the FP surrogate value
};

struct FpPmoResult {
  MisoState state;
  std::vector<double> rate_trace;  // sum rate after init and each outer iteration
  int outer_iterations = 0;
  bool converged = false;
};

/// Alternating optimization: FP digital-precoder rounds followed by a
/// Riemannian CG pass over (V, F) on g2, repeated until the sum rate
/// improves by less than rate_tol or outer_iters is exhausted.
FpPmoResult fp_pmo(const ChannelRealization& channels, const MisoConfig& cfg, int outer_iters,
                   const RcgParams& rcg_params, Rng& rng);
FpPmoResult fp_pmo(const ChannelRealization& channels, const MisoConfig& cfg,
                   const FpPmoOptions& options, Rng& rng);
FpPmoResult fp_pmo(const ChannelRealization& channels, const MisoConfig& cfg,
                   const FpPmoOptions& options, MisoState state);

}  // namespace rimsa
