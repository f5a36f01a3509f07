#pragma once

#include "rimsa/types.hpp"

#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace rimsa {

/// Support of a block-diagonal matrix: an ordered list of (rows, cols)
/// blocks placed along the diagonal with no overlap.
struct BlockDiagPattern {
  struct Block {
    Eigen::Index row = 0, col = 0, rows = 0, cols = 0;
  };

  std::vector<Block> blocks;
  Eigen::Index total_rows = 0;
  Eigen::Index total_cols = 0;

  static BlockDiagPattern make(const std::vector<std::pair<Eigen::Index, Eigen::Index>>& dims);
  /// count identical blocks of shape rows x cols.
  static BlockDiagPattern repeated(Eigen::Index count, Eigen::Index rows, Eigen::Index cols);

  bool same_as(const BlockDiagPattern& other) const;
  bool shape_matches(const MatC& m) const {
    return m.rows() == total_rows && m.cols() == total_cols;
  }

  /// Copy of g with every off-support entry zeroed.
  MatC mask(const MatC& g) const;
  /// Max |entry| off the support (0 for matrices already on it).
  double off_support_norm(const MatC& m) const;
};

/// Point on the unit-modulus block-diagonal manifold: supported entries have
/// modulus 1, everything else is exactly zero.
struct PhaseMatrix {
  BlockDiagPattern pattern;
  MatC values;

  PhaseMatrix() = default;
  /// Validates feasibility (throws std::invalid_argument on violation).
  PhaseMatrix(BlockDiagPattern pat, MatC vals);

  /// All supported entries set to 1 (zero phases).
  static PhaseMatrix ones(const BlockDiagPattern& pattern);
  /// Supported entries with i.i.d. uniform random phases.
  static PhaseMatrix random(const BlockDiagPattern& pattern, Rng& rng);

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
};

/// Tangent vector at some PhaseMatrix: Re(Z .* conj(X)) == 0 on the support,
/// zero off it.
struct TangentVector {
  BlockDiagPattern pattern;
  MatC values;

  double norm() const { return values.norm(); }
};

/// Line-search / solver parameters. Defaults: standard Armijo constants,
/// gradient-norm stop 1e-4, at most 200 iterations.
struct RcgParams {
  double c = 1e-4;
  double tau = 0.5;
  double alpha0 = 1.0;
  double epsilon = 1e-4;
  int max_iter = 200;
};

using PointTuple = std::vector<PhaseMatrix>;
using TangentTuple = std::vector<TangentVector>;
using Objective = std::function<double(const PointTuple&)>;
/// Euclidean (ambient) gradients for every tuple member, packed so that
/// Re/Im parts equal the partial derivatives w.r.t. Re/Im of the entries.
using EuclideanGradient = std::function<std::vector<MatC>(const PointTuple&)>;

/// Orthogonal projection of an ambient gradient onto the tangent space at x:
///   Z = mask(g) - Re(mask(g) .* conj(X)) .* X.
TangentVector project_tangent(const PhaseMatrix& x, const MatC& g);

/// Elementwise normalization back onto the manifold; off-support entries are
/// forced to zero. Throws std::domain_error if a supported entry has modulus
/// below 1e-15 (no meaningful phase to keep).
PhaseMatrix retract(const MatC& x_raw, const BlockDiagPattern& pattern);

/// Vector transport to the tangent space at x_new (same projector form).
TangentVector transport(const TangentVector& pi_prev, const PhaseMatrix& x_new);

/// Riemannian metric Re(Tr(A^H B)).
double metric(const TangentVector& a, const TangentVector& b);

/// Polak-Ribiere parameter
///   <g_new, g_new - T(g_old)>_R / <g_old, g_old>_R.
/// Throws std::domain_error when the old gradient is zero.
double polak_ribiere(const TangentVector& g_new, const TangentVector& g_old_transported,
                     const TangentVector& g_old);

struct LineSearchResult {
  double alpha = 0.0;
  PointTuple points;
  double objective_value = 0.0;  // f at the returned points
};

/// Armijo backtracking over the product manifold: the largest
/// alpha in {alpha0 * tau^n} with
///   f(R(X + alpha*Pi)) <= f(X) + c * alpha * sum_m <grad_m, Pi_m>_R.
/// Returns alpha = 0 and the unchanged points if nothing above 1e-12 works.
LineSearchResult backtracking_step(const Objective& objective, const PointTuple& points,
                                   const TangentTuple& grads, const TangentTuple& directions,
                                   const RcgParams& params);

struct RcgResult {
  PointTuple points;
  std::vector<double> trace;  // objective value per accepted iterate, starting at init
  int iterations = 0;
  bool converged = false;  // gradient-norm stop triggered
};

/// Riemannian conjugate gradient descent over a tuple of phase matrices with
/// Polak-Ribiere directions, vector transport and Armijo line search. Stops
/// when the summed gradient Frobenius norm drops below params.epsilon or
/// max_iter is reached.
RcgResult rcg_minimize(const Objective& objective, const EuclideanGradient& euclid_grad,
                       PointTuple init, const RcgParams& params);

}  // namespace rimsa
