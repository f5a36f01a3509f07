#include "rimsa/manifold.hpp"

#include <cmath>

namespace rimsa {

namespace {

constexpr double kFeasibilityTol = 1e-9;
constexpr double kDegenerateTol = 1e-15;
constexpr double kAlphaFloor = 1e-12;

void check_same_pattern(const BlockDiagPattern& a, const BlockDiagPattern& b, const char* what) {
  if (!a.same_as(b)) throw std::invalid_argument(std::string(what) + ": pattern mismatch");
}

// Re(z .* conj(x)) .* x, the radial component removed by tangent projection.
MatC radial_component(const MatC& z, const MatC& x) {
  const MatD r = (z.array() * x.conjugate().array()).real();
  return (r.cast<Cplx>().array() * x.array()).matrix();
}

}  // namespace

BlockDiagPattern BlockDiagPattern::make(
    const std::vector<std::pair<Eigen::Index, Eigen::Index>>& dims) {
  BlockDiagPattern p;
  for (const auto& [r, c] : dims) {
    if (r < 1 || c < 1) throw std::invalid_argument("BlockDiagPattern: block dims must be >= 1");
    p.blocks.push_back({p.total_rows, p.total_cols, r, c});
    p.total_rows += r;
    p.total_cols += c;
  }
  if (p.blocks.empty()) throw std::invalid_argument("BlockDiagPattern: no blocks");
  return p;
}

BlockDiagPattern BlockDiagPattern::repeated(Eigen::Index count, Eigen::Index rows,
                                            Eigen::Index cols) {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> dims(count, {rows, cols});
  return make(dims);
}

bool BlockDiagPattern::same_as(const BlockDiagPattern& other) const {
  if (total_rows != other.total_rows || total_cols != other.total_cols) return false;
  if (blocks.size() != other.blocks.size()) return false;
  for (std::size_t i = 0; i < blocks.size(); ++i)
    if (blocks[i].rows != other.blocks[i].rows || blocks[i].cols != other.blocks[i].cols)
      return false;
  return true;
}

MatC BlockDiagPattern::mask(const MatC& g) const {
  if (!shape_matches(g)) throw std::invalid_argument("BlockDiagPattern::mask: shape mismatch");
  MatC out = MatC::Zero(total_rows, total_cols);
  for (const Block& b : blocks) out.block(b.row, b.col, b.rows, b.cols) = g.block(b.row, b.col, b.rows, b.cols);
  return out;
}

double BlockDiagPattern::off_support_norm(const MatC& m) const {
  if (!shape_matches(m)) throw std::invalid_argument("off_support_norm: shape mismatch");
  MatC off = m;
  for (const Block& b : blocks) off.block(b.row, b.col, b.rows, b.cols).setZero();
  return off.cwiseAbs().maxCoeff();
}

PhaseMatrix::PhaseMatrix(BlockDiagPattern pat, MatC vals)
    : pattern(std::move(pat)), values(std::move(vals)) {
  if (!pattern.shape_matches(values)) throw std::invalid_argument("PhaseMatrix: shape mismatch");
  if (pattern.off_support_norm(values) > 0.0)
    throw std::invalid_argument("PhaseMatrix: nonzero entry off the block-diagonal support");
  for (const auto& b : pattern.blocks) {
    const auto blk = values.block(b.row, b.col, b.rows, b.cols);
    if (((blk.cwiseAbs().array() - 1.0).abs() > kFeasibilityTol).any())
      throw std::invalid_argument("PhaseMatrix: supported entry is not unit modulus");
  }
}

PhaseMatrix PhaseMatrix::ones(const BlockDiagPattern& pattern) {
  MatC v = MatC::Zero(pattern.total_rows, pattern.total_cols);
  for (const auto& b : pattern.blocks) v.block(b.row, b.col, b.rows, b.cols).setOnes();
  return PhaseMatrix(pattern, std::move(v));
}

PhaseMatrix PhaseMatrix::random(const BlockDiagPattern& pattern, Rng& rng) {
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  MatC v = MatC::Zero(pattern.total_rows, pattern.total_cols);
  for (const auto& b : pattern.blocks) {
    for (Eigen::Index j = 0; j < b.cols; ++j)
      for (Eigen::Index i = 0; i < b.rows; ++i) {
        const double t = phase(rng);
        v(b.row + i, b.col + j) = Cplx(std::cos(t), std::sin(t));
      }
  }
  return PhaseMatrix(pattern, std::move(v));
}

TangentVector project_tangent(const PhaseMatrix& x, const MatC& g) {
  if (!x.pattern.shape_matches(g)) throw std::invalid_argument("project_tangent: shape mismatch");
  MatC masked = x.pattern.mask(g);
  masked -= radial_component(masked, x.values);
  return TangentVector{x.pattern, std::move(masked)};
}

PhaseMatrix retract(const MatC& x_raw, const BlockDiagPattern& pattern) {
  if (!pattern.shape_matches(x_raw)) throw std::invalid_argument("retract: shape mismatch");
  MatC out = MatC::Zero(pattern.total_rows, pattern.total_cols);
  for (const auto& b : pattern.blocks) {
    for (Eigen::Index j = 0; j < b.cols; ++j)
      for (Eigen::Index i = 0; i < b.rows; ++i) {
        const Cplx z = x_raw(b.row + i, b.col + j);
        const double mag = std::abs(z);
        if (mag < kDegenerateTol)
          throw std::domain_error("retract: entry magnitude below 1e-15, phase undefined");
        out(b.row + i, b.col + j) = z / mag;
      }
  }
  PhaseMatrix pm;
  pm.pattern = pattern;
  pm.values = std::move(out);
  return pm;
}

TangentVector transport(const TangentVector& pi_prev, const PhaseMatrix& x_new) {
  check_same_pattern(pi_prev.pattern, x_new.pattern, "transport");
  MatC out = pi_prev.values - radial_component(pi_prev.values, x_new.values);
  return TangentVector{pi_prev.pattern, std::move(out)};
}

double metric(const TangentVector& a, const TangentVector& b) {
  check_same_pattern(a.pattern, b.pattern, "metric");
  return (a.values.conjugate().array() * b.values.array()).real().sum();
}

double polak_ribiere(const TangentVector& g_new, const TangentVector& g_old_transported,
                     const TangentVector& g_old) {
  const double denom = metric(g_old, g_old);
  if (denom <= 0.0)
    throw std::domain_error("polak_ribiere: old gradient is zero; iteration should have stopped");
  TangentVector diff{g_new.pattern, g_new.values - g_old_transported.values};
  return metric(g_new, diff) / denom;
}

LineSearchResult backtracking_step(const Objective& objective, const PointTuple& points,
                                   const TangentTuple& grads, const TangentTuple& directions,
                                   const RcgParams& params) {
  if (points.size() != directions.size() || points.size() != grads.size())
    throw std::invalid_argument("backtracking_step: tuple size mismatch");

  const double f0 = objective(points);
  if (!std::isfinite(f0)) throw std::runtime_error("backtracking_step: objective not finite");

  double slope = 0.0;
  for (std::size_t m = 0; m < points.size(); ++m) slope += metric(grads[m], directions[m]);

  for (double alpha = params.alpha0; alpha >= kAlphaFloor; alpha *= params.tau) {
    PointTuple candidate;
    candidate.reserve(points.size());
    for (std::size_t m = 0; m < points.size(); ++m)
      candidate.push_back(
          retract(points[m].values + alpha * directions[m].values, points[m].pattern));
    const double f = objective(candidate);
    if (!std::isfinite(f)) throw std::runtime_error("backtracking_step: objective not finite");
    if (f <= f0 + params.c * alpha * slope) return {alpha, std::move(candidate), f};
  }
  return {0.0, points, f0};
}

RcgResult rcg_minimize(const Objective& objective, const EuclideanGradient& euclid_grad,
                       PointTuple init, const RcgParams& params) {
  const std::size_t n = init.size();
  if (n == 0) throw std::invalid_argument("rcg_minimize: empty point tuple");

  auto riem_grads = [&](const PointTuple& pts) {
    std::vector<MatC> eg = euclid_grad(pts);
    if (eg.size() != pts.size())
      throw std::invalid_argument("rcg_minimize: gradient callback arity mismatch");
    TangentTuple out;
    out.reserve(pts.size());
    for (std::size_t m = 0; m < pts.size(); ++m) out.push_back(project_tangent(pts[m], eg[m]));
    return out;
  };
  auto grad_norm_sum = [](const TangentTuple& g) {
    double s = 0.0;
    for (const auto& t : g) s += t.norm();
    return s;
  };

  RcgResult res;
  res.points = std::move(init);
  res.trace.push_back(objective(res.points));
  if (!std::isfinite(res.trace.back()))
    throw std::runtime_error("rcg_minimize: objective not finite at init");

  TangentTuple grads = riem_grads(res.points);
  TangentTuple dirs;
  dirs.reserve(n);
  for (const auto& g : grads) dirs.push_back(TangentVector{g.pattern, -g.values});

  for (int k = 0; k < params.max_iter; ++k) {
    if (grad_norm_sum(grads) < params.epsilon) {
      res.converged = true;
      break;
    }

    LineSearchResult ls = backtracking_step(objective, res.points, grads, dirs, params);
    if (ls.alpha == 0.0) break;  // no acceptable step left along this direction

    TangentTuple grads_new = riem_grads(ls.points);

    TangentTuple dirs_new;
    dirs_new.reserve(n);
    double descent = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      const TangentVector g_old_t = transport(grads[m], ls.points[m]);
      const TangentVector dir_t = transport(dirs[m], ls.points[m]);
      double mu = metric(grads[m], grads[m]) > 0.0 ? polak_ribiere(grads_new[m], g_old_t, grads[m]) : 0.0;
      if (mu < 0.0) mu = 0.0;  // PR+ safeguard
      dirs_new.push_back(
          TangentVector{grads_new[m].pattern, -grads_new[m].values + mu * dir_t.values});
      descent += metric(grads_new[m], dirs_new[m]);
    }
    if (descent >= 0.0) {  // restart: fall back to steepest descent
      for (std::size_t m = 0; m < n; ++m) dirs_new[m].values = -grads_new[m].values;
    }

    res.points = std::move(ls.points);
    grads = std::move(grads_new);
    dirs = std::move(dirs_new);
    res.trace.push_back(ls.objective_value);
    res.iterations = k + 1;
  }
  if (!res.converged && grad_norm_sum(grads) < params.epsilon) res.converged = true;
  return res;
}

}  // namespace rimsa
