#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_util.hpp"

using namespace rimsa;

namespace {

PhaseMatrix scalar_point(Cplx value) {
  const auto pat = BlockDiagPattern::repeated(1, 1, 1);
  MatC m(1, 1);
  m(0, 0) = value;
  return PhaseMatrix(pat, m);
}

double max_tangency_violation(const TangentVector& z, const PhaseMatrix& x) {
  return (z.values.array() * x.values.conjugate().array()).real().abs().maxCoeff();
}

}  // namespace

TEST_CASE("block-diagonal pattern: masking and off-support detection") {
  const auto pat = BlockDiagPattern::make({{2, 1}, {1, 2}});
  CHECK(pat.total_rows == 3);
  CHECK(pat.total_cols == 3);
  MatC g = MatC::Ones(3, 3);
  const MatC masked = pat.mask(g);
  CHECK(masked(0, 0) == Cplx(1, 0));
  CHECK(masked(1, 0) == Cplx(1, 0));
  CHECK(masked(2, 1) == Cplx(1, 0));
  CHECK(masked(2, 2) == Cplx(1, 0));
  CHECK(masked.cwiseAbs().sum() == doctest::Approx(4.0));
  CHECK(pat.off_support_norm(g) == doctest::Approx(1.0));
  CHECK(pat.off_support_norm(masked) == 0.0);
}

TEST_CASE("phase matrix: feasibility validation") {
  const auto pat = BlockDiagPattern::repeated(2, 2, 1);
  Rng rng = test::make_rng(3);
  const PhaseMatrix x = PhaseMatrix::random(pat, rng);
  CHECK(pat.off_support_norm(x.values) == 0.0);

  MatC bad = x.values;
  bad(0, 0) *= 2.0;
  CHECK_THROWS_AS(PhaseMatrix(pat, bad), std::invalid_argument);
  bad = x.values;
  bad(0, 1) = 0.5;  // off support
  CHECK_THROWS_AS(PhaseMatrix(pat, bad), std::invalid_argument);
}

TEST_CASE("project_tangent: scalar example and radial removal") {
  const PhaseMatrix x = scalar_point({1.0, 0.0});
  MatC g(1, 1);
  g(0, 0) = Cplx(2.0, 3.0);
  const TangentVector z = project_tangent(x, g);
  CHECK(std::abs(z.values(0, 0) - Cplx(0.0, 3.0)) < 1e-15);

  // Projecting the point itself leaves nothing.
  Rng rng = test::make_rng(5);
  const auto pat = BlockDiagPattern::repeated(3, 2, 1);
  const PhaseMatrix y = PhaseMatrix::random(pat, rng);
  CHECK(project_tangent(y, y.values).norm() < 1e-14);
}

TEST_CASE("project_tangent: tangency and idempotence on random input") {
  Rng rng = test::make_rng(6);
  const auto pat = BlockDiagPattern::make({{3, 1}, {1, 4}});
  const PhaseMatrix x = PhaseMatrix::random(pat, rng);
  const MatC g = test::random_complex(pat.total_rows, pat.total_cols, rng);
  const TangentVector z = project_tangent(x, g);
  CHECK(max_tangency_violation(z, x) < 1e-12);
  const TangentVector zz = project_tangent(x, z.values);
  CHECK((zz.values - z.values).norm() < 1e-12);

  CHECK_THROWS_AS(project_tangent(x, MatC::Zero(2, 2)), std::invalid_argument);
}

TEST_CASE("retract: normalization, idempotence, degenerate input") {
  const auto pat = BlockDiagPattern::repeated(1, 1, 1);
  MatC raw(1, 1);
  raw(0, 0) = Cplx(2.0, 0.0);
  CHECK(std::abs(retract(raw, pat).values(0, 0) - Cplx(1, 0)) < 1e-15);
  raw(0, 0) = Cplx(3.0, 4.0);
  CHECK(std::abs(retract(raw, pat).values(0, 0) - Cplx(0.6, 0.8)) < 1e-15);

  Rng rng = test::make_rng(8);
  const auto pat2 = BlockDiagPattern::make({{2, 2}, {1, 1}});
  const MatC noisy = test::random_complex(3, 3, rng);  // off-support junk included
  const PhaseMatrix r1 = retract(noisy, pat2);
  CHECK(pat2.off_support_norm(r1.values) == 0.0);
  const PhaseMatrix r2 = retract(r1.values, pat2);
  CHECK((r2.values - r1.values).norm() < 1e-15);

  raw(0, 0) = Cplx(1e-16, 0.0);
  CHECK_THROWS_AS(retract(raw, pat), std::domain_error);
}

TEST_CASE("transport: fixed points, annihilation of the new point, tangency") {
  Rng rng = test::make_rng(9);
  const auto pat = BlockDiagPattern::repeated(2, 2, 1);
  const PhaseMatrix x_new = PhaseMatrix::random(pat, rng);

  const TangentVector t = project_tangent(x_new, test::random_complex(4, 2, rng));
  const TangentVector moved = transport(t, x_new);
  CHECK((moved.values - t.values).norm() < 1e-13);

  const TangentVector radial{pat, x_new.values};
  CHECK(transport(radial, x_new).norm() < 1e-14);

  const PhaseMatrix other = PhaseMatrix::random(pat, rng);
  const TangentVector from_other = project_tangent(other, test::random_complex(4, 2, rng));
  CHECK(max_tangency_violation(transport(from_other, x_new), x_new) < 1e-12);
}

TEST_CASE("metric: scalar examples and positivity") {
  const auto pat = BlockDiagPattern::repeated(1, 1, 1);
  MatC j(1, 1), one(1, 1);
  j(0, 0) = Cplx(0, 1);
  one(0, 0) = Cplx(1, 0);
  CHECK(metric({pat, j}, {pat, j}) == doctest::Approx(1.0));
  CHECK(metric({pat, one}, {pat, j}) == doctest::Approx(0.0));

  Rng rng = test::make_rng(10);
  const auto pat2 = BlockDiagPattern::make({{2, 3}});
  const MatC a = test::random_complex(2, 3, rng);
  CHECK(metric({pat2, a}, {pat2, a}) >= 0.0);
  // Independent schoolbook evaluation of Re(Tr(A^H B)).
  const MatC b = test::random_complex(2, 3, rng);
  const MatC prod = test::naive_mul(a.adjoint(), b);
  CHECK(metric({pat2, a}, {pat2, b}) == doctest::Approx(prod.trace().real()).epsilon(1e-12));
}

TEST_CASE("polak_ribiere: trivial values and the independent trace oracle") {
  Rng rng = test::make_rng(12);
  const auto pat = BlockDiagPattern::make({{3, 1}});
  const MatC a = test::random_complex(3, 1, rng);
  const MatC b = test::random_complex(3, 1, rng);
  const MatC c = test::random_complex(3, 1, rng);
  const TangentVector g_new{pat, a}, g_t{pat, b}, g_old{pat, c};

  CHECK(polak_ribiere(g_new, g_new, g_old) == doctest::Approx(0.0));
  CHECK(polak_ribiere(g_new, {pat, MatC::Zero(3, 1)}, g_old) ==
        doctest::Approx(a.squaredNorm() / c.squaredNorm()));

  const double expected = test::naive_mul(a.adjoint(), MatC(a - b)).trace().real() /
                          test::naive_mul(c.adjoint(), c).trace().real();
  CHECK(polak_ribiere(g_new, g_t, g_old) == doctest::Approx(expected).epsilon(1e-12));

  CHECK_THROWS_AS(polak_ribiere(g_new, g_t, {pat, MatC::Zero(3, 1)}), std::domain_error);
}

namespace {

// ||X - T||_F^2 over the manifold, with its packed-real Euclidean gradient.
struct PhaseFit {
  PhaseMatrix target;
  double operator()(const PointTuple& pts) const {
    return (pts[0].values - target.values).squaredNorm();
  }
  std::vector<MatC> grad(const PointTuple& pts) const {
    return {2.0 * (pts[0].values - target.values)};
  }
};

}  // namespace

TEST_CASE("backtracking_step: descent on a smooth model, trivial directions") {
  Rng rng = test::make_rng(14);
  const auto pat = BlockDiagPattern::repeated(2, 3, 1);
  PhaseFit fit{PhaseMatrix::random(pat, rng)};
  const PhaseMatrix x0 = PhaseMatrix::random(pat, rng);

  Objective obj = [&](const PointTuple& p) { return fit(p); };
  RcgParams params;

  const PointTuple pts{x0};
  const TangentVector g = project_tangent(x0, fit.grad(pts)[0]);
  const TangentVector d{pat, -g.values};

  SUBCASE("negative gradient direction decreases the objective") {
    const auto ls = backtracking_step(obj, pts, {g}, {d}, params);
    CHECK(ls.alpha > 0.0);
    CHECK(obj(ls.points) < obj(pts));
  }
  SUBCASE("zero direction accepts alpha0 and keeps the point") {
    const TangentVector zero{pat, MatC::Zero(pat.total_rows, pat.total_cols)};
    const auto ls = backtracking_step(obj, pts, {g}, {zero}, params);
    CHECK(ls.alpha == params.alpha0);
    CHECK((ls.points[0].values - x0.values).norm() < 1e-15);
  }
  SUBCASE("no decrease available falls back to alpha = 0") {
    // Start at the optimum: every nonzero direction fails the Armijo test.
    const PointTuple opt{fit.target};
    const TangentVector g_opt = project_tangent(fit.target, fit.grad(opt)[0]);
    const TangentVector ascent =
        project_tangent(fit.target, test::random_complex(pat.total_rows, pat.total_cols, rng));
    RcgParams strict;
    strict.c = 0.999999;
    const auto ls = backtracking_step(obj, opt, {g_opt}, {ascent}, strict);
    CHECK(ls.alpha == 0.0);
    CHECK((ls.points[0].values - fit.target.values).norm() == 0.0);
  }
}

TEST_CASE("rcg_minimize: immediate return at a stationary start") {
  Rng rng = test::make_rng(15);
  const auto pat = BlockDiagPattern::repeated(1, 4, 1);
  const PhaseMatrix x0 = PhaseMatrix::random(pat, rng);
  Objective obj = [](const PointTuple&) { return 1.5; };
  EuclideanGradient grad = [&](const PointTuple& p) {
    return std::vector<MatC>{MatC::Zero(4, 1)};
  };
  const RcgResult res = rcg_minimize(obj, grad, {x0}, RcgParams{});
  CHECK(res.trace.size() == 1);
  CHECK(res.converged);
  CHECK(res.iterations == 0);
  CHECK((res.points[0].values - x0.values).norm() == 0.0);
}

TEST_CASE("rcg_minimize: phase alignment reaches the closed-form optimum") {
  Rng rng = test::make_rng(16);
  const auto pat = BlockDiagPattern::repeated(1, 8, 1);
  VecC a(8);
  for (int i = 0; i < 8; ++i) a[i] = complex_normal(rng) + Cplx(0.05, 0.0);

  // maximize Re(a^H x) == minimize -Re(a^H x); optimum x_i = a_i / |a_i|.
  Objective obj = [&](const PointTuple& p) {
    return -(a.adjoint() * p[0].values.col(0))(0, 0).real();
  };
  EuclideanGradient grad = [&](const PointTuple& p) { return std::vector<MatC>{MatC(-a)}; };

  RcgParams params;
  params.epsilon = 1e-9;
  params.max_iter = 500;
  const RcgResult res = rcg_minimize(obj, grad, {PhaseMatrix::random(pat, rng)}, params);
  CHECK(res.converged);
  for (int i = 0; i < 8; ++i)
    CHECK(std::abs(res.points[0].values(i, 0) - a[i] / std::abs(a[i])) < 1e-6);

  for (std::size_t k = 1; k < res.trace.size(); ++k)
    CHECK(res.trace[k] <= res.trace[k - 1] + 1e-10);
}

TEST_CASE("rcg_minimize: iterates stay feasible and the trace never increases") {
  Rng rng = test::make_rng(17);
  const auto pat = BlockDiagPattern::make({{4, 1}, {1, 3}});
  PhaseFit fit{PhaseMatrix::random(pat, rng)};
  Objective obj = [&](const PointTuple& p) {
    // Feasibility check rides along with every evaluation.
    REQUIRE(p[0].pattern.off_support_norm(p[0].values) == 0.0);
    for (const auto& b : p[0].pattern.blocks)
      REQUIRE((p[0].values.block(b.row, b.col, b.rows, b.cols).cwiseAbs().array() - 1.0)
                  .abs()
                  .maxCoeff() < 1e-9);
    return fit(p);
  };
  EuclideanGradient grad = [&](const PointTuple& p) { return fit.grad(p); };
  const RcgResult res = rcg_minimize(obj, grad, {PhaseMatrix::random(pat, rng)}, RcgParams{});
  for (std::size_t k = 1; k < res.trace.size(); ++k)
    CHECK(res.trace[k] <= res.trace[k - 1] + 1e-10);
  CHECK(res.trace.back() < res.trace.front());
}
