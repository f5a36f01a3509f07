#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_util.hpp"

using namespace rimsa;

TEST_CASE("steering vector: single element is [1]") {
  const VecC a = steering_vector({1, 1, 0.5}, 1.234, -0.7);
  REQUIRE(a.size() == 1);
  CHECK(std::abs(a[0] - Cplx(1.0, 0.0)) < 1e-15);
}

TEST_CASE("steering vector: 2x2 broadside pattern alternates sign") {
  // phi = 0, theta = 0: the exponent reduces to j*pi*q.
  const VecC a = steering_vector({2, 2, 0.5}, 0.0, 0.0);
  REQUIRE(a.size() == 4);
  const double h = 0.5;
  CHECK(std::abs(a[0] - Cplx(h, 0)) < 1e-12);
  CHECK(std::abs(a[1] + Cplx(h, 0)) < 1e-12);
  CHECK(std::abs(a[2] - Cplx(h, 0)) < 1e-12);
  CHECK(std::abs(a[3] + Cplx(h, 0)) < 1e-12);
}

TEST_CASE("steering vector: unit norm and constant modulus for random angles") {
  Rng rng = test::make_rng(7);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  for (int k = 0; k < 50; ++k) {
    const ArrayGeometry g{4, 2, 0.5};
    const VecC a = steering_vector(g, angle(rng), angle(rng));
    CHECK(std::abs(a.norm() - 1.0) < 1e-12);
    for (Eigen::Index i = 0; i < a.size(); ++i)
      CHECK(std::abs(std::abs(a[i]) - 1.0 / std::sqrt(8.0)) < 1e-12);
  }
}

TEST_CASE("sample_channel: scalar case and argument validation") {
  Rng rng = test::make_rng(11);
  const MatC h = sample_channel(rng, {1, 1, 0.5}, {1, 1, 0.5}, 1);
  CHECK(h.rows() == 1);
  CHECK(h.cols() == 1);
  CHECK(std::abs(h(0, 0)) > 0.0);
  CHECK_THROWS_AS(sample_channel(rng, {1, 1, 0.5}, {1, 1, 0.5}, 0), std::invalid_argument);
}

TEST_CASE("sample_channel: single path gives a rank-one matrix") {
  Rng rng = test::make_rng(12);
  const MatC h = sample_channel(rng, {4, 2, 0.5}, {2, 2, 0.5}, 1);
  const Eigen::JacobiSVD<MatC> svd(h);
  REQUIRE(svd.singularValues().size() >= 2);
  CHECK(svd.singularValues()[1] < 1e-12 * svd.singularValues()[0]);
}

TEST_CASE("sample_channel: mean Frobenius power matches N_t * N_r") {
  // E|alpha|^2 = 1 and unit-norm steering vectors give E||H||_F^2 = N_t N_r.
  Rng rng = test::make_rng(13);
  const ArrayGeometry tx{8, 8, 0.5};
  const ArrayGeometry rx{2, 2, 0.5};
  const int draws = 10000;
  double acc = 0.0;
  for (int k = 0; k < draws; ++k) acc += sample_channel(rng, tx, rx, 4).squaredNorm();
  const double mean = acc / draws;
  CHECK(std::abs(mean - 256.0) / 256.0 < 0.05);
}

TEST_CASE("sample_channel: bit-reproducible for a fixed seed") {
  Rng a = test::make_rng(99), b = test::make_rng(99);
  const MatC h1 = sample_channel(a, {4, 2, 0.5}, {2, 1, 0.5}, 3);
  const MatC h2 = sample_channel(b, {4, 2, 0.5}, {2, 1, 0.5}, 3);
  CHECK(h1 == h2);
}

TEST_CASE("multiuser channel: stacked rows equal per-user blocks exactly") {
  Rng rng = test::make_rng(21);
  const auto ch = sample_multiuser_channel(rng, {4, 1, 0.5}, {2, 1, 0.5}, 3, 2);
  REQUIRE(ch.n_users() == 3);
  for (int m = 0; m < 3; ++m) CHECK(ch.stacked.middleRows(2 * m, 2) == ch.per_user[m]);
}

TEST_CASE("perturb_csi: zero error is the identity") {
  Rng rng = test::make_rng(31);
  const auto ch = sample_multiuser_channel(rng, {4, 1, 0.5}, {2, 1, 0.5}, 2, 2);
  Rng prng = test::make_rng(32);
  const auto out = perturb_csi(ch, {0.0}, prng);
  for (int m = 0; m < 2; ++m) CHECK(out.per_user[m] == ch.per_user[m]);
  CHECK(out.stacked == ch.stacked);
}

TEST_CASE("perturb_csi: empirical per-entry error variance") {
  Rng rng = test::make_rng(41);
  const auto ch = sample_multiuser_channel(rng, {10, 5, 0.5}, {10, 5, 0.5}, 4, 2);
  Rng prng = test::make_rng(42);
  const double sigma = 0.1;
  const auto out = perturb_csi(ch, {sigma}, prng);
  double acc = 0.0;
  std::size_t n = 0;
  for (int m = 0; m < 4; ++m) {
    acc += (out.per_user[m] - ch.per_user[m]).squaredNorm();
    n += out.per_user[m].size();
  }
  REQUIRE(n == 10000);
  CHECK(std::abs(acc / n - sigma * sigma) / (sigma * sigma) < 0.05);
}

TEST_CASE("perturb_csi: deterministic under a fixed seed, consistent stacking") {
  Rng rng = test::make_rng(51);
  const auto ch = sample_multiuser_channel(rng, {4, 1, 0.5}, {2, 1, 0.5}, 2, 2);
  Rng p1 = test::make_rng(52), p2 = test::make_rng(52);
  const auto o1 = perturb_csi(ch, {0.3}, p1);
  const auto o2 = perturb_csi(ch, {0.3}, p2);
  CHECK(o1.stacked == o2.stacked);
  for (int m = 0; m < 2; ++m) CHECK(o1.stacked.middleRows(2 * m, 2) == o1.per_user[m]);
}
