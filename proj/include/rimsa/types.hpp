#pragma once

#include <Eigen/Dense>

#include <complex>
#include <random>

namespace rimsa {

using Cplx = std::complex<double>;
using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;
using MatD = Eigen::MatrixXd;
using VecD = Eigen::VectorXd;

/// Random source used throughout; every stochastic routine takes one
/// explicitly so results are reproducible from a seed.
using Rng = std::mt19937_64;

/// One sample of the standard circularly-symmetric complex normal CN(0,1),
/// i.e. variance 1/2 per real component.
inline Cplx complex_normal(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  const double s = 1.0 / std::sqrt(2.0);
  const double re = n(rng) * s;
  const double im = n(rng) * s;
  return {re, im};
}

}  // namespace rimsa
