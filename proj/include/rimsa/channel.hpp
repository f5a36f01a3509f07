#pragma once

#include "rimsa/types.hpp"

#include <vector>

namespace rimsa {

/// Uniform planar array in the y-z plane: n_y x n_z elements with the given
/// spacing in wavelengths (half-wavelength by default).
struct ArrayGeometry {
  int n_y = 1;
  int n_z = 1;
  double spacing = 0.5;

  int size() const { return n_y * n_z; }
  bool valid() const { return n_y >= 1 && n_z >= 1 && spacing > 0.0; }
};

/// Near-square UPA factorization for a given element count (n_y >= n_z).
ArrayGeometry upa_for(int n_elements, double spacing = 0.5);

/// Parameters of a single propagation path.
struct PathParams {
  Cplx gain;
  double aoa_azimuth = 0.0;
  double aoa_elevation = 0.0;
  double aod_azimuth = 0.0;
  double aod_elevation = 0.0;
};

/// Per-user downlink channels H_i (n_rx x n_tx) plus their row-stacked
/// aggregate; the stacked matrix is always the vertical concatenation of
/// per_user in user order.
struct ChannelRealization {
  std::vector<MatC> per_user;
  MatC stacked;

  static ChannelRealization from_users(std::vector<MatC> users);
  int n_users() const { return static_cast<int>(per_user.size()); }
};

/// Additive CSI estimation error; sigma_e^2 is the total variance per
/// complex entry (sigma_e^2/2 per real component).
struct CsiErrorModel {
  double sigma_e = 0.0;
};

/// UPA response vector a(phi, theta). Entry (p, q), with p = 0..n_y-1 outer
/// and q = 0..n_z-1 inner, equals
///   (1/sqrt(N)) * exp(j * 2*pi*spacing * (p sin(phi) sin(theta) + q cos(theta))).
/// Always unit Euclidean norm.
VecC steering_vector(const ArrayGeometry& geom, double azimuth, double elevation);

/// Geometric narrowband channel with n_paths paths:
///   H = sqrt(N_t*N_r/L) * sum_l gain_l * a_r(phi_r, theta_r) a_t(phi_t, theta_t)^H,
/// gains standard complex normal, all angles uniform on [0, 2pi).
/// Throws std::invalid_argument if n_paths < 1.
MatC sample_channel(Rng& rng, const ArrayGeometry& tx_geom, const ArrayGeometry& rx_geom,
                    int n_paths);

/// Draws n_users independent channels and stacks them.
ChannelRealization sample_multiuser_channel(Rng& rng, const ArrayGeometry& tx_geom,
                                            const ArrayGeometry& rx_geom, int n_users,
                                            int n_paths);

/// H_hat = H + E with E i.i.d. complex Gaussian of per-entry variance
/// sigma_e^2; per_user and stacked stay consistent.
ChannelRealization perturb_csi(const ChannelRealization& h, const CsiErrorModel& model, Rng& rng);

}  // namespace rimsa
