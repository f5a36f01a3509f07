#include "rimsa/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace rimsa {

namespace {
constexpr double kTwoPi = 2.0 * M_PI;
}

ArrayGeometry upa_for(int n_elements, double spacing) {
  if (n_elements < 1) throw std::invalid_argument("upa_for: element count must be positive");
  int n_z = static_cast<int>(std::sqrt(static_cast<double>(n_elements)));
  while (n_z > 1 && n_elements % n_z != 0) --n_z;
  return ArrayGeometry{n_elements / n_z, n_z, spacing};
}

ChannelRealization ChannelRealization::from_users(std::vector<MatC> users) {
  if (users.empty()) throw std::invalid_argument("ChannelRealization: no users");
  const Eigen::Index n_rx = users.front().rows();
  const Eigen::Index n_tx = users.front().cols();
  ChannelRealization out;
  out.stacked.resize(n_rx * static_cast<Eigen::Index>(users.size()), n_tx);
  for (std::size_t i = 0; i < users.size(); ++i) {
    if (users[i].rows() != n_rx || users[i].cols() != n_tx)
      throw std::invalid_argument("ChannelRealization: inconsistent per-user shapes");
    out.stacked.middleRows(static_cast<Eigen::Index>(i) * n_rx, n_rx) = users[i];
  }
  out.per_user = std::move(users);
  return out;
}

VecC steering_vector(const ArrayGeometry& geom, double azimuth, double elevation) {
  if (!geom.valid()) throw std::invalid_argument("steering_vector: invalid geometry");
  const int n = geom.size();
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  const double k_d = kTwoPi * geom.spacing;
  const double sin_az_sin_el = std::sin(azimuth) * std::sin(elevation);
  const double cos_el = std::cos(elevation);
  VecC a(n);
  for (int p = 0; p < geom.n_y; ++p) {
    for (int q = 0; q < geom.n_z; ++q) {
      const double phase = k_d * (p * sin_az_sin_el + q * cos_el);
      a[p * geom.n_z + q] = scale * Cplx(std::cos(phase), std::sin(phase));
    }
  }
  return a;
}

MatC sample_channel(Rng& rng, const ArrayGeometry& tx_geom, const ArrayGeometry& rx_geom,
                    int n_paths) {
  if (n_paths < 1) throw std::invalid_argument("sample_channel: n_paths must be >= 1");
  if (!tx_geom.valid() || !rx_geom.valid())
    throw std::invalid_argument("sample_channel: invalid geometry");

  const int n_t = tx_geom.size();
  const int n_r = rx_geom.size();
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);

  MatC h = MatC::Zero(n_r, n_t);
  for (int l = 0; l < n_paths; ++l) {
    PathParams p;
    p.gain = complex_normal(rng);
    p.aoa_azimuth = angle(rng);
    p.aoa_elevation = angle(rng);
    p.aod_azimuth = angle(rng);
    p.aod_elevation = angle(rng);
    const VecC a_r = steering_vector(rx_geom, p.aoa_azimuth, p.aoa_elevation);
    const VecC a_t = steering_vector(tx_geom, p.aod_azimuth, p.aod_elevation);
    h.noalias() += p.gain * a_r * a_t.adjoint();
  }
  h *= std::sqrt(static_cast<double>(n_t) * n_r / n_paths);
  return h;
}

ChannelRealization sample_multiuser_channel(Rng& rng, const ArrayGeometry& tx_geom,
                                            const ArrayGeometry& rx_geom, int n_users,
                                            int n_paths) {
  if (n_users < 1) throw std::invalid_argument("sample_multiuser_channel: n_users must be >= 1");
  std::vector<MatC> users;
  users.reserve(n_users);
  for (int m = 0; m < n_users; ++m) users.push_back(sample_channel(rng, tx_geom, rx_geom, n_paths));
  return ChannelRealization::from_users(std::move(users));
}

ChannelRealization perturb_csi(const ChannelRealization& h, const CsiErrorModel& model, Rng& rng) {
  if (model.sigma_e < 0.0) throw std::invalid_argument("perturb_csi: sigma_e must be >= 0");
  std::vector<MatC> users = h.per_user;
  if (model.sigma_e > 0.0) {
    for (MatC& u : users) {
      for (Eigen::Index j = 0; j < u.cols(); ++j)
        for (Eigen::Index i = 0; i < u.rows(); ++i) u(i, j) += model.sigma_e * complex_normal(rng);
    }
  }
  return ChannelRealization::from_users(std::move(users));
}

}  // namespace rimsa
