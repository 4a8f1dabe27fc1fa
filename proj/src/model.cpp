#include "pinchsim/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pinchsim {

namespace {

constexpr double kPi = std::numbers::pi;

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("SystemParams: ") + what);
}

bool finite(const Point3& p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

}  // namespace

double SystemParams::path_gain() const {
  const double c = kLightSpeed;
  return c * c / (16.0 * kPi * kPi * carrier_freq_hz * carrier_freq_hz);
}

void SystemParams::validate() const {
  require(std::isfinite(carrier_freq_hz) && carrier_freq_hz > 0, "carrier_freq_hz must be > 0");
  require(std::isfinite(atten_alpha) && atten_alpha >= 0, "atten_alpha must be >= 0");
  require(std::isfinite(blockage_beta) && blockage_beta >= 0, "blockage_beta must be >= 0");
  require(std::isfinite(waveguide_height) && waveguide_height > 0,
          "waveguide_height must be > 0");
  require(std::isfinite(region_side) && region_side > 0, "region_side must be > 0");
  require(std::isfinite(refractive_index) && refractive_index >= 1,
          "refractive_index must be >= 1");
  require(std::isfinite(noise_power) && noise_power > 0, "noise_power must be > 0");
  require(std::isfinite(tx_power) && tx_power > 0, "tx_power must be > 0");
}

MultiGeometry MultiGeometry::uniform(int num_waveguides, std::vector<Point3> users,
                                     double region_side, double x_max) {
  MultiGeometry g;
  g.num_waveguides = num_waveguides;
  g.num_users = static_cast<int>(users.size());
  g.users = std::move(users);
  g.x_max = x_max;
  g.antenna_x.assign(static_cast<std::size_t>(num_waveguides), x_max / 2.0);
  g.waveguide_y.resize(static_cast<std::size_t>(num_waveguides));
  if (num_waveguides == 1) {
    g.waveguide_y[0] = 0.0;
  } else {
    const double spacing = region_side / (num_waveguides - 1);
    for (int n = 0; n < num_waveguides; ++n)
      g.waveguide_y[static_cast<std::size_t>(n)] = n * spacing - region_side / 2.0;
  }
  g.validate();
  return g;
}

Point3 MultiGeometry::antenna_position(int n) const {
  return {antenna_x[static_cast<std::size_t>(n)], waveguide_y[static_cast<std::size_t>(n)], 0.0};
}

void MultiGeometry::validate() const {
  if (num_waveguides < 1) throw std::invalid_argument("MultiGeometry: need at least one waveguide");
  if (num_users < 1) throw std::invalid_argument("MultiGeometry: need at least one user");
  if (num_users > num_waveguides)
    throw std::invalid_argument("MultiGeometry: num_users must not exceed num_waveguides");
  if (!(std::isfinite(x_max) && x_max >= 0))
    throw std::invalid_argument("MultiGeometry: x_max must be >= 0");
  if (antenna_x.size() != static_cast<std::size_t>(num_waveguides) ||
      waveguide_y.size() != static_cast<std::size_t>(num_waveguides) ||
      users.size() != static_cast<std::size_t>(num_users))
    throw std::invalid_argument("MultiGeometry: inconsistent vector lengths");
  for (double x : antenna_x)
    if (!(std::isfinite(x) && x >= 0 && x <= x_max))
      throw std::invalid_argument("MultiGeometry: antenna_x outside [0, x_max]");
  for (const Point3& u : users) {
    if (!finite(u)) throw std::invalid_argument("MultiGeometry: non-finite user position");
    if (u.z != 0.0) throw std::invalid_argument("MultiGeometry: users must lie in the z = 0 plane");
  }
}

std::complex<double> los_channel_single(const SystemParams& params, const Point3& user,
                                        double antenna_x, bool with_attenuation) {
  if (!finite(user) || !std::isfinite(antenna_x))
    throw std::invalid_argument("los_channel_single: non-finite input");
  if (antenna_x < 0) throw std::invalid_argument("los_channel_single: antenna_x must be >= 0");
  const double dx = user.x - antenna_x;
  const double dz = user.z - params.waveguide_height;
  const double dist = std::sqrt(dx * dx + user.y * user.y + dz * dz);
  const double phase = 2.0 * kPi / params.wavelength() * dist +
                       2.0 * kPi / params.guided_wavelength() * antenna_x;
  double denom = dist;
  if (with_attenuation) denom *= std::exp(params.atten_alpha * antenna_x);
  return std::sqrt(params.path_gain()) * std::polar(1.0, -phase) / denom;
}

double los_probability(const SystemParams& params, const Point3& antenna, const Point3& user) {
  if (!finite(antenna) || !finite(user))
    throw std::invalid_argument("los_probability: non-finite input");
  const double dx = antenna.x - user.x;
  const double dy = antenna.y - user.y;
  const double dz = antenna.z - user.z;
  return std::exp(-params.blockage_beta * (dx * dx + dy * dy + dz * dz));
}

double expected_channel_gain(const SystemParams& params, const Point3& user, double antenna_x) {
  if (!finite(user) || !std::isfinite(antenna_x))
    throw std::invalid_argument("expected_channel_gain: non-finite input");
  const double dx = antenna_x - user.x;
  const double r2 =
      dx * dx + user.y * user.y + params.waveguide_height * params.waveguide_height;
  return params.path_gain() * std::exp(-params.blockage_beta * r2) /
         (r2 * std::exp(2.0 * params.atten_alpha * antenna_x));
}

std::complex<double> multiuser_los_channel(const SystemParams& params, const MultiGeometry& geom,
                                           int m, int n) {
  if (m < 0 || m >= geom.num_users || n < 0 || n >= geom.num_waveguides)
    throw std::out_of_range("multiuser_los_channel: index out of range");
  const Point3& u = geom.users[static_cast<std::size_t>(m)];
  const double x = geom.antenna_x[static_cast<std::size_t>(n)];
  const double dy = u.y - geom.waveguide_y[static_cast<std::size_t>(n)];
  const double lat = dy * dy + params.waveguide_height * params.waveguide_height;  // C_{m,n}
  const double dx = x - u.x;
  const double dist = std::sqrt(dx * dx + lat);
  const double phase = 2.0 * kPi / params.wavelength() * dist +
                       2.0 * kPi / params.guided_wavelength() * x;
  return std::sqrt(params.path_gain()) * std::polar(1.0, -phase) / dist;
}

ChannelMatrix los_channel_matrix(const SystemParams& params, const MultiGeometry& geom,
                                 std::span<const double> antenna_x) {
  if (antenna_x.size() != static_cast<std::size_t>(geom.num_waveguides))
    throw std::invalid_argument("los_channel_matrix: antenna_x length mismatch");
  ChannelMatrix h;
  h.num_users = geom.num_users;
  h.num_antennas = geom.num_waveguides;
  h.h.resize(static_cast<std::size_t>(geom.num_users) * geom.num_waveguides);
  const double sqrt_gain = std::sqrt(params.path_gain());
  const double k_free = 2.0 * kPi / params.wavelength();
  const double k_guided = 2.0 * kPi / params.guided_wavelength();
  const double height_sq = params.waveguide_height * params.waveguide_height;
  for (int m = 0; m < geom.num_users; ++m) {
    const Point3& u = geom.users[static_cast<std::size_t>(m)];
    for (int n = 0; n < geom.num_waveguides; ++n) {
      const double x = antenna_x[static_cast<std::size_t>(n)];
      const double dy = u.y - geom.waveguide_y[static_cast<std::size_t>(n)];
      const double dx = x - u.x;
      const double dist = std::sqrt(dx * dx + dy * dy + height_sq);
      h.at(m, n) = sqrt_gain * std::polar(1.0, -(k_free * dist + k_guided * x)) / dist;
    }
  }
  return h;
}

ChannelMatrix los_channel_matrix(const SystemParams& params, const MultiGeometry& geom) {
  return los_channel_matrix(params, geom, geom.antenna_x);
}

BlockageRealization sample_blockage(Rng& rng, const SystemParams& params,
                                    const MultiGeometry& geom) {
  BlockageRealization r;
  r.num_users = geom.num_users;
  r.num_antennas = geom.num_waveguides;
  r.gamma.resize(static_cast<std::size_t>(geom.num_users) * geom.num_waveguides);
  const double height_sq = params.waveguide_height * params.waveguide_height;
  for (int m = 0; m < geom.num_users; ++m) {
    const Point3& u = geom.users[static_cast<std::size_t>(m)];
    for (int n = 0; n < geom.num_waveguides; ++n) {
      const double dx = geom.antenna_x[static_cast<std::size_t>(n)] - u.x;
      const double dy = geom.waveguide_y[static_cast<std::size_t>(n)] - u.y;
      const double p = std::exp(-params.blockage_beta * (dx * dx + dy * dy + height_sq));
      r.gamma[static_cast<std::size_t>(m) * geom.num_waveguides + n] =
          rng.bernoulli(p) ? 1 : 0;
    }
  }
  return r;
}

}  // namespace pinchsim
