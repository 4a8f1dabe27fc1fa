#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "pinchsim/rng.hpp"

namespace pinchsim {

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

// Physical constants and model coefficients shared by every module.
// atten_alpha is the in-waveguide amplitude attenuation in natural-log units
// (1/m); dB/m inputs are converted at the config boundary (see units.hpp).
struct SystemParams {
  double carrier_freq_hz = 28e9;
  double atten_alpha = 0.0092;     // 1/m
  double blockage_beta = 0.1;      // obstacle density, 1/m^2
  double waveguide_height = 10.0;  // d_v, m
  double region_side = 50.0;       // D, m
  double refractive_index = 1.4;   // n_eff
  double noise_power = 1e-14;      // W (-110 dBm)
  double tx_power = 10.0;          // W (40 dBm)

  // Exact SI value, not 3e8: the path-gain constant differs in the fourth
  // digit between the two conventions.
  static constexpr double kLightSpeed = 299792458.0;  // m/s

  double wavelength() const { return kLightSpeed / carrier_freq_hz; }
  double guided_wavelength() const { return wavelength() / refractive_index; }
  // c^2 / (16 pi^2 f^2): free-space channel gain at 1 m distance.
  double path_gain() const;
  // rho = P / sigma^2
  double snr_scale() const { return tx_power / noise_power; }

  void validate() const;  // throws std::invalid_argument
};

// N waveguides parallel to the x-axis at height d_v, spread uniformly in y
// over [-D/2, D/2]; one pinching antenna per waveguide at antenna_x[n].
struct MultiGeometry {
  int num_waveguides = 0;           // N
  int num_users = 0;                // M <= N
  std::vector<double> antenna_x;    // length N, each in [0, x_max]
  std::vector<double> waveguide_y;  // length N
  std::vector<Point3> users;        // length M, z = 0
  double x_max = 0.0;

  // Uniform layout: spacing d_h = D/(N-1), waveguide n at y = n*d_h - D/2
  // (a single waveguide sits at y = 0). Antennas start at x_max/2.
  static MultiGeometry uniform(int num_waveguides, std::vector<Point3> users,
                               double region_side, double x_max);

  Point3 antenna_position(int n) const;
  void validate() const;
};

// One sampled 0/1 LoS indicator per (user, antenna) pair.
struct BlockageRealization {
  int num_users = 0;
  int num_antennas = 0;
  std::vector<std::uint8_t> gamma;  // row-major M x N

  std::uint8_t operator()(int m, int n) const { return gamma[m * num_antennas + n]; }
};

// Complex M x N effective (or LoS) channel.
struct ChannelMatrix {
  int num_users = 0;
  int num_antennas = 0;
  std::vector<std::complex<double>> h;  // row-major M x N

  std::complex<double>& at(int m, int n) { return h[m * num_antennas + n]; }
  const std::complex<double>& at(int m, int n) const { return h[m * num_antennas + n]; }
};

// Single-waveguide LoS channel with the antenna at (antenna_x, 0, d_v):
//   sqrt(eta) * exp(-j(2pi/lambda * d_free + 2pi/lambda_g * antenna_x))
//   / (d_free * e^{alpha * antenna_x})          [attenuation factor optional]
std::complex<double> los_channel_single(const SystemParams& params, const Point3& user,
                                        double antenna_x, bool with_attenuation);

// P(LoS) = exp(-beta * |antenna - user|^2)
double los_probability(const SystemParams& params, const Point3& antenna, const Point3& user);

// Mean of |h|^2 over the blockage indicator, single-waveguide geometry,
// in-waveguide attenuation included:
//   eta * exp(-beta * r2) / (r2 * e^{2 alpha x}),  r2 = (x - x_bar)^2 + y_bar^2 + d_v^2
double expected_channel_gain(const SystemParams& params, const Point3& user, double antenna_x);

// Multi-waveguide LoS channel (no in-waveguide attenuation factor).
std::complex<double> multiuser_los_channel(const SystemParams& params, const MultiGeometry& geom,
                                           int m, int n);

// LoS channel for every (user, antenna) pair with antennas at `antenna_x`.
ChannelMatrix los_channel_matrix(const SystemParams& params, const MultiGeometry& geom,
                                 std::span<const double> antenna_x);
ChannelMatrix los_channel_matrix(const SystemParams& params, const MultiGeometry& geom);

// Independent Bernoulli draw per (m, n) with success probability given by
// los_probability at the geometry's current antenna positions.
BlockageRealization sample_blockage(Rng& rng, const SystemParams& params,
                                    const MultiGeometry& geom);

}  // namespace pinchsim
