#include "pinchsim/multiuser.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace pinchsim {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

void check_dims(const BeamformerSet& V, const MultiGeometry& geom) {
  if (V.num_users != geom.num_users || V.num_antennas != geom.num_waveguides)
    throw std::invalid_argument("beamformer/geometry dimension mismatch");
}

void check_samples(const SampleSet& samples, const MultiGeometry& geom) {
  if (samples.size() < 1) throw std::invalid_argument("sample set is empty");
  for (const BlockageRealization& r : samples.realizations)
    if (r.num_users != geom.num_users || r.num_antennas != geom.num_waveguides)
      throw std::invalid_argument("sample/geometry dimension mismatch");
}

void check_positions(const MultiGeometry& geom, std::span<const double> antenna_x) {
  if (antenna_x.size() != static_cast<std::size_t>(geom.num_waveguides))
    throw std::invalid_argument("antenna_x length mismatch");
  for (double x : antenna_x)
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite antenna position");
}

// Sum rate of one blockage realization given the LoS matrix; channels enter
// as gamma * hLoS and beamformers through the plain transpose h_m^T v_i.
double sample_sum_rate(const BeamformerSet& V, const BlockageRealization& gamma,
                       const ChannelMatrix& hlos, double noise_power) {
  const int num_users = V.num_users;
  const int num_antennas = V.num_antennas;
  double sum = 0.0;
  for (int m = 0; m < num_users; ++m) {
    double signal = 0.0;
    double interference = 0.0;
    for (int i = 0; i < num_users; ++i) {
      std::complex<double> z = 0.0;
      for (int n = 0; n < num_antennas; ++n)
        if (gamma(m, n)) z += hlos.at(m, n) * V.at(n, i);
      (i == m ? signal : interference) += std::norm(z);
    }
    sum += std::log2(1.0 + signal / (interference + noise_power));
  }
  return sum;
}

std::vector<double> per_sample_rates(const BeamformerSet& V, const SampleSet& samples,
                                     const ChannelMatrix& hlos, double noise_power) {
  const int num_samples = samples.size();
  std::vector<double> rates(static_cast<std::size_t>(num_samples));
#pragma omp parallel for schedule(static)
  for (int l = 0; l < num_samples; ++l)
    rates[static_cast<std::size_t>(l)] =
        sample_sum_rate(V, samples.realizations[static_cast<std::size_t>(l)], hlos, noise_power);
  return rates;
}

double mean_rate(const BeamformerSet& V, const SampleSet& samples, const ChannelMatrix& hlos,
                 double noise_power) {
  const std::vector<double> rates = per_sample_rates(V, samples, hlos, noise_power);
  return pairwise_sum(rates) / static_cast<double>(rates.size());
}

MatrixXcd sample_averaged_channel(const SampleSet& samples, const ChannelMatrix& hlos) {
  const int num_users = hlos.num_users;
  const int num_antennas = hlos.num_antennas;
  MatrixXcd hbar = MatrixXcd::Zero(num_users, num_antennas);
  for (const BlockageRealization& r : samples.realizations)
    for (int m = 0; m < num_users; ++m)
      for (int n = 0; n < num_antennas; ++n)
        if (r(m, n)) hbar(m, n) += hlos.at(m, n);
  hbar /= static_cast<double>(samples.size());
  return hbar;
}

BeamformerSet from_eigen(const MatrixXcd& v) {
  BeamformerSet out;
  out.num_antennas = static_cast<int>(v.rows());
  out.num_users = static_cast<int>(v.cols());
  out.v.resize(static_cast<std::size_t>(v.size()));
  for (int m = 0; m < out.num_users; ++m)
    for (int n = 0; n < out.num_antennas; ++n) out.at(n, m) = v(n, m);
  return out;
}

// Matched filters on the sample-averaged channel, total power P split evenly.
BeamformerSet matched_filter_init(const MatrixXcd& hbar, double total_power) {
  const int num_users = static_cast<int>(hbar.rows());
  const int num_antennas = static_cast<int>(hbar.cols());
  MatrixXcd v = MatrixXcd::Zero(num_antennas, num_users);
  for (int m = 0; m < num_users; ++m) {
    const VectorXcd dir = hbar.row(m).conjugate().transpose();
    const double norm = dir.norm();
    if (norm > 0) v.col(m) = dir / norm * std::sqrt(total_power / num_users);
  }
  return from_eigen(v);
}

}  // namespace

double BeamformerSet::total_power() const {
  double p = 0.0;
  for (const std::complex<double>& x : v) p += std::norm(x);
  return p;
}

BeamformerSet BeamformerSet::zeros(int num_users, int num_antennas) {
  BeamformerSet out;
  out.num_users = num_users;
  out.num_antennas = num_antennas;
  out.v.assign(static_cast<std::size_t>(num_users) * num_antennas, 0.0);
  return out;
}

void PsoConfig::validate() const {
  if (swarm_size < 2) throw std::invalid_argument("PsoConfig: swarm_size must be >= 2");
  if (max_iters < 1) throw std::invalid_argument("PsoConfig: max_iters must be >= 1");
  if (!(cognitive_c1 > 0) || !(social_c2 > 0))
    throw std::invalid_argument("PsoConfig: acceleration coefficients must be > 0");
  if (!(velocity_init_fraction > 0))
    throw std::invalid_argument("PsoConfig: velocity_init_fraction must be > 0");
}

void SaaConfig::validate() const {
  if (num_samples < 1) throw std::invalid_argument("SaaConfig: num_samples must be >= 1");
  if (max_outer_iters < 1) throw std::invalid_argument("SaaConfig: max_outer_iters must be >= 1");
  if (!(rel_tol > 0)) throw std::invalid_argument("SaaConfig: rel_tol must be > 0");
  if (wmmse_max_iters < 1) throw std::invalid_argument("SaaConfig: wmmse_max_iters must be >= 1");
  if (!(wmmse_tol > 0)) throw std::invalid_argument("SaaConfig: wmmse_tol must be > 0");
}

const char* to_string(BeamformerMode mode) {
  return mode == BeamformerMode::wmmse ? "wmmse" : "zf";
}

bool parse_beamformer_mode(const char* name, BeamformerMode& out) {
  const std::string s(name);
  if (s == "wmmse") out = BeamformerMode::wmmse;
  else if (s == "zf") out = BeamformerMode::zf;
  else return false;
  return true;
}

SampleSet draw_samples(Rng& rng, const SystemParams& params, const MultiGeometry& geom,
                       int num_samples) {
  if (num_samples < 1) throw std::invalid_argument("draw_samples: num_samples must be >= 1");
  SampleSet s;
  s.realizations.reserve(static_cast<std::size_t>(num_samples));
  for (int l = 0; l < num_samples; ++l) s.realizations.push_back(sample_blockage(rng, params, geom));
  s.generated_at_positions = geom.antenna_x;
  return s;
}

double empirical_sum_rate(const BeamformerSet& V, const SampleSet& samples,
                          const MultiGeometry& geom, const SystemParams& params,
                          std::span<const double> antenna_x) {
  check_dims(V, geom);
  check_samples(samples, geom);
  check_positions(geom, antenna_x);
  const ChannelMatrix hlos = los_channel_matrix(params, geom, antenna_x);
  return mean_rate(V, samples, hlos, params.noise_power);
}

double sum_rate_for_channels(const BeamformerSet& V, std::span<const ChannelMatrix> channels,
                             double noise_power) {
  if (channels.empty()) throw std::invalid_argument("sum_rate_for_channels: no channels");
  BlockageRealization all_clear;
  all_clear.num_users = V.num_users;
  all_clear.num_antennas = V.num_antennas;
  all_clear.gamma.assign(static_cast<std::size_t>(V.num_users) * V.num_antennas, 1);
  std::vector<double> rates(channels.size());
  for (std::size_t l = 0; l < channels.size(); ++l) {
    if (channels[l].num_users != V.num_users || channels[l].num_antennas != V.num_antennas)
      throw std::invalid_argument("sum_rate_for_channels: dimension mismatch");
    rates[l] = sample_sum_rate(V, all_clear, channels[l], noise_power);
  }
  return pairwise_sum(rates) / static_cast<double>(rates.size());
}

WmmseState compute_wmmse_state(const BeamformerSet& V, const SampleSet& samples,
                               const MultiGeometry& geom, const SystemParams& params,
                               std::span<const double> antenna_x) {
  check_dims(V, geom);
  check_samples(samples, geom);
  check_positions(geom, antenna_x);
  const ChannelMatrix hlos = los_channel_matrix(params, geom, antenna_x);
  const int num_users = geom.num_users;
  const int num_antennas = geom.num_waveguides;
  const int num_samples = samples.size();
  WmmseState st;
  st.num_users = num_users;
  st.num_samples = num_samples;
  st.u.resize(static_cast<std::size_t>(num_users) * num_samples);
  st.w.resize(st.u.size());
  st.e.resize(st.u.size());
  for (int l = 0; l < num_samples; ++l) {
    const BlockageRealization& gamma = samples.realizations[static_cast<std::size_t>(l)];
    for (int m = 0; m < num_users; ++m) {
      std::complex<double> z_own = 0.0;
      double denom = params.noise_power;
      for (int i = 0; i < num_users; ++i) {
        std::complex<double> z = 0.0;
        for (int n = 0; n < num_antennas; ++n)
          if (gamma(m, n)) z += hlos.at(m, n) * V.at(n, i);
        denom += std::norm(z);
        if (i == m) z_own = z;
      }
      const std::complex<double> u = z_own / denom;
      const double e = 1.0 - std::norm(z_own) / denom;
      const std::size_t idx = static_cast<std::size_t>(m) * num_samples + l;
      st.u[idx] = u;
      st.e[idx] = e;
      st.w[idx] = 1.0 / e;
    }
  }
  return st;
}

WmmseResult wmmse_beamformers(const BeamformerSet& init, const SampleSet& samples,
                              const MultiGeometry& geom, const SystemParams& params,
                              std::span<const double> antenna_x, double inner_tol,
                              int inner_max_iters) {
  check_dims(init, geom);
  check_samples(samples, geom);
  check_positions(geom, antenna_x);
  if (inner_max_iters < 1) throw std::invalid_argument("wmmse: inner_max_iters must be >= 1");
  const ChannelMatrix hlos = los_channel_matrix(params, geom, antenna_x);
  for (const std::complex<double>& h : hlos.h)
    if (!std::isfinite(h.real()) || !std::isfinite(h.imag()))
      throw std::invalid_argument("wmmse: non-finite channel");

  const int num_users = geom.num_users;
  const int num_antennas = geom.num_waveguides;
  const int num_samples = samples.size();
  const double budget = params.tx_power;
  const double sigma2 = params.noise_power;

  WmmseResult res;
  res.beamformers = init;
  res.rate_history.push_back(mean_rate(init, samples, hlos, sigma2));
  BeamformerSet V = init;
  double best_rate = res.rate_history.front();
  BeamformerSet best_v = V;

  // Per-sample accumulator slots, merged in fixed order for determinism.
  std::vector<MatrixXcd> a_slot(static_cast<std::size_t>(num_samples));
  std::vector<MatrixXcd> b_slot(static_cast<std::size_t>(num_samples));

  for (int iter = 0; iter < inner_max_iters; ++iter) {
    // Closed-form receiver/weight updates and the quadratic's coefficients,
    // one slot per sample.
#pragma omp parallel for schedule(static)
    for (int l = 0; l < num_samples; ++l) {
      const BlockageRealization& gamma = samples.realizations[static_cast<std::size_t>(l)];
      MatrixXcd a = MatrixXcd::Zero(num_antennas, num_antennas);
      MatrixXcd b = MatrixXcd::Zero(num_antennas, num_users);
      for (int m = 0; m < num_users; ++m) {
        VectorXcd h = VectorXcd::Zero(num_antennas);
        for (int n = 0; n < num_antennas; ++n)
          if (gamma(m, n)) h(n) = hlos.at(m, n);
        std::complex<double> z_own = 0.0;
        double denom = sigma2;
        for (int i = 0; i < num_users; ++i) {
          std::complex<double> z = 0.0;
          for (int n = 0; n < num_antennas; ++n) z += h(n) * V.at(n, i);
          denom += std::norm(z);
          if (i == m) z_own = z;
        }
        const std::complex<double> u = z_own / denom;
        const double e = 1.0 - std::norm(z_own) / denom;
        const double w = 1.0 / e;
        a.noalias() += w * std::norm(u) * (h.conjugate() * h.transpose());
        b.col(m) += w * u * h.conjugate();
      }
      a_slot[static_cast<std::size_t>(l)] = std::move(a);
      b_slot[static_cast<std::size_t>(l)] = std::move(b);
    }
    MatrixXcd quad = MatrixXcd::Zero(num_antennas, num_antennas);
    MatrixXcd lin = MatrixXcd::Zero(num_antennas, num_users);
    for (int l = 0; l < num_samples; ++l) {
      quad += a_slot[static_cast<std::size_t>(l)];
      lin += b_slot[static_cast<std::size_t>(l)];
    }
    quad /= static_cast<double>(num_samples);
    lin /= static_cast<double>(num_samples);

    const MatrixXcd identity = MatrixXcd::Identity(num_antennas, num_antennas);
    const auto solve = [&](double mu) -> MatrixXcd {
      return (quad + mu * identity).ldlt().solve(lin);
    };
    MatrixXcd vnew = solve(0.0);
    double mu = 0.0;
    if (!vnew.allFinite() || vnew.squaredNorm() > budget) {
      // Complementary slackness: power meets the budget for the mu > 0 branch.
      double hi = 1.0;
      for (int k = 0; k < 200 && solve(hi).squaredNorm() > budget; ++k) hi *= 2.0;
      double lo = 0.0;
      for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        const double power = solve(mid).squaredNorm();
        if (std::abs(power - budget) <= 1e-10 * budget) {
          hi = mid;
          break;
        }
        (power > budget ? lo : hi) = mid;
      }
      mu = hi;
      vnew = solve(hi);
    }
    V = from_eigen(vnew);
    res.mu = mu;
    const double rate = mean_rate(V, samples, hlos, sigma2);
    res.rate_history.push_back(rate);
    res.iterations = iter + 1;
    if (rate > best_rate) {
      best_rate = rate;
      best_v = V;
    }
    const double prev = res.rate_history[res.rate_history.size() - 2];
    if (std::abs(rate - prev) <= inner_tol * std::max(1.0, std::abs(prev))) break;
  }
  res.beamformers = std::move(best_v);
  return res;
}

ZfResult zf_beamformers(const SampleSet& samples, const MultiGeometry& geom,
                        const SystemParams& params, std::span<const double> antenna_x) {
  check_samples(samples, geom);
  check_positions(geom, antenna_x);
  if (geom.num_users > geom.num_waveguides)
    throw std::invalid_argument("zf_beamformers: requires num_users <= num_waveguides");
  const ChannelMatrix hlos = los_channel_matrix(params, geom, antenna_x);
  const MatrixXcd hbar = sample_averaged_channel(samples, hlos);
  const int num_users = geom.num_users;

  MatrixXcd gram = hbar * hbar.adjoint();  // M x M
  ZfResult out;
  Eigen::FullPivLU<MatrixXcd> lu(gram);
  if (lu.rank() < num_users) {
    out.regularized = true;
    const double trace = gram.trace().real();
    gram += (trace > 0 ? 1e-10 * trace : 1e-30) *
            MatrixXcd::Identity(num_users, num_users);
  }
  // Right pseudo-inverse: Hbar^H (Hbar Hbar^H)^{-1}, so Hbar * V is diagonal.
  const MatrixXcd pinv = hbar.adjoint() * gram.ldlt().solve(
                             MatrixXcd::Identity(num_users, num_users));
  MatrixXcd v = MatrixXcd::Zero(geom.num_waveguides, num_users);
  const double per_user = params.tx_power / num_users;
  for (int m = 0; m < num_users; ++m) {
    const double norm = pinv.col(m).norm();
    if (norm > 0) v.col(m) = pinv.col(m) / norm * std::sqrt(per_user);
  }
  out.beamformers = from_eigen(v);
  return out;
}

PsoResult pso_optimize_antenna(int n, const BeamformerSet& V, const SampleSet& samples,
                               const MultiGeometry& geom, const SystemParams& params,
                               const PsoConfig& config, Rng& rng) {
  check_dims(V, geom);
  check_samples(samples, geom);
  config.validate();
  if (n < 0 || n >= geom.num_waveguides)
    throw std::out_of_range("pso_optimize_antenna: antenna index out of range");

  const int num_users = geom.num_users;
  const int num_antennas = geom.num_waveguides;
  const int num_samples = samples.size();
  const double x_max = geom.x_max;
  const double sigma2 = params.noise_power;

  // Everything except column n of the channel is fixed during this search:
  // cache the cross terms sum_{k != n} gamma_{m,k} hLoS_{m,k} v_{i,k} per
  // sample, the column-n blockage bits, and the column-n beamformer row.
  const ChannelMatrix hlos = los_channel_matrix(params, geom, geom.antenna_x);
  std::vector<std::complex<double>> cross(
      static_cast<std::size_t>(num_samples) * num_users * num_users);
  std::vector<std::uint8_t> gamma_col(static_cast<std::size_t>(num_samples) * num_users);
  for (int l = 0; l < num_samples; ++l) {
    const BlockageRealization& gamma = samples.realizations[static_cast<std::size_t>(l)];
    for (int m = 0; m < num_users; ++m) {
      gamma_col[static_cast<std::size_t>(l) * num_users + m] = gamma(m, n);
      for (int i = 0; i < num_users; ++i) {
        std::complex<double> z = 0.0;
        for (int k = 0; k < num_antennas; ++k)
          if (k != n && gamma(m, k)) z += hlos.at(m, k) * V.at(k, i);
        cross[(static_cast<std::size_t>(l) * num_users + m) * num_users + i] = z;
      }
    }
  }
  std::vector<std::complex<double>> v_row(static_cast<std::size_t>(num_users));
  for (int i = 0; i < num_users; ++i) v_row[static_cast<std::size_t>(i)] = V.at(n, i);

  const double sqrt_gain = std::sqrt(params.path_gain());
  const double k_free = 2.0 * std::numbers::pi / params.wavelength();
  const double k_guided = 2.0 * std::numbers::pi / params.guided_wavelength();
  std::vector<double> lat(static_cast<std::size_t>(num_users));  // C_{m,n}
  for (int m = 0; m < num_users; ++m) {
    const double dy = geom.users[static_cast<std::size_t>(m)].y -
                      geom.waveguide_y[static_cast<std::size_t>(n)];
    lat[static_cast<std::size_t>(m)] =
        dy * dy + params.waveguide_height * params.waveguide_height;
  }

  const auto fitness = [&](double x) {
    std::vector<std::complex<double>> col(static_cast<std::size_t>(num_users));
    for (int m = 0; m < num_users; ++m) {
      const double dx = x - geom.users[static_cast<std::size_t>(m)].x;
      const double dist = std::sqrt(dx * dx + lat[static_cast<std::size_t>(m)]);
      col[static_cast<std::size_t>(m)] =
          sqrt_gain * std::polar(1.0, -(k_free * dist + k_guided * x)) / dist;
    }
    double total = 0.0;
    for (int l = 0; l < num_samples; ++l) {
      for (int m = 0; m < num_users; ++m) {
        const std::complex<double> own =
            gamma_col[static_cast<std::size_t>(l) * num_users + m]
                ? col[static_cast<std::size_t>(m)]
                : std::complex<double>(0.0);
        double signal = 0.0;
        double interference = 0.0;
        const std::size_t base = (static_cast<std::size_t>(l) * num_users + m) * num_users;
        for (int i = 0; i < num_users; ++i) {
          const std::complex<double> z = cross[base + i] + own * v_row[static_cast<std::size_t>(i)];
          (i == m ? signal : interference) += std::norm(z);
        }
        total += std::log2(1.0 + signal / (interference + sigma2));
      }
    }
    return total / static_cast<double>(num_samples);
  };

  const int swarm = config.swarm_size;
  std::vector<double> pos(static_cast<std::size_t>(swarm));
  std::vector<double> vel(static_cast<std::size_t>(swarm));
  std::vector<double> fit(static_cast<std::size_t>(swarm));
  // Particle 0 carries the incumbent position so the update can never lose
  // ground; the rest are drawn uniformly.
  pos[0] = geom.antenna_x[static_cast<std::size_t>(n)];
  vel[0] = rng.uniform(-config.velocity_init_fraction * x_max,
                       config.velocity_init_fraction * x_max);
  for (int s = 1; s < swarm; ++s) {
    pos[static_cast<std::size_t>(s)] = rng.uniform(0.0, x_max);
    vel[static_cast<std::size_t>(s)] = rng.uniform(-config.velocity_init_fraction * x_max,
                                                   config.velocity_init_fraction * x_max);
  }
#pragma omp parallel for schedule(static)
  for (int s = 0; s < swarm; ++s)
    fit[static_cast<std::size_t>(s)] = fitness(pos[static_cast<std::size_t>(s)]);

  std::vector<double> best_pos = pos;
  std::vector<double> best_fit = fit;
  int gbest = 0;
  for (int s = 1; s < swarm; ++s)
    if (best_fit[static_cast<std::size_t>(s)] > best_fit[static_cast<std::size_t>(gbest)]) gbest = s;
  double gbest_pos = best_pos[static_cast<std::size_t>(gbest)];
  double gbest_fit = best_fit[static_cast<std::size_t>(gbest)];

  for (int k = 0; k < config.max_iters; ++k) {
    const double inertia =
        config.inertia_start - config.inertia_slope * static_cast<double>(k) / config.max_iters;
    for (int s = 0; s < swarm; ++s) {
      const double r1 = rng.uniform();
      const double r2 = rng.uniform();
      const std::size_t si = static_cast<std::size_t>(s);
      vel[si] = inertia * vel[si] + config.cognitive_c1 * r1 * (best_pos[si] - pos[si]) +
                config.social_c2 * r2 * (gbest_pos - pos[si]);
      pos[si] = std::min(std::max(pos[si] + vel[si], 0.0), x_max);
    }
#pragma omp parallel for schedule(static)
    for (int s = 0; s < swarm; ++s)
      fit[static_cast<std::size_t>(s)] = fitness(pos[static_cast<std::size_t>(s)]);
    for (int s = 0; s < swarm; ++s) {
      const std::size_t si = static_cast<std::size_t>(s);
      if (fit[si] > best_fit[si]) {
        best_fit[si] = fit[si];
        best_pos[si] = pos[si];
      }
      if (fit[si] > gbest_fit) {
        gbest_fit = fit[si];
        gbest_pos = pos[si];
      }
    }
  }
  return {gbest_pos, gbest_fit};
}

namespace {

BeamformerSet wmmse_init(const SampleSet& samples, const MultiGeometry& geom,
                         const SystemParams& params, std::span<const double> antenna_x) {
  const ZfResult zf = zf_beamformers(samples, geom, params, antenna_x);
  if (!zf.regularized) return zf.beamformers;
  const ChannelMatrix hlos = los_channel_matrix(params, geom, antenna_x);
  return matched_filter_init(sample_averaged_channel(samples, hlos), params.tx_power);
}

SaaResult saa_loop(const MultiGeometry& start, const SystemParams& params, const SaaConfig& saa,
                   const PsoConfig* pso, Rng& rng, BeamformerMode mode) {
  params.validate();
  saa.validate();
  MultiGeometry geom = start;
  geom.validate();
  SaaResult res;
  BeamformerSet V = BeamformerSet::zeros(geom.num_users, geom.num_waveguides);
  SampleSet samples;
  double prev = std::numeric_limits<double>::quiet_NaN();
  int consecutive_hits = 0;
  for (int t = 0; t < saa.max_outer_iters; ++t) {
    if (saa.resample || t == 0) samples = draw_samples(rng, params, geom, saa.num_samples);
    if (mode == BeamformerMode::zf) {
      V = zf_beamformers(samples, geom, params, geom.antenna_x).beamformers;
    } else {
      const BeamformerSet init = wmmse_init(samples, geom, params, geom.antenna_x);
      V = wmmse_beamformers(init, samples, geom, params, geom.antenna_x, saa.wmmse_tol,
                            saa.wmmse_max_iters)
              .beamformers;
    }
    if (pso != nullptr) {
      for (int n = 0; n < geom.num_waveguides; ++n)
        geom.antenna_x[static_cast<std::size_t>(n)] =
            pso_optimize_antenna(n, V, samples, geom, params, *pso, rng).position;
    }
    const double objective = empirical_sum_rate(V, samples, geom, params, geom.antenna_x);
    res.trajectory.push_back(objective);
    res.iterations = t + 1;
    if (t > 0) {
      const double rel = std::abs(objective - prev) / std::max(std::abs(prev), 1e-300);
      consecutive_hits = rel < saa.rel_tol ? consecutive_hits + 1 : 0;
      // Resampled objectives are noisy; require the criterion twice in a row.
      if (consecutive_hits >= 2) {
        prev = objective;
        break;
      }
    }
    prev = objective;
  }
  res.antenna_x = geom.antenna_x;
  res.beamformers = std::move(V);
  return res;
}

}  // namespace

SaaResult dynamic_saa(const MultiGeometry& geom, const SystemParams& params,
                      const SaaConfig& saa, const PsoConfig& pso, Rng& rng,
                      BeamformerMode mode) {
  pso.validate();
  return saa_loop(geom, params, saa, &pso, rng, mode);
}

SaaResult fixed_antenna_baseline(const MultiGeometry& geom, const SystemParams& params,
                                 const SaaConfig& saa, Rng& rng, BeamformerMode mode) {
  MultiGeometry fixed = geom;
  std::fill(fixed.antenna_x.begin(), fixed.antenna_x.end(), fixed.x_max / 2.0);
  return saa_loop(fixed, params, saa, nullptr, rng, mode);
}

RateEstimate evaluate_average_rate(std::span<const double> antenna_x, const BeamformerSet& V,
                                   const MultiGeometry& geom, const SystemParams& params,
                                   long num_eval_samples, Rng& rng) {
  check_dims(V, geom);
  check_positions(geom, antenna_x);
  if (num_eval_samples < 1)
    throw std::invalid_argument("evaluate_average_rate: num_eval_samples must be >= 1");
  MultiGeometry at_final = geom;
  at_final.antenna_x.assign(antenna_x.begin(), antenna_x.end());
  const SampleSet samples =
      draw_samples(rng, params, at_final, static_cast<int>(num_eval_samples));
  const ChannelMatrix hlos = los_channel_matrix(params, at_final, antenna_x);
  const std::vector<double> rates = per_sample_rates(V, samples, hlos, params.noise_power);
  return estimate_from(rates);
}

}  // namespace pinchsim
