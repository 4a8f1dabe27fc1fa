#include "pinchsim/reference.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "pinchsim/rate_loss.hpp"

namespace pinchsim::reference {

namespace {

RateEstimate serial_estimate(const std::vector<double>& xs) {
  RateEstimate est;
  est.n = static_cast<long>(xs.size());
  if (est.n == 0) return est;
  double sum = 0.0;
  for (double x : xs) sum += x;
  est.mean = sum / static_cast<double>(est.n);
  if (est.n < 2) return est;
  double sq = 0.0;
  for (double x : xs) sq += (x - est.mean) * (x - est.mean);
  est.std_error = std::sqrt(sq / static_cast<double>(est.n - 1) / static_cast<double>(est.n));
  return est;
}

}  // namespace

double empirical_sum_rate(const BeamformerSet& V, const SampleSet& samples,
                          const MultiGeometry& geom, const SystemParams& params,
                          std::span<const double> antenna_x) {
  if (V.num_users != geom.num_users || V.num_antennas != geom.num_waveguides ||
      antenna_x.size() != static_cast<std::size_t>(geom.num_waveguides) || samples.size() < 1)
    throw std::invalid_argument("reference::empirical_sum_rate: dimension mismatch");
  MultiGeometry at = geom;
  at.antenna_x.assign(antenna_x.begin(), antenna_x.end());
  double total = 0.0;
  for (const BlockageRealization& gamma : samples.realizations) {
    for (int m = 0; m < geom.num_users; ++m) {
      double signal = 0.0;
      double interference = 0.0;
      for (int i = 0; i < geom.num_users; ++i) {
        std::complex<double> z = 0.0;
        for (int n = 0; n < geom.num_waveguides; ++n)
          if (gamma(m, n)) z += multiuser_los_channel(params, at, m, n) * V.at(n, i);
        (i == m ? signal : interference) += std::norm(z);
      }
      total += std::log2(1.0 + signal / (interference + params.noise_power));
    }
  }
  return total / static_cast<double>(samples.size());
}

RateEstimate average_rate_single_user(const SystemParams& params, PlacementStrategy strategy,
                                      long num_users, std::uint64_t seed, bool ergodic) {
  params.validate();
  std::vector<double> rates;
  rates.reserve(static_cast<std::size_t>(num_users));
  for (long i = 0; i < num_users; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    const double ux = rng.uniform(0.0, params.region_side);
    const double uy = rng.uniform(-params.region_side / 2.0, params.region_side / 2.0);
    const SingleUserInstance inst = SingleUserInstance::make(params, ux, uy);
    const double x = place(inst, strategy).antenna_x;
    rates.push_back(single_user_rate(params, {ux, uy, 0.0}, x, ergodic));
  }
  return serial_estimate(rates);
}

RateEstimate evaluate_average_rate(std::span<const double> antenna_x, const BeamformerSet& V,
                                   const MultiGeometry& geom, const SystemParams& params,
                                   long num_eval_samples, Rng& rng) {
  MultiGeometry at = geom;
  at.antenna_x.assign(antenna_x.begin(), antenna_x.end());
  std::vector<double> rates;
  rates.reserve(static_cast<std::size_t>(num_eval_samples));
  for (long l = 0; l < num_eval_samples; ++l) {
    SampleSet one;
    one.realizations.push_back(sample_blockage(rng, params, at));
    one.generated_at_positions = at.antenna_x;
    rates.push_back(reference::empirical_sum_rate(V, one, at, params, antenna_x));
  }
  return serial_estimate(rates);
}

RateEstimate monte_carlo_rate_loss(const SystemParams& params, long num_users,
                                   std::uint64_t seed) {
  params.validate();
  std::vector<double> diffs;
  diffs.reserve(static_cast<std::size_t>(num_users));
  for (long i = 0; i < num_users; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    const double ux = rng.uniform(0.0, params.region_side);
    const double uy = rng.uniform(-params.region_side / 2.0, params.region_side / 2.0);
    const SingleUserInstance inst = SingleUserInstance::make(params, ux, uy);
    const Point3 user{ux, uy, 0.0};
    diffs.push_back(single_user_rate(params, user, approx_position(inst).antenna_x) -
                    single_user_rate(params, user, position_ignoring_attenuation(inst).antenna_x));
  }
  return serial_estimate(diffs);
}

}  // namespace pinchsim::reference
