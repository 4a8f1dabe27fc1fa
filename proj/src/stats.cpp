#include "pinchsim/stats.hpp"

#include <cmath>
#include <vector>

namespace pinchsim {

double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

RateEstimate estimate_from(std::span<const double> samples) {
  RateEstimate est;
  est.n = static_cast<long>(samples.size());
  if (est.n == 0) return est;
  est.mean = pairwise_sum(samples) / static_cast<double>(est.n);
  if (est.n < 2) return est;
  std::vector<double> sq(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double d = samples[i] - est.mean;
    sq[i] = d * d;
  }
  const double var = pairwise_sum(sq) / static_cast<double>(est.n - 1);
  est.std_error = std::sqrt(var / static_cast<double>(est.n));
  return est;
}

}  // namespace pinchsim
