#pragma once

#include <span>

namespace pinchsim {

// Fixed-order pairwise (tree) summation. Both the serial and the OpenMP code
// paths reduce per-slot results through this, so the outcome is independent of
// thread count and better conditioned than sequential accumulation on long
// Monte Carlo vectors.
double pairwise_sum(std::span<const double> xs);

// Sample mean with its standard error.
struct RateEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long n = 0;
};

RateEstimate estimate_from(std::span<const double> samples);

}  // namespace pinchsim
