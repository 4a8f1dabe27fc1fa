#pragma once

// Serial reference implementations of the OpenMP kernels: plain sequential
// loops built directly on the per-pair channel operations, with
// straightforward accumulation. Kept for correctness testing and for the
// kernel benchmark; not used by the production paths.

#include <cstdint>

#include "pinchsim/multiuser.hpp"
#include "pinchsim/single_user.hpp"

namespace pinchsim::reference {

double empirical_sum_rate(const BeamformerSet& V, const SampleSet& samples,
                          const MultiGeometry& geom, const SystemParams& params,
                          std::span<const double> antenna_x);

RateEstimate average_rate_single_user(const SystemParams& params, PlacementStrategy strategy,
                                      long num_users, std::uint64_t seed, bool ergodic = false);

RateEstimate evaluate_average_rate(std::span<const double> antenna_x, const BeamformerSet& V,
                                   const MultiGeometry& geom, const SystemParams& params,
                                   long num_eval_samples, Rng& rng);

RateEstimate monte_carlo_rate_loss(const SystemParams& params, long num_users,
                                   std::uint64_t seed);

}  // namespace pinchsim::reference
