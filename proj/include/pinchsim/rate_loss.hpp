#pragma once

#include <cstdint>

#include "pinchsim/model.hpp"
#include "pinchsim/stats.hpp"

namespace pinchsim {

struct RateLossInputs {
  double alpha = 0.0;             // 1/m
  double beta = 0.0;              // 1/m^2
  double waveguide_height = 0.0;  // d_v, m
  double region_side = 0.0;       // D, m
};

// Rate lost by placing the antenna directly above the user instead of at the
// attenuation-aware position, for one user at squared waveguide distance C:
//   alpha^2 * C / ((1 + beta*C) * ln 2)
double instantaneous_rate_loss(double waveguide_dist_sq, double alpha, double beta);

// Average of the instantaneous loss over y ~ U(-D/2, D/2), closed form:
//   alpha^2/(beta ln2) * [1 - 2/(D sqrt(beta E)) * atan(sqrt(beta) D / (2 sqrt(E)))]
// with E = 1 + beta d_v^2. Throws std::domain_error for beta <= 0 (the beta->0
// limit is sparse_limit_rate_loss).
double expected_rate_loss(const RateLossInputs& in);

// beta -> 0 limit: alpha^2/ln2 * (D^2/12 + d_v^2).
double sparse_limit_rate_loss(double alpha, double waveguide_height, double region_side);

// D -> infinity limit: alpha^2 / (beta ln2). Throws std::domain_error for beta <= 0.
double dense_limit_rate_loss(double alpha, double beta);

// Adaptive-Simpson integration of the instantaneous loss over the user's y
// coordinate. Independent route used to cross-check expected_rate_loss (the
// arctan form is the exact antiderivative).
double quadrature_rate_loss(const RateLossInputs& in, double abs_tol = 1e-13);

// End-to-end Monte Carlo: mean over uniform random users of
// rate(approx placement) - rate(placement above user), both rates evaluated
// with attenuation included (single-user semantics).
RateEstimate monte_carlo_rate_loss(const SystemParams& params, long num_users,
                                   std::uint64_t seed);

}  // namespace pinchsim
