#include "pinchsim/rate_loss.hpp"

#include <omp.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "pinchsim/single_user.hpp"

namespace pinchsim {

namespace {

constexpr double kLn2 = std::numbers::ln2;

void check_common(double alpha, double waveguide_height, double region_side) {
  if (!(std::isfinite(alpha) && alpha >= 0))
    throw std::invalid_argument("rate loss: alpha must be >= 0");
  if (!(std::isfinite(waveguide_height) && waveguide_height > 0))
    throw std::invalid_argument("rate loss: waveguide_height must be > 0");
  if (!(std::isfinite(region_side) && region_side >= 0))
    throw std::invalid_argument("rate loss: region_side must be >= 0");
}

template <typename F>
double adaptive_step(const F& f, double a, double b, double fa, double fm, double fb,
                     double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <typename F>
double adaptive_simpson(const F& f, double a, double b, double tol) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_step(f, a, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace

double instantaneous_rate_loss(double waveguide_dist_sq, double alpha, double beta) {
  if (!(std::isfinite(waveguide_dist_sq) && waveguide_dist_sq > 0))
    throw std::invalid_argument("instantaneous_rate_loss: waveguide_dist_sq must be > 0");
  if (!(std::isfinite(alpha) && alpha >= 0) || !(std::isfinite(beta) && beta >= 0))
    throw std::invalid_argument("instantaneous_rate_loss: coefficients must be >= 0");
  return alpha * alpha * waveguide_dist_sq / ((1.0 + beta * waveguide_dist_sq) * kLn2);
}

double expected_rate_loss(const RateLossInputs& in) {
  check_common(in.alpha, in.waveguide_height, in.region_side);
  if (!(in.region_side > 0))
    throw std::invalid_argument("expected_rate_loss: region_side must be > 0");
  if (!(in.beta > 0))
    throw std::domain_error(
        "expected_rate_loss: beta must be > 0 (the beta -> 0 limit is sparse_limit_rate_loss)");
  const double dv2 = in.waveguide_height * in.waveguide_height;
  const double e = 1.0 + in.beta * dv2;
  const double root_be = std::sqrt(in.beta * e);
  const double arg = std::sqrt(in.beta) * in.region_side / (2.0 * std::sqrt(e));
  const double bracket = 1.0 - 2.0 / (in.region_side * root_be) * std::atan(arg);
  return in.alpha * in.alpha / (in.beta * kLn2) * bracket;
}

double sparse_limit_rate_loss(double alpha, double waveguide_height, double region_side) {
  check_common(alpha, waveguide_height, region_side);
  return alpha * alpha / kLn2 *
         (region_side * region_side / 12.0 + waveguide_height * waveguide_height);
}

double dense_limit_rate_loss(double alpha, double beta) {
  if (!(std::isfinite(alpha) && alpha >= 0))
    throw std::invalid_argument("dense_limit_rate_loss: alpha must be >= 0");
  if (!(std::isfinite(beta) && beta > 0))
    throw std::domain_error("dense_limit_rate_loss: beta must be > 0");
  return alpha * alpha / (beta * kLn2);
}

double quadrature_rate_loss(const RateLossInputs& in, double abs_tol) {
  check_common(in.alpha, in.waveguide_height, in.region_side);
  if (!(in.region_side > 0))
    throw std::invalid_argument("quadrature_rate_loss: region_side must be > 0");
  if (!(abs_tol > 0)) throw std::invalid_argument("quadrature_rate_loss: abs_tol must be > 0");
  const double dv2 = in.waveguide_height * in.waveguide_height;
  const auto integrand = [&](double y) {
    const double c = y * y + dv2;
    return in.alpha * in.alpha * c / ((1.0 + in.beta * c) * kLn2);
  };
  // Integrand is even in y: mean over [-D/2, D/2] = (2/D) * integral over [0, D/2].
  const double half = in.region_side / 2.0;
  const double integral = adaptive_simpson(integrand, 0.0, half, abs_tol * half);
  return integral / half;
}

RateEstimate monte_carlo_rate_loss(const SystemParams& params, long num_users,
                                   std::uint64_t seed) {
  params.validate();
  if (num_users < 1) throw std::invalid_argument("monte_carlo_rate_loss: num_users must be >= 1");
  std::vector<double> diffs(static_cast<std::size_t>(num_users));
#pragma omp parallel for schedule(static)
  for (long i = 0; i < num_users; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    const double ux = rng.uniform(0.0, params.region_side);
    const double uy = rng.uniform(-params.region_side / 2.0, params.region_side / 2.0);
    const SingleUserInstance inst = SingleUserInstance::make(params, ux, uy);
    const Point3 user{ux, uy, 0.0};
    const double with = single_user_rate(params, user, approx_position(inst).antenna_x);
    const double without =
        single_user_rate(params, user, position_ignoring_attenuation(inst).antenna_x);
    diffs[static_cast<std::size_t>(i)] = with - without;
  }
  return estimate_from(diffs);
}

}  // namespace pinchsim
