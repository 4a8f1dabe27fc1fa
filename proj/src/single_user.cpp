#include "pinchsim/single_user.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace pinchsim {

namespace {

double clip(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

PlacementResult finish(const SingleUserInstance& inst, double antenna_x, double offset,
                       PlacementMethod method) {
  return {antenna_x, offset, objective_g(inst, antenna_x), method};
}

// Golden-section minimization of g on [a, b] down to interval width tol.
double golden_min(const SingleUserInstance& inst, double a, double b, double tol) {
  constexpr double kInvPhi = 0.6180339887498949;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = objective_g(inst, c);
  double fd = objective_g(inst, d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = objective_g(inst, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = objective_g(inst, d);
    }
  }
  return 0.5 * (a + b);
}

// Root of g' on [0, min(user_x, x_max)] by bisection, with the boundary cases
// handled explicitly (g' at the user's x equals 2*alpha >= 0; users close to
// the feed can make g increasing over the whole interval, in which case the
// feed point itself is the minimizer).
PlacementResult bisect_stationary(const SingleUserInstance& inst) {
  double lo = 0.0;
  double hi = std::max(0.0, std::min(inst.user_x, inst.x_max));
  double x;
  if (hi <= lo) {
    x = lo;
  } else if (objective_g_deriv(inst, lo) >= 0.0) {
    x = lo;
  } else if (objective_g_deriv(inst, hi) <= 0.0) {
    x = hi;
  } else {
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
      const double mid = 0.5 * (lo + hi);
      (objective_g_deriv(inst, mid) < 0.0 ? lo : hi) = mid;
    }
    x = 0.5 * (lo + hi);
  }
  // Outside the convexity regime the crossing found above may be local; the
  // feed point is the only other candidate below the user's x.
  if (objective_g(inst, 0.0) < objective_g(inst, x)) x = 0.0;
  return finish(inst, x, inst.user_x - x, PlacementMethod::bisection);
}

}  // namespace

SingleUserInstance SingleUserInstance::make(const SystemParams& params, double user_x,
                                            double user_y, double x_max) {
  SingleUserInstance inst;
  inst.user_x = user_x;
  inst.user_y = user_y;
  inst.waveguide_dist_sq =
      user_y * user_y + params.waveguide_height * params.waveguide_height;
  inst.alpha = params.atten_alpha;
  inst.beta = params.blockage_beta;
  inst.x_max = x_max > 0.0 ? x_max : params.region_side;
  inst.validate();
  return inst;
}

void SingleUserInstance::validate() const {
  if (!(std::isfinite(user_x) && std::isfinite(user_y) && std::isfinite(waveguide_dist_sq) &&
        std::isfinite(alpha) && std::isfinite(beta) && std::isfinite(x_max)))
    throw std::invalid_argument("SingleUserInstance: non-finite field");
  if (!(waveguide_dist_sq > user_y * user_y))
    throw std::invalid_argument("SingleUserInstance: waveguide_dist_sq must exceed user_y^2");
  if (alpha < 0 || beta < 0) throw std::invalid_argument("SingleUserInstance: negative coefficient");
  if (!(x_max > 0)) throw std::invalid_argument("SingleUserInstance: x_max must be > 0");
}

const char* to_string(PlacementMethod method) {
  switch (method) {
    case PlacementMethod::cardano: return "cardano";
    case PlacementMethod::approximate: return "approximate";
    case PlacementMethod::ignore_attenuation: return "ignore_attenuation";
    case PlacementMethod::oracle: return "oracle";
    case PlacementMethod::bisection: return "bisection";
    case PlacementMethod::fixed_center: return "fixed_center";
  }
  return "?";
}

const char* to_string(PlacementStrategy strategy) {
  switch (strategy) {
    case PlacementStrategy::cardano: return "cardano";
    case PlacementStrategy::approximate: return "approximate";
    case PlacementStrategy::ignore_attenuation: return "ignore_attenuation";
    case PlacementStrategy::fixed_center: return "fixed_center";
    case PlacementStrategy::oracle: return "oracle";
  }
  return "?";
}

bool parse_placement_strategy(const char* name, PlacementStrategy& out) {
  const std::string s(name);
  if (s == "cardano") out = PlacementStrategy::cardano;
  else if (s == "approximate") out = PlacementStrategy::approximate;
  else if (s == "ignore_attenuation") out = PlacementStrategy::ignore_attenuation;
  else if (s == "fixed_center") out = PlacementStrategy::fixed_center;
  else if (s == "oracle") out = PlacementStrategy::oracle;
  else return false;
  return true;
}

double objective_g(const SingleUserInstance& inst, double antenna_x) {
  const double d = inst.user_x - antenna_x;
  const double r2 = d * d + inst.waveguide_dist_sq;
  return inst.beta * r2 + std::log(r2) + 2.0 * inst.alpha * antenna_x;
}

double objective_g_deriv(const SingleUserInstance& inst, double antenna_x) {
  const double d = inst.user_x - antenna_x;
  const double r2 = d * d + inst.waveguide_dist_sq;
  return -2.0 * inst.beta * d - 2.0 * d / r2 + 2.0 * inst.alpha;
}

double objective_g_curv(const SingleUserInstance& inst, double antenna_x) {
  const double d = inst.user_x - antenna_x;
  const double r2 = d * d + inst.waveguide_dist_sq;
  return 2.0 * inst.beta + 2.0 / r2 - 4.0 * d * d / (r2 * r2);
}

bool convexity_holds(const SingleUserInstance& inst) {
  const double height_sq = inst.waveguide_dist_sq - inst.user_y * inst.user_y;  // d_v^2
  return inst.beta * height_sq >= 1.0;
}

PlacementResult optimal_position_cardano(const SingleUserInstance& inst) {
  inst.validate();
  if (!convexity_holds(inst))
    throw std::domain_error("optimal_position_cardano: requires beta * d_v^2 >= 1");
  const double a = inst.alpha;
  const double b = inst.beta;
  const double C = inst.waveguide_dist_sq;
  // Depressed cubic y^3 + p y + q = 0 for y = delta - a/(3b), from the
  // stationarity cubic b d^3 - a d^2 + (bC+1) d - aC = 0.
  const double p = C + 1.0 / b - a * a / (3.0 * b * b);
  const double q = -2.0 * a * a * a / (27.0 * b * b * b) + a / (3.0 * b * b) -
                   2.0 * a * C / (3.0 * b);
  const double disc = 0.25 * q * q + p * p * p / 27.0;
  if (disc < 0.0) return bisect_stationary(inst);
  const double u = std::sqrt(disc);
  const double ca = std::cbrt(-0.5 * q + u);  // real, sign-preserving roots
  const double cb = std::cbrt(-0.5 * q - u);
  const double delta = ca + cb + a / (3.0 * b);
  const double x = clip(inst.user_x - delta, 0.0, inst.x_max);
  return finish(inst, x, delta, PlacementMethod::cardano);
}

PlacementResult approx_position(const SingleUserInstance& inst) {
  inst.validate();
  const double C = inst.waveguide_dist_sq;
  const double delta = inst.alpha * C / (1.0 + inst.beta * C);
  const double x = clip(inst.user_x - delta, 0.0, inst.x_max);
  return finish(inst, x, delta, PlacementMethod::approximate);
}

PlacementResult position_ignoring_attenuation(const SingleUserInstance& inst) {
  inst.validate();
  const double x = clip(inst.user_x, 0.0, inst.x_max);
  return finish(inst, x, 0.0, PlacementMethod::ignore_attenuation);
}

PlacementResult oracle_position(const SingleUserInstance& inst, double grid_step) {
  inst.validate();
  if (!(grid_step > 0)) throw std::invalid_argument("oracle_position: grid_step must be > 0");
  const double hi = inst.x_max;
  const long cells = std::lround(std::ceil(hi / grid_step));
  double best = objective_g(inst, 0.0);
  long best_i = 0;
  for (long i = 1; i <= cells; ++i) {
    const double x = std::min(i * grid_step, hi);
    const double v = objective_g(inst, x);
    if (v < best) {
      best = v;
      best_i = i;
    }
  }
  const double a = std::max(0.0, (best_i - 1) * grid_step);
  const double b = std::min(hi, (best_i + 1) * grid_step);
  const double x = golden_min(inst, a, b, 1e-6);
  return finish(inst, x, inst.user_x - x, PlacementMethod::oracle);
}

PlacementResult place(const SingleUserInstance& inst, PlacementStrategy strategy) {
  switch (strategy) {
    case PlacementStrategy::cardano:
      return convexity_holds(inst) ? optimal_position_cardano(inst) : bisect_stationary(inst);
    case PlacementStrategy::approximate:
      return approx_position(inst);
    case PlacementStrategy::ignore_attenuation:
      return position_ignoring_attenuation(inst);
    case PlacementStrategy::fixed_center: {
      const double x = inst.x_max / 2.0;
      return finish(inst, x, inst.user_x - x, PlacementMethod::fixed_center);
    }
    case PlacementStrategy::oracle:
      return oracle_position(inst);
  }
  throw std::invalid_argument("place: unknown strategy");
}

double single_user_rate(const SystemParams& params, const Point3& user, double antenna_x,
                        bool ergodic) {
  if (!ergodic)
    return std::log2(1.0 + params.snr_scale() * expected_channel_gain(params, user, antenna_x));
  const Point3 antenna{antenna_x, 0.0, params.waveguide_height};
  const double p = los_probability(params, antenna, user);
  const double gain = std::norm(los_channel_single(params, user, antenna_x, true));
  return p * std::log2(1.0 + params.snr_scale() * gain);
}

RateEstimate average_rate_single_user(const SystemParams& params, PlacementStrategy strategy,
                                      long num_users, std::uint64_t seed, bool ergodic) {
  params.validate();
  if (num_users < 1) throw std::invalid_argument("average_rate_single_user: num_users must be >= 1");
  std::vector<double> rates(static_cast<std::size_t>(num_users));
#pragma omp parallel for schedule(static)
  for (long i = 0; i < num_users; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    const double ux = rng.uniform(0.0, params.region_side);
    const double uy = rng.uniform(-params.region_side / 2.0, params.region_side / 2.0);
    const SingleUserInstance inst = SingleUserInstance::make(params, ux, uy);
    const double x = place(inst, strategy).antenna_x;
    rates[static_cast<std::size_t>(i)] = single_user_rate(params, {ux, uy, 0.0}, x, ergodic);
  }
  return estimate_from(rates);
}

}  // namespace pinchsim
