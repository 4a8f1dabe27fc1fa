#pragma once

#include <cstdint>

#include "pinchsim/model.hpp"
#include "pinchsim/stats.hpp"

namespace pinchsim {

// One-user placement problem along a single waveguide at y = 0.
// waveguide_dist_sq is C = y_bar^2 + d_v^2, the squared distance from the user
// to the waveguide line.
struct SingleUserInstance {
  double user_x = 0.0;
  double user_y = 0.0;
  double waveguide_dist_sq = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double x_max = 0.0;

  // x_max <= 0 means "use params.region_side".
  static SingleUserInstance make(const SystemParams& params, double user_x, double user_y,
                                 double x_max = 0.0);
  void validate() const;
};

enum class PlacementMethod {
  cardano,
  approximate,
  ignore_attenuation,
  oracle,
  bisection,  // numeric fallback when the closed form does not apply
  fixed_center,
};
const char* to_string(PlacementMethod method);

struct PlacementResult {
  double antenna_x = 0.0;  // clipped to [0, x_max]
  double offset = 0.0;     // delta = user_x - antenna_x before clipping
  double objective = 0.0;  // g at antenna_x
  PlacementMethod method = PlacementMethod::cardano;
};

// g(x) = beta*(d^2 + C) + ln(d^2 + C) + 2*alpha*x with d = user_x - x.
// The mean SNR at placement x is rho * eta * e^{-g(x)}.
double objective_g(const SingleUserInstance& inst, double antenna_x);
double objective_g_deriv(const SingleUserInstance& inst, double antenna_x);
double objective_g_curv(const SingleUserInstance& inst, double antenna_x);

// Sufficient condition beta * d_v^2 >= 1 for strict convexity of g.
bool convexity_holds(const SingleUserInstance& inst);

// Closed-form minimizer of g via the depressed cubic (Cardano). Requires
// convexity_holds; throws std::domain_error otherwise. A negative discriminant
// (possible only from rounding inside the convex regime) falls back to
// bisection on g' and is flagged in the result method.
PlacementResult optimal_position_cardano(const SingleUserInstance& inst);

// Small-offset approximation x = user_x - alpha*C/(1 + beta*C).
PlacementResult approx_position(const SingleUserInstance& inst);

// x = user_x (attenuation ignored during placement).
PlacementResult position_ignoring_attenuation(const SingleUserInstance& inst);

// Exhaustive grid minimization of g over [0, x_max] followed by golden-section
// refinement (to 1e-6 m) inside the best grid cell.
PlacementResult oracle_position(const SingleUserInstance& inst, double grid_step = 1e-4);

enum class PlacementStrategy { cardano, approximate, ignore_attenuation, fixed_center, oracle };
const char* to_string(PlacementStrategy strategy);
bool parse_placement_strategy(const char* name, PlacementStrategy& out);

// Strategy dispatcher. For strategy cardano on a non-convex instance it
// degrades to a guarded bisection on g' (with a feed-point boundary check)
// instead of throwing, so sparse-beta sweeps stay computable.
PlacementResult place(const SingleUserInstance& inst, PlacementStrategy strategy);

// Rate for one user at one placement: log2(1 + rho * E|h|^2), attenuation
// always included in the realized gain. `ergodic` switches to the alternative
// metric E_gamma[log2(1+SNR)] = p_LoS * log2(1 + rho |h_LoS|^2).
double single_user_rate(const SystemParams& params, const Point3& user, double antenna_x,
                        bool ergodic = false);

// Mean over num_users uniformly drawn users (x ~ U(0,D), y ~ U(-D/2,D/2)) of
// single_user_rate at the strategy's placement.
RateEstimate average_rate_single_user(const SystemParams& params, PlacementStrategy strategy,
                                      long num_users, std::uint64_t seed, bool ergodic = false);

}  // namespace pinchsim
