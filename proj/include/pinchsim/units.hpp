#pragma once

#include <cmath>

namespace pinchsim::units {

// 20/ln(10): dB of power loss per neper of amplitude attenuation
// (e^{-alpha x} in amplitude is e^{-2 alpha x} in power).
inline constexpr double kDbPerNeper = 8.685889638065035;

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

inline double db_per_m_to_alpha(double db_per_m) { return db_per_m / kDbPerNeper; }
inline double alpha_to_db_per_m(double alpha) { return alpha * kDbPerNeper; }

}  // namespace pinchsim::units
