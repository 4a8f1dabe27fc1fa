#pragma once

#include <complex>
#include <span>
#include <vector>

#include "pinchsim/model.hpp"
#include "pinchsim/stats.hpp"

namespace pinchsim {

// M complex beamforming vectors of length N under a shared power budget.
struct BeamformerSet {
  int num_users = 0;     // M
  int num_antennas = 0;  // N
  std::vector<std::complex<double>> v;  // column-major: column m = beamformer of user m

  std::complex<double>& at(int n, int m) { return v[m * num_antennas + n]; }
  const std::complex<double>& at(int n, int m) const { return v[m * num_antennas + n]; }
  double total_power() const;

  static BeamformerSet zeros(int num_users, int num_antennas);
};

// L blockage draws plus the antenna positions they were drawn at.
struct SampleSet {
  std::vector<BlockageRealization> realizations;
  std::vector<double> generated_at_positions;

  int size() const { return static_cast<int>(realizations.size()); }
};

SampleSet draw_samples(Rng& rng, const SystemParams& params, const MultiGeometry& geom,
                       int num_samples);

struct PsoConfig {
  int swarm_size = 30;   // S
  int max_iters = 50;    // K_max
  double cognitive_c1 = 2.0;
  double social_c2 = 2.0;
  double inertia_start = 0.9;
  double inertia_slope = 0.5;  // w(k) = start - slope * k / K_max
  double velocity_init_fraction = 0.2;

  void validate() const;
};

struct SaaConfig {
  int num_samples = 100;     // L
  int max_outer_iters = 20;  // T_max
  double rel_tol = 1e-3;
  int wmmse_max_iters = 200;
  double wmmse_tol = 1e-6;
  // Regenerate the blockage samples at the start of every outer iteration
  // (the defining step of the dynamic scheme). Disable only to study the
  // fixed-sample behavior.
  bool resample = true;

  void validate() const;
};

// Receiver coefficients u, MSE weights w = 1/e and MSEs e in (0,1] for every
// (user, sample) pair, at the given beamformers. Entry (m, l) is m*L + l.
struct WmmseState {
  int num_users = 0;
  int num_samples = 0;
  std::vector<std::complex<double>> u;
  std::vector<double> w;
  std::vector<double> e;
};

// (1/L) sum_l sum_m log2(1 + SINR_m^(l)) with h^(l)_{m,n} = gamma^(l)_{m,n} *
// hLoS_{m,n}(antenna_x). Inner products use the plain transpose h_m^T v_i (no
// conjugation of the channel).
double empirical_sum_rate(const BeamformerSet& V, const SampleSet& samples,
                          const MultiGeometry& geom, const SystemParams& params,
                          std::span<const double> antenna_x);

// Same objective for externally supplied per-sample effective channels.
double sum_rate_for_channels(const BeamformerSet& V, std::span<const ChannelMatrix> channels,
                             double noise_power);

WmmseState compute_wmmse_state(const BeamformerSet& V, const SampleSet& samples,
                               const MultiGeometry& geom, const SystemParams& params,
                               std::span<const double> antenna_x);

struct WmmseResult {
  BeamformerSet beamformers;
  // Empirical sum rate before the first update and after each iteration.
  std::vector<double> rate_history;
  int iterations = 0;
  double mu = 0.0;  // final power multiplier
};

// Alternating closed-form (u, e, w) updates and the Lagrangian beamformer
// solve v_m = (A + mu I)^{-1} b_m, with mu found by bisection so the power
// budget is met with complementary slackness. Stops when the empirical sum
// rate improves by less than inner_tol (relative) or after inner_max_iters.
WmmseResult wmmse_beamformers(const BeamformerSet& init, const SampleSet& samples,
                              const MultiGeometry& geom, const SystemParams& params,
                              std::span<const double> antenna_x, double inner_tol,
                              int inner_max_iters);

struct ZfResult {
  BeamformerSet beamformers;
  bool regularized = false;  // sample-averaged channel was rank-deficient
};

// Columns of the Moore-Penrose right pseudo-inverse of the sample-averaged
// channel (so Hbar * V is diagonal), equal per-user power P/M.
ZfResult zf_beamformers(const SampleSet& samples, const MultiGeometry& geom,
                        const SystemParams& params, std::span<const double> antenna_x);

struct PsoResult {
  double position = 0.0;
  double fitness = 0.0;
};

// Particle-swarm search over antenna n's position with all other antennas,
// the beamformers and the blockage samples held fixed (only the deterministic
// LoS channel of column n varies with the candidate). The incumbent position
// is injected as particle 0, so the returned fitness never falls below it.
PsoResult pso_optimize_antenna(int n, const BeamformerSet& V, const SampleSet& samples,
                               const MultiGeometry& geom, const SystemParams& params,
                               const PsoConfig& config, Rng& rng);

enum class BeamformerMode { wmmse, zf };
const char* to_string(BeamformerMode mode);
bool parse_beamformer_mode(const char* name, BeamformerMode& out);

struct SaaResult {
  std::vector<double> antenna_x;
  BeamformerSet beamformers;
  std::vector<double> trajectory;  // empirical objective per outer iteration
  int iterations = 0;
};

// Outer loop: draw samples at the current positions, update beamformers
// (WMMSE initialized from ZF, or plain ZF in zf mode), update each antenna
// sequentially by PSO, stop when the relative objective change stays below
// rel_tol for two consecutive iterations or at max_outer_iters.
SaaResult dynamic_saa(const MultiGeometry& geom, const SystemParams& params,
                      const SaaConfig& saa, const PsoConfig& pso, Rng& rng,
                      BeamformerMode mode);

// Same loop with the position-update step skipped and every antenna pinned at
// x_max/2.
SaaResult fixed_antenna_baseline(const MultiGeometry& geom, const SystemParams& params,
                                 const SaaConfig& saa, Rng& rng, BeamformerMode mode);

// Out-of-sample score: empirical sum rate over fresh blockage draws at the
// final positions, with its standard error over samples.
RateEstimate evaluate_average_rate(std::span<const double> antenna_x, const BeamformerSet& V,
                                   const MultiGeometry& geom, const SystemParams& params,
                                   long num_eval_samples, Rng& rng);

}  // namespace pinchsim
