#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pinchsim/config.hpp"
#include "pinchsim/model.hpp"
#include "pinchsim/multiuser.hpp"
#include "pinchsim/single_user.hpp"

namespace pinchsim {

enum class ExperimentId {
  fig1_rate_vs_D,    // single-user placement strategies vs region side
  fig2_surface,      // single-user pinching vs fixed over a (beta, D) grid
  fig3_cdf,          // single-user rate CDFs, pinching vs fixed
  fig4_wmmse_vs_zf,  // multiuser: WMMSE vs ZF beamforming inside the SAA loop
  fig5_rate_vs_beta, // multiuser: pinching vs fixed antennas over beta
  fig6_rate_vs_M,    // multiuser: pinching vs fixed antennas over user count
};
const char* to_string(ExperimentId id);
bool parse_experiment_id(std::string_view name, ExperimentId& out);

// Desk-scale defaults throughout (small L / few outer iterations / modest
// trial counts); every field is overridable back to full-scale values.
struct ExperimentConfig {
  ExperimentId id = ExperimentId::fig1_rate_vs_D;
  std::uint64_t master_seed = 0;
  int trials = 50;               // independent trials per multiuser grid point
  long num_users_mc = 10000;     // user draws per single-user grid point
  long num_deployments = 1000;   // fig3 deployments
  long num_eval_samples = 10000; // out-of-sample blockage draws per trial
  int cdf_points = 101;

  std::vector<double> beta_grid;
  std::vector<double> d_grid;
  std::vector<double> pmax_dbm_grid;
  std::vector<double> m_grid;  // fig6 user counts

  int num_users = 4;       // M (fig4/fig5)
  int num_waveguides = 4;  // N
  double x_max = 0.0;      // 0 = region side

  SystemParams params;
  SaaConfig saa;
  PsoConfig pso;

  std::filesystem::path out_dir = "out";
  bool force = false;
  bool dry_run = false;

  static ExperimentConfig make_default(ExperimentId id);
  void validate() const;
  std::vector<std::string> output_files() const;  // filenames this run will write
};

// Line-oriented key=value record of a run: resolved config, per-output-file
// SHA-256 checksums, wall-clock duration.
struct RunManifest {
  std::vector<std::pair<std::string, std::string>> entries;

  void set(const std::string& key, const std::string& value);
  const std::string* find(const std::string& key) const;
  void write(const std::filesystem::path& path) const;
};

RunManifest run_experiment(const ExperimentConfig& config);

// Empirical CDF evaluated at num_points equally spaced thresholds spanning
// [min, max] of the samples (a single point when all samples coincide).
std::vector<std::pair<double, double>> cdf_table(const std::vector<double>& samples,
                                                 int num_points);

std::string sha256_file(const std::filesystem::path& path);  // hex digest

// ---- config resolution (shared by the CLI subcommands) ----

SystemParams params_from_config(const KeyValueConfig& cfg);
SaaConfig saa_from_config(const KeyValueConfig& cfg, const SaaConfig& defaults);
PsoConfig pso_from_config(const KeyValueConfig& cfg, const PsoConfig& defaults);

struct OptimizeSetup {
  SystemParams params;
  int num_users = 4;
  int num_waveguides = 4;
  double x_max = 0.0;                // 0 = region side
  std::vector<Point3> explicit_users;  // empty = sample uniformly from the seed
  SaaConfig saa;
  PsoConfig pso;
  BeamformerMode mode = BeamformerMode::wmmse;
  long num_eval_samples = 10000;
};

OptimizeSetup resolve_optimize_setup(const KeyValueConfig& cfg);
ExperimentConfig resolve_experiment_config(ExperimentId id, const KeyValueConfig& cfg);

// Fully resolved `key = value` lines, echoed by every run and stored in the
// manifest.
std::vector<std::pair<std::string, std::string>> echo_params(const SystemParams& params);
std::vector<std::pair<std::string, std::string>> echo_optimize_setup(const OptimizeSetup& setup);
std::vector<std::pair<std::string, std::string>> echo_experiment_config(const ExperimentConfig& cfg);

}  // namespace pinchsim
