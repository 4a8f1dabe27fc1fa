#include "pinchsim/experiments.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "pinchsim/units.hpp"

namespace pinchsim {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string fmt(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%llu", static_cast<unsigned long long>(v));
  return buf;
}

std::string fmt(long v) { return std::to_string(v); }
std::string fmt(int v) { return std::to_string(v); }

std::string join(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += fmt(xs[i]);
  }
  return out;
}

// Rows are buffered and flushed once, in grid/trial order, by the single
// writer thread.
class CsvFile {
 public:
  CsvFile(std::string name, std::string header) : name_(std::move(name)) {
    body_ = std::move(header);
    body_ += '\n';
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) body_ += ',';
      body_ += cells[i];
    }
    body_ += '\n';
  }
  const std::string& name() const { return name_; }
  void write_to(const fs::path& dir) const {
    std::ofstream out(dir / name_, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / name_).string());
    out << body_;
  }

 private:
  std::string name_;
  std::string body_;
};

std::vector<Point3> draw_users(Rng& rng, int count, double region_side) {
  std::vector<Point3> users(static_cast<std::size_t>(count));
  for (Point3& u : users) {
    u.x = rng.uniform(0.0, region_side);
    u.y = rng.uniform(-region_side / 2.0, region_side / 2.0);
    u.z = 0.0;
  }
  return users;
}

// Same per-user stream protocol as average_rate_single_user, with all
// requested strategies evaluated on the identical user draw so gaps are
// paired.
struct PairedRates {
  std::vector<std::vector<double>> per_strategy;  // [strategy][user]
};

PairedRates paired_single_user_rates(const SystemParams& params,
                                     std::span<const PlacementStrategy> strategies,
                                     long num_users, std::uint64_t seed) {
  PairedRates out;
  out.per_strategy.assign(strategies.size(),
                          std::vector<double>(static_cast<std::size_t>(num_users)));
#pragma omp parallel for schedule(static)
  for (long i = 0; i < num_users; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    const double ux = rng.uniform(0.0, params.region_side);
    const double uy = rng.uniform(-params.region_side / 2.0, params.region_side / 2.0);
    const SingleUserInstance inst = SingleUserInstance::make(params, ux, uy);
    const Point3 user{ux, uy, 0.0};
    for (std::size_t s = 0; s < strategies.size(); ++s) {
      const double x = place(inst, strategies[s]).antenna_x;
      out.per_strategy[s][static_cast<std::size_t>(i)] = single_user_rate(params, user, x);
    }
  }
  return out;
}

std::vector<double> paired_diff(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

// ---- single-user figures ----

void run_fig1(const ExperimentConfig& cfg, std::vector<CsvFile>& files) {
  CsvFile rates("fig1_rates.csv", "d_side,beta,strategy,mean_rate_bps_hz,stderr,users,seed");
  CsvFile gap("fig1_gap.csv", "d_side,beta,gap_mean_bps_hz,gap_stderr,users,seed");
  const PlacementStrategy strategies[] = {PlacementStrategy::cardano,
                                          PlacementStrategy::approximate,
                                          PlacementStrategy::ignore_attenuation};
  std::uint64_t grid_index = 0;
  for (double beta : cfg.beta_grid) {
    for (double d : cfg.d_grid) {
      SystemParams p = cfg.params;
      p.blockage_beta = beta;
      p.region_side = d;
      const std::uint64_t base = derive_seed(cfg.master_seed, grid_index);
      const PairedRates r = paired_single_user_rates(p, strategies, cfg.num_users_mc, base);
      for (std::size_t s = 0; s < 3; ++s) {
        const RateEstimate est = estimate_from(r.per_strategy[s]);
        rates.row({fmt(d), fmt(beta), to_string(strategies[s]), fmt(est.mean),
                   fmt(est.std_error), fmt(cfg.num_users_mc), fmt(base)});
      }
      const RateEstimate g = estimate_from(paired_diff(r.per_strategy[0], r.per_strategy[2]));
      gap.row({fmt(d), fmt(beta), fmt(g.mean), fmt(g.std_error), fmt(cfg.num_users_mc),
               fmt(base)});
      ++grid_index;
    }
  }
  files.push_back(std::move(rates));
  files.push_back(std::move(gap));
}

void run_fig2(const ExperimentConfig& cfg, std::vector<CsvFile>& files) {
  CsvFile rates("fig2_rates.csv", "beta,d_side,scheme,mean_rate_bps_hz,stderr,users,seed");
  CsvFile gap("fig2_gap.csv",
              "beta,d_side,gap_mean_bps_hz,gap_stderr,rel_gap,users,seed");
  const PlacementStrategy strategies[] = {PlacementStrategy::ignore_attenuation,
                                          PlacementStrategy::fixed_center};
  const char* scheme_names[] = {"pinching", "fixed"};
  std::uint64_t grid_index = 0;
  for (double beta : cfg.beta_grid) {
    for (double d : cfg.d_grid) {
      SystemParams p = cfg.params;
      p.blockage_beta = beta;
      p.region_side = d;
      const std::uint64_t base = derive_seed(cfg.master_seed, grid_index);
      const PairedRates r = paired_single_user_rates(p, strategies, cfg.num_users_mc, base);
      RateEstimate est[2];
      for (std::size_t s = 0; s < 2; ++s) {
        est[s] = estimate_from(r.per_strategy[s]);
        rates.row({fmt(beta), fmt(d), scheme_names[s], fmt(est[s].mean), fmt(est[s].std_error),
                   fmt(cfg.num_users_mc), fmt(base)});
      }
      const RateEstimate g = estimate_from(paired_diff(r.per_strategy[0], r.per_strategy[1]));
      const double rel = est[0].mean != 0.0 ? g.mean / est[0].mean : 0.0;
      gap.row({fmt(beta), fmt(d), fmt(g.mean), fmt(g.std_error), fmt(rel),
               fmt(cfg.num_users_mc), fmt(base)});
      ++grid_index;
    }
  }
  files.push_back(std::move(rates));
  files.push_back(std::move(gap));
}

void run_fig3(const ExperimentConfig& cfg, std::vector<CsvFile>& files) {
  const PlacementStrategy strategies[] = {PlacementStrategy::ignore_attenuation,
                                          PlacementStrategy::fixed_center};
  const char* scheme_names[] = {"pinching", "fixed"};
  const double d = cfg.d_grid.front();
  std::uint64_t grid_index = 0;
  for (double beta : cfg.beta_grid) {
    SystemParams p = cfg.params;
    p.blockage_beta = beta;
    p.region_side = d;
    const std::uint64_t base = derive_seed(cfg.master_seed, grid_index);
    const PairedRates r = paired_single_user_rates(p, strategies, cfg.num_deployments, base);
    for (std::size_t s = 0; s < 2; ++s) {
      CsvFile cdf("fig3_cdf_" + std::string(scheme_names[s]) + "_beta" + fmt(beta) + ".csv",
                  "rate_bps_hz,cum_prob");
      for (const auto& [rate, prob] : cdf_table(r.per_strategy[s], cfg.cdf_points))
        cdf.row({fmt(rate), fmt(prob)});
      files.push_back(std::move(cdf));
    }
    ++grid_index;
  }
}

// ---- multiuser figures ----

struct TrialOutcome {
  double first = 0.0;   // wmmse / pinching
  double second = 0.0;  // zf / fixed
};

// One grid point of a two-scheme multiuser comparison, `trials` independent
// trials in parallel. Matched streams: both schemes start from the same
// derived seed, and the out-of-sample evaluation reuses one seed as well.
template <typename RunPair>
std::vector<TrialOutcome> run_trials(const ExperimentConfig& cfg, std::uint64_t grid_index,
                                     const RunPair& run_pair) {
  std::vector<TrialOutcome> out(static_cast<std::size_t>(cfg.trials));
#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < cfg.trials; ++t) {
    const std::uint64_t seed = derive_seed(cfg.master_seed, grid_index, static_cast<std::uint64_t>(t));
    out[static_cast<std::size_t>(t)] = run_pair(seed);
  }
  return out;
}

double eval_final(const SaaResult& r, const MultiGeometry& geom, const SystemParams& p,
                  long num_eval_samples, std::uint64_t eval_seed) {
  Rng rng(eval_seed);
  return evaluate_average_rate(r.antenna_x, r.beamformers, geom, p, num_eval_samples, rng).mean;
}

void run_fig4(const ExperimentConfig& cfg, std::vector<CsvFile>& files) {
  CsvFile agg("fig4.csv", "pmax_dbm,mode,mean_rate_bps_hz,stderr,trials,seed");
  CsvFile per("fig4_trials.csv", "pmax_dbm,mode,trial,seed,rate_bps_hz");
  const double beta = cfg.beta_grid.front();
  const double d = cfg.d_grid.front();
  std::uint64_t grid_index = 0;
  for (double pmax_dbm : cfg.pmax_dbm_grid) {
    SystemParams p = cfg.params;
    p.blockage_beta = beta;
    p.region_side = d;
    p.tx_power = units::dbm_to_watts(pmax_dbm);
    const double x_max = cfg.x_max > 0 ? cfg.x_max : p.region_side;
    const auto outcomes = run_trials(cfg, grid_index, [&](std::uint64_t seed) {
      Rng user_rng(derive_seed(seed, 0));
      const MultiGeometry geom = MultiGeometry::uniform(
          cfg.num_waveguides, draw_users(user_rng, cfg.num_users, p.region_side), p.region_side,
          x_max);
      TrialOutcome o;
      {
        Rng run_rng(derive_seed(seed, 1));
        const SaaResult r = dynamic_saa(geom, p, cfg.saa, cfg.pso, run_rng, BeamformerMode::wmmse);
        o.first = eval_final(r, geom, p, cfg.num_eval_samples, derive_seed(seed, 2));
      }
      {
        Rng run_rng(derive_seed(seed, 1));
        const SaaResult r = dynamic_saa(geom, p, cfg.saa, cfg.pso, run_rng, BeamformerMode::zf);
        o.second = eval_final(r, geom, p, cfg.num_eval_samples, derive_seed(seed, 2));
      }
      return o;
    });
    std::vector<double> wmmse_rates(outcomes.size()), zf_rates(outcomes.size());
    for (std::size_t t = 0; t < outcomes.size(); ++t) {
      wmmse_rates[t] = outcomes[t].first;
      zf_rates[t] = outcomes[t].second;
      const std::uint64_t seed = derive_seed(cfg.master_seed, grid_index, t);
      per.row({fmt(pmax_dbm), "wmmse", fmt(static_cast<long>(t)), fmt(seed), fmt(outcomes[t].first)});
      per.row({fmt(pmax_dbm), "zf", fmt(static_cast<long>(t)), fmt(seed), fmt(outcomes[t].second)});
    }
    const RateEstimate w = estimate_from(wmmse_rates);
    const RateEstimate z = estimate_from(zf_rates);
    const std::uint64_t base = derive_seed(cfg.master_seed, grid_index);
    agg.row({fmt(pmax_dbm), "wmmse", fmt(w.mean), fmt(w.std_error), fmt(cfg.trials), fmt(base)});
    agg.row({fmt(pmax_dbm), "zf", fmt(z.mean), fmt(z.std_error), fmt(cfg.trials), fmt(base)});
    ++grid_index;
  }
  files.push_back(std::move(agg));
  files.push_back(std::move(per));
}

// Shared by fig5 (beta x pmax sweep) and fig6 (M x D sweep): dynamic pinching
// vs the fixed-antenna baseline, WMMSE beamforming in both.
TrialOutcome pinching_vs_fixed_trial(const ExperimentConfig& cfg, const SystemParams& p,
                                     int num_users, double x_max, std::uint64_t seed) {
  Rng user_rng(derive_seed(seed, 0));
  const MultiGeometry geom = MultiGeometry::uniform(
      cfg.num_waveguides, draw_users(user_rng, num_users, p.region_side), p.region_side, x_max);
  TrialOutcome o;
  {
    Rng run_rng(derive_seed(seed, 1));
    const SaaResult r = dynamic_saa(geom, p, cfg.saa, cfg.pso, run_rng, BeamformerMode::wmmse);
    o.first = eval_final(r, geom, p, cfg.num_eval_samples, derive_seed(seed, 2));
  }
  {
    Rng run_rng(derive_seed(seed, 1));
    const SaaResult r = fixed_antenna_baseline(geom, p, cfg.saa, run_rng, BeamformerMode::wmmse);
    o.second = eval_final(r, geom, p, cfg.num_eval_samples, derive_seed(seed, 2));
  }
  return o;
}

void run_fig5(const ExperimentConfig& cfg, std::vector<CsvFile>& files) {
  CsvFile agg("fig5.csv", "beta,pmax_dbm,scheme,mean_rate_bps_hz,stderr,trials,seed");
  CsvFile per("fig5_trials.csv", "beta,pmax_dbm,scheme,trial,seed,rate_bps_hz");
  const double d = cfg.d_grid.front();
  std::uint64_t grid_index = 0;
  for (double beta : cfg.beta_grid) {
    for (double pmax_dbm : cfg.pmax_dbm_grid) {
      SystemParams p = cfg.params;
      p.blockage_beta = beta;
      p.region_side = d;
      p.tx_power = units::dbm_to_watts(pmax_dbm);
      const double x_max = cfg.x_max > 0 ? cfg.x_max : p.region_side;
      const auto outcomes = run_trials(cfg, grid_index, [&](std::uint64_t seed) {
        return pinching_vs_fixed_trial(cfg, p, cfg.num_users, x_max, seed);
      });
      std::vector<double> pin(outcomes.size()), fix(outcomes.size());
      for (std::size_t t = 0; t < outcomes.size(); ++t) {
        pin[t] = outcomes[t].first;
        fix[t] = outcomes[t].second;
        const std::uint64_t seed = derive_seed(cfg.master_seed, grid_index, t);
        per.row({fmt(beta), fmt(pmax_dbm), "pinching", fmt(static_cast<long>(t)), fmt(seed),
                 fmt(outcomes[t].first)});
        per.row({fmt(beta), fmt(pmax_dbm), "fixed", fmt(static_cast<long>(t)), fmt(seed),
                 fmt(outcomes[t].second)});
      }
      const RateEstimate pe = estimate_from(pin);
      const RateEstimate fe = estimate_from(fix);
      const std::uint64_t base = derive_seed(cfg.master_seed, grid_index);
      agg.row({fmt(beta), fmt(pmax_dbm), "pinching", fmt(pe.mean), fmt(pe.std_error),
               fmt(cfg.trials), fmt(base)});
      agg.row({fmt(beta), fmt(pmax_dbm), "fixed", fmt(fe.mean), fmt(fe.std_error),
               fmt(cfg.trials), fmt(base)});
      ++grid_index;
    }
  }
  files.push_back(std::move(agg));
  files.push_back(std::move(per));
}

void run_fig6(const ExperimentConfig& cfg, std::vector<CsvFile>& files) {
  CsvFile agg("fig6.csv", "m_users,d_side,scheme,mean_rate_bps_hz,stderr,trials,seed");
  CsvFile per("fig6_trials.csv", "m_users,d_side,scheme,trial,seed,rate_bps_hz");
  const double beta = cfg.beta_grid.front();
  std::uint64_t grid_index = 0;
  for (double m_users : cfg.m_grid) {
    for (double d : cfg.d_grid) {
      SystemParams p = cfg.params;
      p.blockage_beta = beta;
      p.region_side = d;
      const double x_max = cfg.x_max > 0 ? cfg.x_max : p.region_side;
      const int m = static_cast<int>(m_users);
      const auto outcomes = run_trials(cfg, grid_index, [&](std::uint64_t seed) {
        return pinching_vs_fixed_trial(cfg, p, m, x_max, seed);
      });
      std::vector<double> pin(outcomes.size()), fix(outcomes.size());
      for (std::size_t t = 0; t < outcomes.size(); ++t) {
        pin[t] = outcomes[t].first;
        fix[t] = outcomes[t].second;
        const std::uint64_t seed = derive_seed(cfg.master_seed, grid_index, t);
        per.row({fmt(m), fmt(d), "pinching", fmt(static_cast<long>(t)), fmt(seed),
                 fmt(outcomes[t].first)});
        per.row({fmt(m), fmt(d), "fixed", fmt(static_cast<long>(t)), fmt(seed),
                 fmt(outcomes[t].second)});
      }
      const RateEstimate pe = estimate_from(pin);
      const RateEstimate fe = estimate_from(fix);
      const std::uint64_t base = derive_seed(cfg.master_seed, grid_index);
      agg.row({fmt(m), fmt(d), "pinching", fmt(pe.mean), fmt(pe.std_error), fmt(cfg.trials),
               fmt(base)});
      agg.row({fmt(m), fmt(d), "fixed", fmt(fe.mean), fmt(fe.std_error), fmt(cfg.trials),
               fmt(base)});
      ++grid_index;
    }
  }
  files.push_back(std::move(agg));
  files.push_back(std::move(per));
}

}  // namespace

const char* to_string(ExperimentId id) {
  switch (id) {
    case ExperimentId::fig1_rate_vs_D: return "fig1";
    case ExperimentId::fig2_surface: return "fig2";
    case ExperimentId::fig3_cdf: return "fig3";
    case ExperimentId::fig4_wmmse_vs_zf: return "fig4";
    case ExperimentId::fig5_rate_vs_beta: return "fig5";
    case ExperimentId::fig6_rate_vs_M: return "fig6";
  }
  return "?";
}

bool parse_experiment_id(std::string_view name, ExperimentId& out) {
  if (name == "fig1") out = ExperimentId::fig1_rate_vs_D;
  else if (name == "fig2") out = ExperimentId::fig2_surface;
  else if (name == "fig3") out = ExperimentId::fig3_cdf;
  else if (name == "fig4") out = ExperimentId::fig4_wmmse_vs_zf;
  else if (name == "fig5") out = ExperimentId::fig5_rate_vs_beta;
  else if (name == "fig6") out = ExperimentId::fig6_rate_vs_M;
  else return false;
  return true;
}

ExperimentConfig ExperimentConfig::make_default(ExperimentId id) {
  ExperimentConfig cfg;
  cfg.id = id;
  // Desk-scale loop sizes; full-scale values are plain config overrides.
  cfg.saa.num_samples = 20;
  cfg.saa.max_outer_iters = 5;
  cfg.pso.swarm_size = 20;
  cfg.pso.max_iters = 30;
  switch (id) {
    case ExperimentId::fig1_rate_vs_D:
      cfg.beta_grid = {1e-5, 0.1};
      cfg.d_grid = {10, 20, 30, 40, 50};
      break;
    case ExperimentId::fig2_surface:
      cfg.beta_grid = {0.01, 0.048, 0.086, 0.124, 0.162, 0.2};
      cfg.d_grid = {10, 20, 30, 40, 50};
      break;
    case ExperimentId::fig3_cdf:
      cfg.beta_grid = {0.05, 0.1};
      cfg.d_grid = {20};
      break;
    case ExperimentId::fig4_wmmse_vs_zf:
      cfg.beta_grid = {0.01};
      cfg.d_grid = {50};
      cfg.pmax_dbm_grid = {30, 35, 40};
      break;
    case ExperimentId::fig5_rate_vs_beta:
      cfg.beta_grid = {0.01, 0.0575, 0.105, 0.1525, 0.2};
      cfg.d_grid = {50};
      cfg.pmax_dbm_grid = {30, 40};
      break;
    case ExperimentId::fig6_rate_vs_M:
      cfg.beta_grid = {0.01};
      cfg.d_grid = {20, 50};
      cfg.m_grid = {2, 4, 6, 8, 10, 12};
      cfg.num_waveguides = 12;
      cfg.trials = 10;
      break;
  }
  return cfg;
}

void ExperimentConfig::validate() const {
  params.validate();
  saa.validate();
  pso.validate();
  if (trials < 1) throw std::invalid_argument("ExperimentConfig: trials must be >= 1");
  if (num_users_mc < 1 || num_deployments < 1 || num_eval_samples < 1)
    throw std::invalid_argument("ExperimentConfig: sample counts must be >= 1");
  if (cdf_points < 1) throw std::invalid_argument("ExperimentConfig: cdf_points must be >= 1");
  if (beta_grid.empty()) throw std::invalid_argument("ExperimentConfig: beta_grid is empty");
  const bool needs_d = true;
  if (needs_d && d_grid.empty()) throw std::invalid_argument("ExperimentConfig: d_grid is empty");
  if ((id == ExperimentId::fig4_wmmse_vs_zf || id == ExperimentId::fig5_rate_vs_beta) &&
      pmax_dbm_grid.empty())
    throw std::invalid_argument("ExperimentConfig: pmax_dbm_grid is empty");
  if (id == ExperimentId::fig6_rate_vs_M) {
    if (m_grid.empty()) throw std::invalid_argument("ExperimentConfig: m_grid is empty");
    for (double m : m_grid)
      if (m < 1 || m != std::floor(m) || m > num_waveguides)
        throw std::invalid_argument("ExperimentConfig: m_grid entries must be integers in [1, N]");
  }
  if (num_users < 1 || num_users > num_waveguides)
    throw std::invalid_argument("ExperimentConfig: need 1 <= num_users <= num_waveguides");
  if (x_max < 0) throw std::invalid_argument("ExperimentConfig: x_max must be >= 0");
}

std::vector<std::string> ExperimentConfig::output_files() const {
  std::vector<std::string> names;
  switch (id) {
    case ExperimentId::fig1_rate_vs_D:
      names = {"fig1_rates.csv", "fig1_gap.csv"};
      break;
    case ExperimentId::fig2_surface:
      names = {"fig2_rates.csv", "fig2_gap.csv"};
      break;
    case ExperimentId::fig3_cdf:
      for (double beta : beta_grid) {
        names.push_back("fig3_cdf_pinching_beta" + fmt(beta) + ".csv");
        names.push_back("fig3_cdf_fixed_beta" + fmt(beta) + ".csv");
      }
      break;
    case ExperimentId::fig4_wmmse_vs_zf:
      names = {"fig4.csv", "fig4_trials.csv"};
      break;
    case ExperimentId::fig5_rate_vs_beta:
      names = {"fig5.csv", "fig5_trials.csv"};
      break;
    case ExperimentId::fig6_rate_vs_M:
      names = {"fig6.csv", "fig6_trials.csv"};
      break;
  }
  names.push_back("manifest.txt");
  return names;
}

void RunManifest::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries) {
    if (k == key) {
      v = value;
      return;
    }
  }
  entries.emplace_back(key, value);
}

const std::string* RunManifest::find(const std::string& key) const {
  for (const auto& [k, v] : entries)
    if (k == key) return &v;
  return nullptr;
}

void RunManifest::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write manifest: " + path.string());
  for (const auto& [k, v] : entries) out << k << '=' << v << '\n';
}

RunManifest run_experiment(const ExperimentConfig& config) {
  config.validate();
  RunManifest manifest;
  manifest.set("experiment", to_string(config.id));
  manifest.set("code_version", kVersion);
  manifest.set("master_seed", fmt(config.master_seed));
  manifest.set("scale_note", "desk-scale defaults; trial counts are artifact choices");
  for (const auto& [k, v] : echo_experiment_config(config)) manifest.set("cfg." + k, v);

  if (config.dry_run) return manifest;

  for (const std::string& name : config.output_files()) {
    if (name != "manifest.txt" && fs::exists(config.out_dir / name) && !config.force)
      throw ConfigError("output file exists: " + (config.out_dir / name).string() +
                        " (pass --force to overwrite)");
  }
  fs::create_directories(config.out_dir);
  manifest.write(config.out_dir / "manifest.txt");  // config snapshot before the run

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<CsvFile> files;
  switch (config.id) {
    case ExperimentId::fig1_rate_vs_D: run_fig1(config, files); break;
    case ExperimentId::fig2_surface: run_fig2(config, files); break;
    case ExperimentId::fig3_cdf: run_fig3(config, files); break;
    case ExperimentId::fig4_wmmse_vs_zf: run_fig4(config, files); break;
    case ExperimentId::fig5_rate_vs_beta: run_fig5(config, files); break;
    case ExperimentId::fig6_rate_vs_M: run_fig6(config, files); break;
  }
  for (const CsvFile& f : files) f.write_to(config.out_dir);
  const auto t1 = std::chrono::steady_clock::now();

  manifest.set("duration_ms",
               fmt(std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count()));
  for (const CsvFile& f : files)
    manifest.set("file." + f.name() + ".sha256", sha256_file(config.out_dir / f.name()));
  manifest.write(config.out_dir / "manifest.txt");
  return manifest;
}

std::vector<std::pair<double, double>> cdf_table(const std::vector<double>& samples,
                                                 int num_points) {
  if (samples.empty()) throw std::invalid_argument("cdf_table: empty sample set");
  if (num_points < 1) throw std::invalid_argument("cdf_table: num_points must be >= 1");
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  const double lo = sorted.front();
  const double hi = sorted.back();
  const double n = static_cast<double>(sorted.size());
  if (lo == hi || num_points == 1) return {{hi, 1.0}};
  std::vector<std::pair<double, double>> table;
  table.reserve(static_cast<std::size_t>(num_points));
  for (int k = 0; k < num_points; ++k) {
    const double t = lo + (hi - lo) * static_cast<double>(k) / (num_points - 1);
    const auto count = std::upper_bound(sorted.begin(), sorted.end(), t) - sorted.begin();
    table.emplace_back(t, static_cast<double>(count) / n);
  }
  return table;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for checksum: " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr) throw std::runtime_error("EVP_MD_CTX_new failed");
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 15];
  while (in) {
    in.read(buf, sizeof buf);
    const std::streamsize got = in.gcount();
    if (got <= 0) break;
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(got));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

// ---- config resolution ----

namespace {

constexpr std::string_view kParamKeys[] = {
    "carrier_freq_ghz", "n_eff",        "d_v_m",         "alpha_np_per_m", "alpha_db_per_m",
    "beta_per_m2",      "region_d_m",   "tx_power_dbm",  "noise_power_dbm"};

constexpr std::string_view kSaaKeys[] = {"saa_samples", "saa_max_outer_iters", "saa_rel_tol",
                                         "wmmse_max_iters", "wmmse_tol", "resample"};

constexpr std::string_view kPsoKeys[] = {"pso_swarm", "pso_iters"};

constexpr std::string_view kGeomKeys[] = {"num_users", "num_waveguides", "x_max_m", "users",
                                          "mode", "eval_samples"};

constexpr std::string_view kExperimentKeys[] = {"trials",    "users_mc", "deployments",
                                                "cdf_points", "beta_grid", "d_grid",
                                                "pmax_dbm_grid", "m_grid"};

std::vector<std::string_view> concat_keys(std::initializer_list<std::span<const std::string_view>> sets) {
  std::vector<std::string_view> all;
  for (const auto& s : sets) all.insert(all.end(), s.begin(), s.end());
  return all;
}

std::vector<Point3> parse_users(const std::string& text) {
  // "x:y; x:y; ..."
  std::vector<Point3> users;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      throw ConfigError("config key 'users': expected 'x:y;x:y;...', got '" + text + "'");
    try {
      users.push_back({std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)), 0.0});
    } catch (const std::exception&) {
      throw ConfigError("config key 'users': bad coordinate in '" + item + "'");
    }
  }
  if (users.empty()) throw ConfigError("config key 'users': empty list");
  return users;
}

}  // namespace

SystemParams params_from_config(const KeyValueConfig& cfg) {
  SystemParams p;
  p.carrier_freq_hz = cfg.get_double("carrier_freq_ghz", 28.0) * 1e9;
  p.refractive_index = cfg.get_double("n_eff", 1.4);
  p.waveguide_height = cfg.get_double("d_v_m", 10.0);
  if (cfg.has("alpha_np_per_m") && cfg.has("alpha_db_per_m"))
    throw ConfigError("set only one of alpha_np_per_m / alpha_db_per_m");
  if (cfg.has("alpha_db_per_m"))
    p.atten_alpha = units::db_per_m_to_alpha(cfg.get_double("alpha_db_per_m", 0.0));
  else
    p.atten_alpha = cfg.get_double("alpha_np_per_m", 0.0092);
  p.blockage_beta = cfg.get_double("beta_per_m2", 0.1);
  p.region_side = cfg.get_double("region_d_m", 50.0);
  p.tx_power = units::dbm_to_watts(cfg.get_double("tx_power_dbm", 40.0));
  p.noise_power = units::dbm_to_watts(cfg.get_double("noise_power_dbm", -110.0));
  p.validate();
  return p;
}

SaaConfig saa_from_config(const KeyValueConfig& cfg, const SaaConfig& defaults) {
  SaaConfig s = defaults;
  s.num_samples = static_cast<int>(cfg.get_long("saa_samples", s.num_samples));
  s.max_outer_iters = static_cast<int>(cfg.get_long("saa_max_outer_iters", s.max_outer_iters));
  s.rel_tol = cfg.get_double("saa_rel_tol", s.rel_tol);
  s.wmmse_max_iters = static_cast<int>(cfg.get_long("wmmse_max_iters", s.wmmse_max_iters));
  s.wmmse_tol = cfg.get_double("wmmse_tol", s.wmmse_tol);
  s.resample = cfg.get_bool("resample", s.resample);
  s.validate();
  return s;
}

PsoConfig pso_from_config(const KeyValueConfig& cfg, const PsoConfig& defaults) {
  PsoConfig p = defaults;
  p.swarm_size = static_cast<int>(cfg.get_long("pso_swarm", p.swarm_size));
  p.max_iters = static_cast<int>(cfg.get_long("pso_iters", p.max_iters));
  p.validate();
  return p;
}

OptimizeSetup resolve_optimize_setup(const KeyValueConfig& cfg) {
  const auto allowed = concat_keys({kParamKeys, kSaaKeys, kPsoKeys, kGeomKeys});
  cfg.require_known_keys(allowed);
  OptimizeSetup s;
  s.params = params_from_config(cfg);
  s.num_waveguides = static_cast<int>(cfg.get_long("num_waveguides", 4));
  s.num_users = static_cast<int>(cfg.get_long("num_users", 4));
  s.x_max = cfg.get_double("x_max_m", 0.0);
  if (const auto users = cfg.get("users")) {
    s.explicit_users = parse_users(*users);
    s.num_users = static_cast<int>(s.explicit_users.size());
  }
  SaaConfig saa_defaults;  // full-scale defaults for direct optimization runs
  s.saa = saa_from_config(cfg, saa_defaults);
  PsoConfig pso_defaults;
  s.pso = pso_from_config(cfg, pso_defaults);
  const std::string mode = cfg.get_string("mode", "wmmse");
  if (!parse_beamformer_mode(mode.c_str(), s.mode))
    throw ConfigError("config key 'mode': expected wmmse or zf, got '" + mode + "'");
  s.num_eval_samples = cfg.get_long("eval_samples", 10000);
  if (s.num_eval_samples < 1) throw ConfigError("config key 'eval_samples': must be >= 1");
  if (s.num_users < 1 || s.num_users > s.num_waveguides)
    throw ConfigError("need 1 <= num_users <= num_waveguides");
  if (s.x_max < 0) throw ConfigError("config key 'x_max_m': must be >= 0");
  return s;
}

ExperimentConfig resolve_experiment_config(ExperimentId id, const KeyValueConfig& cfg) {
  const auto allowed = concat_keys({kParamKeys, kSaaKeys, kPsoKeys, kGeomKeys, kExperimentKeys});
  cfg.require_known_keys(allowed);
  ExperimentConfig c = ExperimentConfig::make_default(id);
  c.params = params_from_config(cfg);
  c.trials = static_cast<int>(cfg.get_long("trials", c.trials));
  c.num_users_mc = cfg.get_long("users_mc", c.num_users_mc);
  c.num_deployments = cfg.get_long("deployments", c.num_deployments);
  c.num_eval_samples = cfg.get_long("eval_samples", c.num_eval_samples);
  c.cdf_points = static_cast<int>(cfg.get_long("cdf_points", c.cdf_points));
  c.beta_grid = cfg.get_double_list("beta_grid", c.beta_grid);
  c.d_grid = cfg.get_double_list("d_grid", c.d_grid);
  c.pmax_dbm_grid = cfg.get_double_list("pmax_dbm_grid", c.pmax_dbm_grid);
  c.m_grid = cfg.get_double_list("m_grid", c.m_grid);
  c.num_users = static_cast<int>(cfg.get_long("num_users", c.num_users));
  c.num_waveguides = static_cast<int>(cfg.get_long("num_waveguides", c.num_waveguides));
  c.x_max = cfg.get_double("x_max_m", c.x_max);
  c.saa = saa_from_config(cfg, c.saa);
  c.pso = pso_from_config(cfg, c.pso);
  c.validate();
  return c;
}

std::vector<std::pair<std::string, std::string>> echo_params(const SystemParams& params) {
  return {
      {"carrier_freq_ghz", fmt(params.carrier_freq_hz / 1e9)},
      {"n_eff", fmt(params.refractive_index)},
      {"d_v_m", fmt(params.waveguide_height)},
      {"alpha_np_per_m", fmt(params.atten_alpha)},
      {"alpha_db_per_m", fmt(units::alpha_to_db_per_m(params.atten_alpha))},
      {"beta_per_m2", fmt(params.blockage_beta)},
      {"region_d_m", fmt(params.region_side)},
      {"tx_power_dbm", fmt(units::watts_to_dbm(params.tx_power))},
      {"noise_power_dbm", fmt(units::watts_to_dbm(params.noise_power))},
  };
}

std::vector<std::pair<std::string, std::string>> echo_optimize_setup(const OptimizeSetup& setup) {
  auto out = echo_params(setup.params);
  out.emplace_back("num_users", fmt(setup.num_users));
  out.emplace_back("num_waveguides", fmt(setup.num_waveguides));
  out.emplace_back("x_max_m", fmt(setup.x_max > 0 ? setup.x_max : setup.params.region_side));
  if (!setup.explicit_users.empty()) {
    std::string users;
    for (std::size_t i = 0; i < setup.explicit_users.size(); ++i) {
      if (i) users += ';';
      users += fmt(setup.explicit_users[i].x) + ":" + fmt(setup.explicit_users[i].y);
    }
    out.emplace_back("users", users);
  }
  out.emplace_back("mode", to_string(setup.mode));
  out.emplace_back("saa_samples", fmt(setup.saa.num_samples));
  out.emplace_back("saa_max_outer_iters", fmt(setup.saa.max_outer_iters));
  out.emplace_back("saa_rel_tol", fmt(setup.saa.rel_tol));
  out.emplace_back("wmmse_max_iters", fmt(setup.saa.wmmse_max_iters));
  out.emplace_back("wmmse_tol", fmt(setup.saa.wmmse_tol));
  out.emplace_back("resample", setup.saa.resample ? "true" : "false");
  out.emplace_back("pso_swarm", fmt(setup.pso.swarm_size));
  out.emplace_back("pso_iters", fmt(setup.pso.max_iters));
  out.emplace_back("eval_samples", fmt(setup.num_eval_samples));
  return out;
}

std::vector<std::pair<std::string, std::string>> echo_experiment_config(
    const ExperimentConfig& cfg) {
  auto out = echo_params(cfg.params);
  out.emplace_back("trials", fmt(cfg.trials));
  out.emplace_back("users_mc", fmt(cfg.num_users_mc));
  out.emplace_back("deployments", fmt(cfg.num_deployments));
  out.emplace_back("eval_samples", fmt(cfg.num_eval_samples));
  out.emplace_back("cdf_points", fmt(cfg.cdf_points));
  out.emplace_back("beta_grid", join(cfg.beta_grid));
  out.emplace_back("d_grid", join(cfg.d_grid));
  if (!cfg.pmax_dbm_grid.empty()) out.emplace_back("pmax_dbm_grid", join(cfg.pmax_dbm_grid));
  if (!cfg.m_grid.empty()) out.emplace_back("m_grid", join(cfg.m_grid));
  out.emplace_back("num_users", fmt(cfg.num_users));
  out.emplace_back("num_waveguides", fmt(cfg.num_waveguides));
  out.emplace_back("x_max_m", fmt(cfg.x_max > 0 ? cfg.x_max : cfg.params.region_side));
  out.emplace_back("saa_samples", fmt(cfg.saa.num_samples));
  out.emplace_back("saa_max_outer_iters", fmt(cfg.saa.max_outer_iters));
  out.emplace_back("saa_rel_tol", fmt(cfg.saa.rel_tol));
  out.emplace_back("wmmse_max_iters", fmt(cfg.saa.wmmse_max_iters));
  out.emplace_back("wmmse_tol", fmt(cfg.saa.wmmse_tol));
  out.emplace_back("resample", cfg.saa.resample ? "true" : "false");
  out.emplace_back("pso_swarm", fmt(cfg.pso.swarm_size));
  out.emplace_back("pso_iters", fmt(cfg.pso.max_iters));
  return out;
}

}  // namespace pinchsim
