#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "fedban/bandit_env.hpp"
#include "fedban/dp.hpp"
#include "fedban/fed_master.hpp"
#include "fedban/graph.hpp"

namespace fedban {

// A fully resolved experiment description. Built from key=value text (file
// and/or command-line overrides); validation collects every violation before
// reporting so a bad config is fixed in one round trip.
struct ExperimentConfig {
  enum class Algorithm { master_worker, decentralized };
  enum class DeltaRule { by_default, horizon_pow4, half_horizon_rho, explicit_value };

  Algorithm algorithm = Algorithm::decentralized;
  int agents = 2;               // M
  int arms = 2;                 // K
  std::int64_t horizon = 1000;  // T
  Topology topology = Topology::cycle;
  double kappa = 0.5;
  std::string graph_file;  // required when topology == custom

  ArmModel::Kind arm_kind = ArmModel::Kind::bernoulli;
  std::vector<double> means;  // empty: evenly spaced on [0.1, 0.9], best first
  double sigma = 0.1;         // gaussian reward stddev

  double epsilon = 1.0;  // +inf encodes "off"
  double rho = 2.0;
  DeltaRule delta_rule = DeltaRule::by_default;
  double delta_explicit = 0.0;

  int repeats = 1;
  std::uint64_t master_seed = 1;
  bool clamp_override = false;
  ClampRange clamp{0.0, 1.0};
  int threads = 0;  // 0: hardware concurrency
  bool full_trace = false;

  // Applies one "key=value" assignment; unknown keys or malformed values
  // throw ConfigError.
  void apply(const std::string& key, const std::string& value);

  // All rule violations in one list; empty means usable.
  std::vector<std::string> validate() const;
  void validate_or_throw() const;

  std::vector<ArmModel> arm_models() const;
  ClampRange resolved_clamp() const;
  double resolved_delta() const;
  std::string canonical_string() const;
  std::string config_hash() const;  // 16 hex digits, FNV-1a over canonical form
};

// Parses a key=value config file ('#' comments, blank lines allowed).
ExperimentConfig load_config(const std::string& path);
void apply_overrides(ExperimentConfig& cfg, const std::vector<std::string>& assignments);

// The known reward standard deviation the decentralized index uses: the
// largest per-arm stddev of the environment.
double index_sigma(const std::vector<ArmModel>& arms);

// Roughly `points` log-spaced timesteps on [1, horizon], always including
// the anchors horizon/10, horizon/2 and horizon.
std::vector<std::int64_t> trace_grid(std::int64_t horizon, int points = 200);

// One simulated repeat, downsampled onto the trace grid.
struct RunRecord {
  int run = 0;
  std::uint64_t seed = 0;
  std::vector<std::int64_t> t;
  std::vector<double> regret;
  std::int64_t comm_rounds = 0;
  std::int64_t arm_switches = 0;
  std::int64_t clamp_events = 0;
  double final_regret() const { return regret.empty() ? 0.0 : regret.back(); }
};

struct Aggregate {
  int runs = 0;
  double final_mean = 0.0;
  double final_std = 0.0;  // population std over repeats
  std::vector<std::int64_t> anchor_t;
  std::vector<double> anchor_mean;
  std::vector<double> anchor_std;
};

struct ExperimentOutput {
  ExperimentConfig config;
  std::vector<RunRecord> runs;
  Aggregate aggregate;
};

// Runs cfg.repeats simulations (parallel over repeats when threads allow).
// When out_dir is nonempty, writes one trace CSV per run plus summary.jsonl.
ExperimentOutput run_experiment(const ExperimentConfig& cfg, const std::string& out_dir = "",
                                const std::function<void(int, int)>& on_run_done = {});

// Parameter sweep with common random numbers: every swept value reuses the
// same master seed, so repeat r sees identical reward streams across values.
struct SweepPoint {
  std::string value;
  ExperimentOutput output;
};
std::vector<SweepPoint> run_sweep(const ExperimentConfig& base, const std::string& param,
                                  const std::vector<std::string>& values,
                                  const std::string& out_dir = "",
                                  const std::function<void(int, int)>& on_run_done = {});

// Trace CSV I/O. Format: three comment lines (format tag, config hash, seed)
// then a column-name comment and "t,regret" rows.
void write_trace_csv(const std::string& path, const std::string& config_hash,
                     const RunRecord& rec);
struct LoadedTrace {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<std::int64_t> t;
  std::vector<double> regret;
};
LoadedTrace load_trace_csv(const std::string& path);

// Groups traces by config hash and emits one JSON summary line per group.
std::string summarize_traces(const std::vector<std::string>& paths);

// Population mean/std helpers (the project convention for aggregation).
double mean_of(const std::vector<double>& xs);
double population_std(const std::vector<double>& xs);

std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace fedban
