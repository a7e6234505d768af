#include "fedban/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "fedban/fed_decentralized.hpp"
#include "fedban/mixing.hpp"
#include "fedban/streams.hpp"

namespace fedban {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size()) {
    throw ConfigError(key + ": cannot parse '" + value + "' as a real number");
  }
  return x;
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size()) {
    throw ConfigError(key + ": cannot parse '" + value + "' as an integer");
  }
  return x;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  char* end = nullptr;
  const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size() || v.front() == '-') {
    throw ConfigError(key + ": cannot parse '" + value + "' as an unsigned integer");
  }
  return x;
}

bool parse_bool(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": cannot parse '" + value + "' as a boolean");
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(s);
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

int resolve_threads(int threads) {
  if (threads > 0) return threads;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lk(err_mu);
        if (!err) err = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

json epsilon_json(double epsilon) {
  if (std::isinf(epsilon)) return json("off");
  return json(epsilon);
}

}  // namespace

void ExperimentConfig::apply(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (key == "algorithm") {
    if (v == "master_worker") algorithm = Algorithm::master_worker;
    else if (v == "decentralized") algorithm = Algorithm::decentralized;
    else throw ConfigError("algorithm: expected master_worker or decentralized, got '" + v + "'");
  } else if (key == "M") {
    agents = static_cast<int>(parse_int(key, v));
  } else if (key == "K") {
    arms = static_cast<int>(parse_int(key, v));
  } else if (key == "T") {
    horizon = parse_int(key, v);
  } else if (key == "topology") {
    topology = topology_from_string(v);
  } else if (key == "kappa") {
    kappa = parse_double(key, v);
  } else if (key == "graph_file") {
    graph_file = v;
  } else if (key == "arm_kind") {
    if (v == "bernoulli") arm_kind = ArmModel::Kind::bernoulli;
    else if (v == "uniform01") arm_kind = ArmModel::Kind::uniform01;
    else if (v == "gaussian") arm_kind = ArmModel::Kind::gaussian;
    else throw ConfigError("arm_kind: expected bernoulli, uniform01 or gaussian, got '" + v + "'");
  } else if (key == "means") {
    means.clear();
    if (v != "auto") {
      for (const auto& tok : split_csv(v)) means.push_back(parse_double(key, tok));
    }
  } else if (key == "sigma") {
    sigma = parse_double(key, v);
  } else if (key == "epsilon") {
    epsilon = (v == "off" || v == "inf") ? std::numeric_limits<double>::infinity()
                                         : parse_double(key, v);
  } else if (key == "rho") {
    rho = parse_double(key, v);
  } else if (key == "delta_rule") {
    if (v == "default") delta_rule = DeltaRule::by_default;
    else if (v == "t4") delta_rule = DeltaRule::horizon_pow4;
    else if (v == "half_t_rho") delta_rule = DeltaRule::half_horizon_rho;
    else if (v == "explicit") delta_rule = DeltaRule::explicit_value;
    else throw ConfigError("delta_rule: expected default, t4, half_t_rho or explicit, got '" + v + "'");
  } else if (key == "delta") {
    delta_explicit = parse_double(key, v);
  } else if (key == "repeats") {
    repeats = static_cast<int>(parse_int(key, v));
  } else if (key == "master_seed") {
    master_seed = parse_u64(key, v);
  } else if (key == "clamp_lo") {
    clamp.lo = parse_double(key, v);
    clamp_override = true;
  } else if (key == "clamp_hi") {
    clamp.hi = parse_double(key, v);
    clamp_override = true;
  } else if (key == "threads") {
    threads = static_cast<int>(parse_int(key, v));
  } else if (key == "full_trace") {
    full_trace = parse_bool(key, v);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

std::vector<std::string> ExperimentConfig::validate() const {
  std::vector<std::string> v;
  const bool dec = algorithm == Algorithm::decentralized;

  if (agents < 1) v.push_back("M: need at least 1 agent");
  if (arms < 2) v.push_back("K: need at least 2 arms");
  if (horizon <= arms) v.push_back("T: horizon must exceed the number of arms");
  if (repeats < 1) v.push_back("repeats: need at least 1");
  if (threads < 0) v.push_back("threads: must be >= 0");
  if (std::isnan(epsilon) || !(epsilon > 0.0)) {
    v.push_back("epsilon: must be positive (or 'off')");
  }
  if (dec) {
    if (!(rho > 1.0)) v.push_back("rho: must exceed 1 for the decentralized algorithm");
    if (!(kappa > 0.0 && kappa <= 1.0)) v.push_back("kappa: must lie in (0, 1]");
    if (agents > 1) {
      if (topology == Topology::custom && graph_file.empty()) {
        v.push_back("graph_file: required for the custom topology");
      }
      if (topology == Topology::cycle && agents < 3) {
        v.push_back("topology: a cycle needs M >= 3");
      }
    }
  }
  if (delta_rule == DeltaRule::explicit_value &&
      !(delta_explicit > 0.0 && delta_explicit < 1.0)) {
    v.push_back("delta: explicit delta must lie in (0, 1)");
  }
  if (arm_kind == ArmModel::Kind::gaussian && !(sigma > 0.0 && std::isfinite(sigma))) {
    v.push_back("sigma: gaussian arms need a positive stddev");
  }
  if (!means.empty()) {
    if (static_cast<int>(means.size()) != arms) {
      v.push_back("means: expected " + std::to_string(arms) + " values, got " +
                  std::to_string(means.size()));
    }
    for (double m : means) {
      if (!std::isfinite(m)) {
        v.push_back("means: all values must be finite");
        break;
      }
    }
    if (arm_kind != ArmModel::Kind::gaussian) {
      for (double m : means) {
        if (m < 0.0 || m > 1.0) {
          v.push_back("means: bounded arm kinds need means in [0, 1]");
          break;
        }
      }
    }
    std::vector<double> sorted = means;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    if (sorted.size() >= 2 && !(sorted[0] > sorted[1])) {
      v.push_back("means: the best arm must be unique");
    }
  }
  if (clamp_override && (!std::isfinite(clamp.lo) || !std::isfinite(clamp.hi) ||
                         !(clamp.lo < clamp.hi))) {
    v.push_back("clamp: need finite clamp_lo < clamp_hi");
  }
  return v;
}

void ExperimentConfig::validate_or_throw() const {
  const auto v = validate();
  if (v.empty()) return;
  std::string msg = "invalid configuration:";
  for (const auto& s : v) msg += "\n  - " + s;
  throw ConfigError(msg);
}

std::vector<ArmModel> ExperimentConfig::arm_models() const {
  std::vector<double> mus = means;
  if (mus.empty()) {
    mus.resize(static_cast<std::size_t>(arms));
    for (int j = 0; j < arms; ++j) {
      mus[static_cast<std::size_t>(j)] =
          0.9 - 0.8 * static_cast<double>(j) / static_cast<double>(arms - 1);
    }
  }
  std::vector<ArmModel> models;
  models.reserve(mus.size());
  for (double mu : mus) {
    ArmModel a;
    a.kind = arm_kind;
    a.mu = mu;
    a.sigma2 = arm_kind == ArmModel::Kind::gaussian ? sigma * sigma : 0.0;
    models.push_back(a);
  }
  return models;
}

ClampRange ExperimentConfig::resolved_clamp() const {
  return clamp_override ? clamp : default_clamp(arm_models());
}

double ExperimentConfig::resolved_delta() const {
  DeltaRule rule = delta_rule;
  if (rule == DeltaRule::by_default) {
    rule = algorithm == Algorithm::master_worker ? DeltaRule::horizon_pow4
                                                 : DeltaRule::half_horizon_rho;
  }
  switch (rule) {
    case DeltaRule::horizon_pow4:
      return std::pow(static_cast<double>(horizon), -4.0);
    case DeltaRule::half_horizon_rho:
      return 0.5 * std::pow(static_cast<double>(horizon), -rho);
    case DeltaRule::explicit_value:
      return delta_explicit;
    case DeltaRule::by_default: break;
  }
  return delta_explicit;
}

std::string ExperimentConfig::canonical_string() const {
  // Only semantically relevant keys enter the hash; presentation knobs
  // (threads, full_trace) and unused-by-algorithm fields stay out.
  std::ostringstream ss;
  const bool dec = algorithm == Algorithm::decentralized;
  ss << "algorithm=" << (dec ? "decentralized" : "master_worker") << ';';
  ss << "M=" << agents << ';' << "K=" << arms << ';' << "T=" << horizon << ';';
  if (dec && agents > 1) {
    ss << "topology=" << to_string(topology) << ';';
    ss << "kappa=" << fmt_double(kappa) << ';';
    if (topology == Topology::custom) {
      std::ifstream in(graph_file, std::ios::binary);
      if (!in) throw IoError("cannot read graph file '" + graph_file + "'");
      std::ostringstream body;
      body << in.rdbuf();
      char buf[24];
      std::snprintf(buf, sizeof(buf), "%016" PRIx64, fnv1a64(body.str()));
      ss << "graph=" << buf << ';';
    }
  }
  ss << "arm_kind=";
  switch (arm_kind) {
    case ArmModel::Kind::bernoulli: ss << "bernoulli"; break;
    case ArmModel::Kind::uniform01: ss << "uniform01"; break;
    case ArmModel::Kind::gaussian: ss << "gaussian"; break;
  }
  ss << ';' << "means=";
  const auto models = arm_models();
  for (std::size_t j = 0; j < models.size(); ++j) {
    if (j) ss << ',';
    ss << fmt_double(models[j].mu);
  }
  ss << ';';
  if (arm_kind == ArmModel::Kind::gaussian) ss << "sigma=" << fmt_double(sigma) << ';';
  ss << "epsilon=" << (std::isinf(epsilon) ? std::string("off") : fmt_double(epsilon)) << ';';
  if (dec) ss << "rho=" << fmt_double(rho) << ';';
  ss << "delta=" << fmt_double(resolved_delta()) << ';';
  const ClampRange cr = resolved_clamp();
  ss << "clamp=" << fmt_double(cr.lo) << ',' << fmt_double(cr.hi) << ';';
  ss << "repeats=" << repeats << ';' << "master_seed=" << master_seed << ';';
  return ss.str();
}

std::string ExperimentConfig::config_hash() const {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, fnv1a64(canonical_string()));
  return buf;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    try {
      cfg.apply(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

void apply_overrides(ExperimentConfig& cfg, const std::vector<std::string>& assignments) {
  for (const auto& a : assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("override '" + a + "': expected key=value");
    }
    cfg.apply(trim(a.substr(0, eq)), trim(a.substr(eq + 1)));
  }
}

double index_sigma(const std::vector<ArmModel>& arms) {
  double s = 0.0;
  for (const auto& a : arms) s = std::max(s, a.stddev());
  return s;
}

std::vector<std::int64_t> trace_grid(std::int64_t horizon, int points) {
  if (horizon < 1) throw DomainError("trace_grid: horizon must be >= 1");
  if (points < 2) throw DomainError("trace_grid: need at least 2 points");
  std::set<std::int64_t> s{1, std::max<std::int64_t>(1, horizon / 10),
                           std::max<std::int64_t>(1, horizon / 2), horizon};
  const double ln_t = std::log(static_cast<double>(horizon));
  for (int i = 0; i < points; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(points - 1);
    const auto t = static_cast<std::int64_t>(std::llround(std::exp(f * ln_t)));
    s.insert(std::clamp<std::int64_t>(t, 1, horizon));
  }
  return {s.begin(), s.end()};
}

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) throw DomainError("mean: empty sample");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double population_std(const std::vector<double>& xs) {
  const double m = mean_of(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size()));
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {

Aggregate aggregate_runs(const std::vector<RunRecord>& runs) {
  Aggregate agg;
  agg.runs = static_cast<int>(runs.size());
  std::vector<double> finals;
  finals.reserve(runs.size());
  for (const auto& r : runs) finals.push_back(r.final_regret());
  agg.final_mean = mean_of(finals);
  agg.final_std = population_std(finals);

  const std::int64_t horizon = runs.front().t.back();
  agg.anchor_t = {std::max<std::int64_t>(1, horizon / 10),
                  std::max<std::int64_t>(1, horizon / 2), horizon};
  for (const auto t : agg.anchor_t) {
    std::vector<double> vals;
    vals.reserve(runs.size());
    for (const auto& r : runs) {
      const auto it = std::lower_bound(r.t.begin(), r.t.end(), t);
      if (it == r.t.end() || *it != t) {
        throw NumericalFault("aggregate: anchor step missing from trace grid");
      }
      vals.push_back(r.regret[static_cast<std::size_t>(it - r.t.begin())]);
    }
    agg.anchor_mean.push_back(mean_of(vals));
    agg.anchor_std.push_back(population_std(vals));
  }
  return agg;
}

json run_record_json(const RunRecord& r, const Aggregate& agg) {
  json anchors = json::array();
  for (std::size_t a = 0; a < agg.anchor_t.size(); ++a) {
    const auto t = agg.anchor_t[a];
    const auto it = std::lower_bound(r.t.begin(), r.t.end(), t);
    anchors.push_back({{"t", t}, {"regret", r.regret[static_cast<std::size_t>(it - r.t.begin())]}});
  }
  return json{{"record", "run"},
              {"run", r.run},
              {"seed", r.seed},
              {"final_regret", r.final_regret()},
              {"comm_rounds", r.comm_rounds},
              {"arm_switches", r.arm_switches},
              {"clamp_events", r.clamp_events},
              {"anchors", anchors}};
}

json aggregate_json(const ExperimentConfig& cfg, const Aggregate& agg) {
  json anchors = json::array();
  for (std::size_t a = 0; a < agg.anchor_t.size(); ++a) {
    anchors.push_back({{"t", agg.anchor_t[a]},
                       {"mean", agg.anchor_mean[a]},
                       {"std", agg.anchor_std[a]}});
  }
  json j{{"record", "aggregate"},
         {"config", cfg.config_hash()},
         {"algorithm",
          cfg.algorithm == ExperimentConfig::Algorithm::decentralized ? "decentralized"
                                                                      : "master_worker"},
         {"M", cfg.agents},
         {"K", cfg.arms},
         {"T", cfg.horizon},
         {"epsilon", epsilon_json(cfg.epsilon)},
         {"delta", cfg.resolved_delta()},
         {"repeats", agg.runs},
         {"master_seed", cfg.master_seed},
         {"final_regret", {{"mean", agg.final_mean}, {"std", agg.final_std}}},
         {"anchors", anchors}};
  if (cfg.algorithm == ExperimentConfig::Algorithm::decentralized) {
    j["rho"] = cfg.rho;
    if (cfg.agents > 1) {
      j["topology"] = to_string(cfg.topology);
      j["kappa"] = cfg.kappa;
    }
  }
  return j;
}

}  // namespace

ExperimentOutput run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                                const std::function<void(int, int)>& on_run_done) {
  cfg.validate_or_throw();

  const auto models = cfg.arm_models();
  const ClampRange clamp = cfg.resolved_clamp();
  const PrivacyParams privacy{cfg.epsilon, cfg.resolved_delta()};
  const std::vector<std::int64_t> grid = [&] {
    if (!cfg.full_trace) return trace_grid(cfg.horizon);
    std::vector<std::int64_t> g(static_cast<std::size_t>(cfg.horizon));
    for (std::int64_t t = 1; t <= cfg.horizon; ++t) g[static_cast<std::size_t>(t - 1)] = t;
    return g;
  }();

  std::optional<MixingMatrix> mixing;
  if (cfg.algorithm == ExperimentConfig::Algorithm::decentralized) {
    if (cfg.agents == 1) {
      mixing = MixingMatrix::trivial();
    } else {
      const Graph g = cfg.topology == Topology::custom ? load_edge_list(cfg.graph_file)
                                                       : build_graph(cfg.topology, cfg.agents);
      if (g.size() != cfg.agents) {
        throw ConfigError("graph file declares " + std::to_string(g.size()) +
                          " agents but M = " + std::to_string(cfg.agents));
      }
      mixing = MixingMatrix::from_graph(g, cfg.kappa);
    }
  }
  const double sig = index_sigma(models);

  ExperimentOutput out;
  out.config = cfg;
  out.runs.resize(static_cast<std::size_t>(cfg.repeats));

  std::atomic<int> done{0};
  std::mutex cb_mu;
  parallel_for(cfg.repeats, resolve_threads(cfg.threads), [&](int r) {
    const std::uint64_t seed = streams::repeat_seed(cfg.master_seed, r);
    SimResult res;
    if (cfg.algorithm == ExperimentConfig::Algorithm::master_worker) {
      MasterWorkerConfig mc;
      mc.agents = cfg.agents;
      mc.horizon = cfg.horizon;
      mc.arm_models = models;
      mc.privacy = privacy;
      mc.clamp = clamp;
      mc.run_seed = seed;
      res = run_master_worker(mc);
    } else {
      DecentralizedConfig dc;
      dc.horizon = cfg.horizon;
      dc.arm_models = models;
      dc.privacy = privacy;
      dc.clamp = clamp;
      dc.rho = cfg.rho;
      dc.sigma = sig;
      dc.run_seed = seed;
      res = run_decentralized(dc, *mixing);
    }
    RunRecord rec;
    rec.run = r;
    rec.seed = seed;
    rec.t = grid;
    rec.regret.reserve(grid.size());
    for (const auto t : grid) rec.regret.push_back(res.regret[static_cast<std::size_t>(t - 1)]);
    rec.comm_rounds = res.comm_rounds;
    rec.arm_switches = res.arm_switches;
    rec.clamp_events = res.clamp_events;
    out.runs[static_cast<std::size_t>(r)] = std::move(rec);
    if (on_run_done) {
      const std::lock_guard<std::mutex> lk(cb_mu);
      on_run_done(++done, cfg.repeats);
    }
  });

  out.aggregate = aggregate_runs(out.runs);

  if (!out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + out_dir + "'");
    const std::string hash = cfg.config_hash();
    for (const auto& rec : out.runs) {
      char name[32];
      std::snprintf(name, sizeof(name), "trace_r%03d.csv", rec.run);
      write_trace_csv(out_dir + "/" + name, hash, rec);
    }
    std::ofstream js(out_dir + "/summary.jsonl");
    if (!js) throw IoError("cannot write summary in '" + out_dir + "'");
    for (const auto& rec : out.runs) js << run_record_json(rec, out.aggregate).dump() << '\n';
    js << aggregate_json(cfg, out.aggregate).dump() << '\n';
  }
  return out;
}

std::vector<SweepPoint> run_sweep(const ExperimentConfig& base, const std::string& param,
                                  const std::vector<std::string>& values,
                                  const std::string& out_dir,
                                  const std::function<void(int, int)>& on_run_done) {
  if (values.empty()) throw ConfigError("sweep: need at least one value");
  const bool dec = base.algorithm == ExperimentConfig::Algorithm::decentralized;
  if (param == "rho" && !dec) {
    throw ConfigError("sweep: rho only applies to the decentralized algorithm");
  }
  if (param == "topology" && !dec) {
    throw ConfigError("sweep: topology only applies to the decentralized algorithm");
  }
  if (param != "epsilon" && param != "rho" && param != "topology" && param != "M") {
    throw ConfigError("sweep: unsupported parameter '" + param +
                      "' (expected epsilon, rho, topology or M)");
  }

  std::vector<SweepPoint> points;
  points.reserve(values.size());
  for (const auto& v : values) {
    ExperimentConfig cfg = base;
    cfg.apply(param, v);  // same master_seed: common random numbers
    cfg.validate_or_throw();
    const std::string sub = out_dir.empty() ? "" : out_dir + "/" + param + "_" + v;
    points.push_back(SweepPoint{v, run_experiment(cfg, sub, on_run_done)});
  }

  if (!out_dir.empty()) {
    std::ofstream js(out_dir + "/sweep_summary.jsonl");
    if (!js) throw IoError("cannot write sweep summary in '" + out_dir + "'");
    for (const auto& p : points) {
      const auto& agg = p.output.aggregate;
      js << json{{"record", "sweep"},
                 {"param", param},
                 {"value", p.value},
                 {"config", p.output.config.config_hash()},
                 {"runs", agg.runs},
                 {"final_regret", {{"mean", agg.final_mean}, {"std", agg.final_std}}}}
                .dump()
         << '\n';
    }
  }
  return points;
}

void write_trace_csv(const std::string& path, const std::string& config_hash,
                     const RunRecord& rec) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write trace file '" + path + "'");
  out << "# fedban-trace v1\n";
  out << "# config = " << config_hash << "\n";
  out << "# seed = " << rec.seed << "\n";
  out << "# columns: t,regret\n";
  char buf[64];
  for (std::size_t i = 0; i < rec.t.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%" PRId64 ",%.17g\n", rec.t[i], rec.regret[i]);
    out << buf;
  }
  if (!out) throw IoError("short write on trace file '" + path + "'");
}

LoadedTrace load_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace file '" + path + "'");
  LoadedTrace tr;
  std::string line;
  int lineno = 0;
  bool tagged = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      if (t.find("fedban-trace") != std::string::npos) tagged = true;
      const auto eq = t.find('=');
      if (eq != std::string::npos) {
        const std::string key = trim(t.substr(1, eq - 1));
        const std::string val = trim(t.substr(eq + 1));
        if (key == "config") tr.config_hash = val;
        else if (key == "seed") tr.seed = parse_u64("seed", val);
      }
      continue;
    }
    const auto comma = t.find(',');
    if (comma == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 't,regret'");
    }
    tr.t.push_back(parse_int("t", t.substr(0, comma)));
    tr.regret.push_back(parse_double("regret", t.substr(comma + 1)));
  }
  if (!tagged) throw ConfigError(path + ": missing fedban-trace header");
  if (tr.t.empty()) throw ConfigError(path + ": no data rows");
  return tr;
}

std::string summarize_traces(const std::vector<std::string>& paths) {
  if (paths.empty()) throw ConfigError("summarize: no trace files given");
  struct Group {
    std::vector<LoadedTrace> traces;
  };
  std::vector<std::string> order;
  std::map<std::string, Group> groups;
  for (const auto& p : paths) {
    LoadedTrace tr = load_trace_csv(p);
    if (!groups.count(tr.config_hash)) order.push_back(tr.config_hash);
    groups[tr.config_hash].traces.push_back(std::move(tr));
  }

  std::ostringstream out;
  for (const auto& hash : order) {
    const auto& g = groups[hash];
    const std::int64_t horizon = g.traces.front().t.back();
    std::vector<double> finals;
    for (const auto& tr : g.traces) {
      if (tr.t.back() != horizon) {
        throw ConfigError("summarize: traces with config " + hash + " disagree on horizon");
      }
      finals.push_back(tr.regret.back());
    }
    json anchors = json::array();
    for (const std::int64_t t : {std::max<std::int64_t>(1, horizon / 10),
                                 std::max<std::int64_t>(1, horizon / 2), horizon}) {
      std::vector<double> vals;
      for (const auto& tr : g.traces) {
        const auto it = std::lower_bound(tr.t.begin(), tr.t.end(), t);
        if (it == tr.t.end() || *it != t) {
          throw ConfigError("summarize: anchor t=" + std::to_string(t) + " missing in a trace");
        }
        vals.push_back(tr.regret[static_cast<std::size_t>(it - tr.t.begin())]);
      }
      anchors.push_back(
          {{"t", t}, {"mean", mean_of(vals)}, {"std", population_std(vals)}});
    }
    out << json{{"record", "summary"},
                {"config", hash},
                {"runs", g.traces.size()},
                {"T", horizon},
                {"final_regret",
                 {{"mean", mean_of(finals)}, {"std", population_std(finals)}}},
                {"anchors", anchors}}
               .dump()
        << '\n';
  }
  return out.str();
}

}  // namespace fedban
