// fedban: federated private bandit simulator.
//
// Subcommands:
//   run        one experiment from a config file (plus key=value overrides)
//   sweep      the same experiment across several values of one parameter
//   summarize  aggregate previously written trace CSVs
//   graph-info topology diagnostics: spectrum and consensus constants
//
// Exit codes: 0 success, 2 bad configuration or arguments, 3 I/O failure,
// 4 internal numerical error.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fedban/errors.hpp"
#include "fedban/experiment.hpp"
#include "fedban/graph.hpp"
#include "fedban/mixing.hpp"

namespace {

using nlohmann::json;

void apply_env_seed(fedban::ExperimentConfig& cfg) {
  const char* env = std::getenv("FEDBAN_SEED");
  if (env == nullptr || *env == '\0') return;
  cfg.apply("master_seed", env);
}

void print_progress(int done, int total) {
  std::fprintf(stderr, "run %d/%d done\n", done, total);
}

json aggregate_to_json(const fedban::ExperimentOutput& out) {
  const auto& agg = out.aggregate;
  json anchors = json::array();
  for (std::size_t a = 0; a < agg.anchor_t.size(); ++a) {
    anchors.push_back({{"t", agg.anchor_t[a]},
                       {"mean", agg.anchor_mean[a]},
                       {"std", agg.anchor_std[a]}});
  }
  return json{{"record", "aggregate"},
              {"config", out.config.config_hash()},
              {"runs", agg.runs},
              {"final_regret", {{"mean", agg.final_mean}, {"std", agg.final_std}}},
              {"anchors", anchors}};
}

std::vector<std::string> expand_trace_inputs(const std::vector<std::string>& inputs) {
  namespace fs = std::filesystem;
  std::vector<std::string> files;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      std::vector<std::string> found;
      for (const auto& e : fs::recursive_directory_iterator(in)) {
        if (e.is_regular_file() && e.path().extension() == ".csv") {
          found.push_back(e.path().string());
        }
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.push_back(in);
    }
  }
  return files;
}

int dispatch(int argc, char** argv) {
  CLI::App app{"federated private multi-armed bandit simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir, param, values_csv;
  std::vector<std::string> overrides, inputs;
  bool quiet = false;

  auto* run = app.add_subcommand("run", "run one experiment");
  run->add_option("--config", config_path, "key=value config file")->required();
  run->add_option("--out", out_dir, "output directory for traces and summary");
  run->add_option("overrides", overrides, "key=value overrides");
  run->add_flag("--quiet", quiet, "suppress progress lines");

  auto* sweep = app.add_subcommand("sweep", "sweep one parameter");
  sweep->add_option("--config", config_path, "key=value config file")->required();
  sweep->add_option("--param", param, "epsilon, rho, topology or M")->required();
  sweep->add_option("--values", values_csv, "comma-separated sweep values")->required();
  sweep->add_option("--out", out_dir, "output directory");
  sweep->add_option("overrides", overrides, "key=value overrides");
  sweep->add_flag("--quiet", quiet, "suppress progress lines");

  auto* summ = app.add_subcommand("summarize", "aggregate trace CSVs");
  summ->add_option("--in", inputs, "trace files or directories")->required();

  std::string topo_name = "cycle", graph_file;
  int m_agents = 0;
  double kappa = 0.5;
  auto* ginfo = app.add_subcommand("graph-info", "mixing-matrix diagnostics");
  ginfo->add_option("--topology", topo_name, "cycle, complete, star, path or custom");
  ginfo->add_option("--M", m_agents, "number of agents");
  ginfo->add_option("--kappa", kappa, "mixing step size in (0, 1]");
  ginfo->add_option("--graph", graph_file, "edge-list file for custom topology");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  const auto progress = quiet ? std::function<void(int, int)>{} : print_progress;

  if (run->parsed()) {
    fedban::ExperimentConfig cfg = fedban::load_config(config_path);
    fedban::apply_overrides(cfg, overrides);
    apply_env_seed(cfg);
    const auto out = fedban::run_experiment(cfg, out_dir, progress);
    std::cout << aggregate_to_json(out).dump() << '\n';
    return 0;
  }

  if (sweep->parsed()) {
    fedban::ExperimentConfig cfg = fedban::load_config(config_path);
    fedban::apply_overrides(cfg, overrides);
    apply_env_seed(cfg);
    std::vector<std::string> values;
    {
      std::string item;
      std::istringstream ss(values_csv);
      while (std::getline(ss, item, ',')) {
        if (!item.empty()) values.push_back(item);
      }
    }
    const auto points = fedban::run_sweep(cfg, param, values, out_dir, progress);
    for (const auto& p : points) {
      const auto& agg = p.output.aggregate;
      std::cout << json{{"record", "sweep"},
                        {"param", param},
                        {"value", p.value},
                        {"config", p.output.config.config_hash()},
                        {"runs", agg.runs},
                        {"final_regret", {{"mean", agg.final_mean}, {"std", agg.final_std}}}}
                       .dump()
                << '\n';
    }
    return 0;
  }

  if (summ->parsed()) {
    std::cout << fedban::summarize_traces(expand_trace_inputs(inputs));
    return 0;
  }

  if (ginfo->parsed()) {
    const fedban::Topology topo = fedban::topology_from_string(topo_name);
    if (topo != fedban::Topology::custom && m_agents < 2) {
      throw fedban::ConfigError("graph-info: --M (>= 2) is required for named topologies");
    }
    fedban::Graph g = topo == fedban::Topology::custom
                          ? fedban::load_edge_list(graph_file)
                          : fedban::build_graph(topo, m_agents);
    if (m_agents != 0 && g.size() != m_agents) {
      throw fedban::ConfigError("graph file declares " + std::to_string(g.size()) +
                                " agents but --M is " + std::to_string(m_agents));
    }
    const auto mixing = fedban::MixingMatrix::from_graph(g, kappa);
    const auto& lam = mixing.eigenvalues();
    json j{{"M", g.size()},
           {"topology", to_string(topo)},
           {"kappa", kappa},
           {"edges", g.edge_count()},
           {"max_degree", g.max_degree()},
           {"eigenvalues", lam},
           {"spectral_gap", 1.0 - std::abs(lam[1])},
           {"c0", mixing.c0()},
           {"c_i", mixing.c_i()}};
    std::cout << j.dump() << '\n';
    return 0;
  }

  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const fedban::IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const fedban::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const fedban::SpectralGapError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const fedban::DomainError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 4;
  }
}
