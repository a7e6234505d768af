// End-to-end acceptance gate. Each criterion prints one of
//   [criterion N] PASS
//   [criterion N] FAIL
// via an RAII banner, so the verdict survives any log noise around it. All
// assertions inside a criterion use REQUIRE: the first violation unwinds the
// test case and the banner reports FAIL. Tolerances are pinned next to the
// checks they guard.

#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "fedban/bounds.hpp"
#include "fedban/experiment.hpp"
#include "fedban/fed_decentralized.hpp"
#include "fedban/fed_master.hpp"
#include "fedban/linalg.hpp"
#include "fedban/mixing.hpp"
#include "fedban/streams.hpp"
#include "reference_ucb.hpp"

using namespace fedban;
namespace fs = std::filesystem;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct CriterionBanner {
  int number;
  explicit CriterionBanner(int n) : number(n) {}
  ~CriterionBanner() {
    const bool failed = std::uncaught_exceptions() > 0;
    std::printf("[criterion %d] %s\n", number, failed ? "FAIL" : "PASS");
    std::fflush(stdout);
  }
};

std::vector<ArmModel> bernoulli_arms(std::initializer_list<double> means) {
  std::vector<ArmModel> arms;
  for (double mu : means) arms.push_back({ArmModel::Kind::bernoulli, mu, 0.0});
  return arms;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("fedban_accept_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

}  // namespace

TEST_CASE("criterion 1: private sums stay inside the error certificate") {
  CriterionBanner banner(1);

  // 256 rewards per trial, eps = 1, delta = 0.05. The certificate bounds the
  // deviation of the private MEAN by h(n), i.e. the private SUM by n * h(n),
  // with failure probability at most delta; 1000 independent noise draws
  // should violate it about 0 times, and 50 (= delta budget) is the hard cap.
  const int n = 256;
  const int trials = 1000;
  const PrivacyParams privacy{1.0, 0.05};
  const ClampRange clamp{0.0, 1.0};
  const double sum_bound = n * error_certificate(n, privacy.epsilon, privacy.delta);

  Rng data(streams::reward_stream(20240814, 0));
  std::vector<double> inputs(n);
  for (auto& x : inputs) x = data.next_unit();

  int violations = 0;
  for (int s = 0; s < trials; ++s) {
    HybridMechanism mech(privacy, clamp, streams::noise_stream(1000, s, 0));
    for (double x : inputs) mech.insert(x);
    const double err = std::abs(mech.private_sum() - MechanismProbe::raw_total(mech));
    if (err > sum_bound) ++violations;

    // The report must expose exactly the certificate the bound uses.
    REQUIRE(mech.report().h ==
            doctest::Approx(error_certificate(n, 1.0, 0.05)).epsilon(1e-15));
  }
  REQUIRE(violations <= 50);
}

TEST_CASE("criterion 2: single-agent runs match reference ucb decision for decision") {
  CriterionBanner banner(2);
  constexpr std::int64_t horizon = 10000;

  // Master-worker, one agent, noise off: identical to UCB1 with a doubling
  // replay schedule. Decisions must match the reference bit for bit.
  {
    MasterWorkerConfig cfg;
    cfg.agents = 1;
    cfg.horizon = horizon;
    cfg.arm_models = bernoulli_arms({0.9, 0.6, 0.4});
    cfg.privacy = {kInf, 1e-6};
    cfg.run_seed = 424242;
    cfg.record_actions = true;
    const SimResult res = run_master_worker(cfg);

    Rng rewards(streams::reward_stream(cfg.run_seed, 0));
    refucb::DoublingUcb ref(3);
    for (std::int64_t t = 1; t <= horizon; ++t) {
      const int want = ref.select(t);
      REQUIRE(want == res.actions[static_cast<std::size_t>(t - 1)][0]);
      ref.finish_step(t, want,
                      cfg.arm_models[static_cast<std::size_t>(want)].sample(rewards));
    }
    const double expect = 0.3 * static_cast<double>(ref.n[1]) +
                          0.5 * static_cast<double>(ref.n[2]);
    REQUIRE(res.regret.back() == doctest::Approx(expect).epsilon(1e-12));
  }

  // Decentralized on the single-agent degenerate network, noise off:
  // identical to plain per-step UCB with the configured sigma and rho.
  {
    DecentralizedConfig cfg;
    cfg.horizon = horizon;
    cfg.arm_models = bernoulli_arms({0.8, 0.5, 0.2});
    cfg.privacy = {kInf, 1e-6};
    cfg.rho = 2.0;
    cfg.sigma = 0.5;
    cfg.run_seed = 171717;
    cfg.record_actions = true;
    const SimResult res = run_decentralized(cfg, MixingMatrix::trivial());

    Rng rewards(streams::reward_stream(cfg.run_seed, 0));
    refucb::PlainUcb ref(3, cfg.sigma, cfg.rho);
    for (std::int64_t t = 1; t <= horizon; ++t) {
      const int want = ref.select(t);
      REQUIRE(want == res.actions[static_cast<std::size_t>(t - 1)][0]);
      ref.update(want, cfg.arm_models[static_cast<std::size_t>(want)].sample(rewards));
    }
    const double expect = 0.3 * static_cast<double>(ref.n[1]) +
                          0.6 * static_cast<double>(ref.n[2]);
    REQUIRE(res.regret.back() == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("criterion 3: consensus counts stay inside the c0 band on every topology") {
  CriterionBanner banner(3);

  // 20 agents, privacy noise on, 10k steps. The per-step debug check asserts
  // |n_hat - network average of released pulls| <= c0 for every agent/arm;
  // zero violations are required on all four named topologies.
  for (const Topology topo :
       {Topology::cycle, Topology::complete, Topology::star, Topology::path}) {
    const MixingMatrix mixing = MixingMatrix::from_graph(build_graph(topo, 20), 0.5);
    DecentralizedConfig cfg;
    cfg.horizon = 10000;
    cfg.arm_models = bernoulli_arms({0.9, 0.6, 0.3});
    cfg.privacy = {1.0, 1e-6};
    cfg.rho = 2.0;
    cfg.sigma = 0.5;
    cfg.run_seed = 33;
    cfg.debug_checks = true;

    DecentralizedSim sim(cfg, mixing);
    for (int i = 0; i < 10000; ++i) sim.step();
    REQUIRE(sim.count_band_violations() == 0);
    REQUIRE(sim.worst_band_excess() == 0.0);
  }
}

TEST_CASE("criterion 4: gossip estimator variance respects the spectral bound") {
  CriterionBanner banner(4);

  // Complete graph of 5, kappa = 1, two gaussian arms pulled on a fixed
  // round-robin schedule by every agent. Across 2000 reward seeds the gossip
  // mean y_hat / n_hat must be unbiased and its variance must respect
  //   Var <= sigma^2 (n_hat + c_i) / (M n_hat^2)
  // with 15% headroom for sampling error of the variance estimate
  // (about 4.7 standard errors at 2000 samples).
  const int m = 5, seeds = 2000, horizon = 1000;
  const double mu[2] = {0.7, 0.3};
  const double sigma = 0.25;
  const MixingMatrix mixing =
      MixingMatrix::from_graph(build_graph(Topology::complete, m), 1.0);

  Matrix sum(2, m, 0.0), sumsq(2, m, 0.0);
  Matrix n_hat_seen(2, m, 0.0);
  for (int s = 0; s < seeds; ++s) {
    DecentralizedConfig cfg;
    cfg.horizon = horizon;
    cfg.arm_models = {{ArmModel::Kind::gaussian, mu[0], sigma * sigma},
                      {ArmModel::Kind::gaussian, mu[1], sigma * sigma}};
    cfg.privacy = {kInf, 1e-6};
    cfg.clamp = ClampRange{-5.0, 5.0};  // wide: no truncation bias
    cfg.rho = 2.0;
    cfg.sigma = sigma;
    cfg.run_seed = 50000 + static_cast<std::uint64_t>(s);
    cfg.track_shadow = true;
    cfg.forced_action = [](int, std::int64_t t) { return static_cast<int>((t - 1) % 2); };

    DecentralizedSim sim(cfg, mixing);
    for (int i = 0; i < horizon; ++i) sim.step();
    for (int j = 0; j < 2; ++j) {
      for (int i = 0; i < m; ++i) {
        const double x = sim.shadow_mean(i, j);
        sum(j, i) += x;
        sumsq(j, i) += x * x;
        n_hat_seen(j, i) = sim.n_hat(i, j);  // schedule-driven, seed-independent
      }
    }
  }

  for (int j = 0; j < 2; ++j) {
    for (int i = 0; i < m; ++i) {
      const double mean = sum(j, i) / seeds;
      const double var = sumsq(j, i) / seeds - mean * mean;
      const double n_hat = n_hat_seen(j, i);
      REQUIRE(n_hat > 100.0);

      const double bound = sigma * sigma * (n_hat + mixing.c_i()[static_cast<std::size_t>(i)]) /
                           (static_cast<double>(m) * n_hat * n_hat);
      REQUIRE(var <= 1.15 * bound);

      const double se = std::sqrt(var / seeds);
      REQUIRE(std::abs(mean - mu[j]) <= 5.0 * se);
    }
  }
}

TEST_CASE("criterion 5: mixing matrices reach consensus at the spectral rate") {
  CriterionBanner banner(5);

  // P^t must approach the rank-one averaging matrix J/M entrywise within
  // 1e-6 in at most 10k multiplications for all four topologies at M = 20,
  // and stay doubly stochastic along the way (row sums within 1e-10).
  const int m = 20;
  for (const Topology topo :
       {Topology::cycle, Topology::complete, Topology::star, Topology::path}) {
    const MixingMatrix mixing = MixingMatrix::from_graph(build_graph(topo, m), 0.5);
    Matrix q = mixing.p();
    const double target = 1.0 / static_cast<double>(m);

    auto max_dev = [&](const Matrix& x) {
      double d = 0.0;
      for (int i = 0; i < m; ++i) {
        for (int c = 0; c < m; ++c) d = std::max(d, std::abs(x(i, c) - target));
      }
      return d;
    };

    int steps = 1;
    while (max_dev(q) > 1e-6 && steps < 10000) {
      q = matmul(q, mixing.p());
      ++steps;
    }
    REQUIRE(max_dev(q) <= 1e-6);
    REQUIRE(steps < 10000);

    for (int i = 0; i < m; ++i) {
      double row = 0.0;
      for (int c = 0; c < m; ++c) row += q(i, c);
      REQUIRE(row == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("criterion 6: regret responds to privacy and exploration as ordered") {
  CriterionBanner banner(6);

  // The flagship experiment: 20 agents on a cycle, 10 gaussian arms,
  // T = 100k, 20 repeats with common random numbers across swept values.
  //  - loosening epsilon (1.5 -> 2 -> 5) must strictly lower mean regret;
  //  - raising rho (1.2 -> 2 -> 4) at fixed epsilon must strictly raise it;
  //  - every configuration must be clearly sublinear:
  //    mean R(T) < 8 * mean R(T/10) (a linear walk would give ratio 10).
  ExperimentConfig base;
  base.algorithm = ExperimentConfig::Algorithm::decentralized;
  base.agents = 20;
  base.arms = 10;
  base.horizon = 100000;
  base.topology = Topology::cycle;
  base.kappa = 0.5;
  base.arm_kind = ArmModel::Kind::gaussian;
  base.sigma = 0.1;
  base.rho = 2.0;
  base.repeats = 20;
  base.master_seed = 20260814;
  base.threads = 0;

  auto check_sublinear = [](const ExperimentOutput& out) {
    REQUIRE(out.aggregate.anchor_t.front() == 10000);
    const double early = out.aggregate.anchor_mean.front();
    REQUIRE(early > 0.0);
    REQUIRE(out.aggregate.final_mean < 8.0 * early);
  };

  {
    const auto points = run_sweep(base, "epsilon", {"1.5", "2", "5"});
    REQUIRE(points.size() == 3);
    for (const auto& p : points) check_sublinear(p.output);
    REQUIRE(points[0].output.aggregate.final_mean > points[1].output.aggregate.final_mean);
    REQUIRE(points[1].output.aggregate.final_mean > points[2].output.aggregate.final_mean);
  }

  {
    ExperimentConfig rho_base = base;
    rho_base.epsilon = 2.0;
    const auto points = run_sweep(rho_base, "rho", {"1.2", "2", "4"});
    REQUIRE(points.size() == 3);
    for (const auto& p : points) check_sublinear(p.output);
    REQUIRE(points[0].output.aggregate.final_mean < points[1].output.aggregate.final_mean);
    REQUIRE(points[1].output.aggregate.final_mean < points[2].output.aggregate.final_mean);
  }
}

TEST_CASE("criterion 7: simulated regret stays under the closed-form envelopes") {
  CriterionBanner banner(7);
  const double horizon = 10000.0;
  const std::vector<double> gaps{0.0, 0.2, 0.4, 0.6, 0.8};  // auto means, K = 5

  // Master-worker grid: M x epsilon (inf = noise off), 2 seeds each.
  for (int m : {1, 5}) {
    for (double eps : {1.0, 5.0, kInf}) {
      ExperimentConfig cfg;
      cfg.algorithm = ExperimentConfig::Algorithm::master_worker;
      cfg.agents = m;
      cfg.arms = 5;
      cfg.horizon = 10000;
      cfg.epsilon = eps;
      cfg.repeats = 2;
      cfg.master_seed = 606;
      cfg.threads = 1;
      const ExperimentOutput out = run_experiment(cfg);

      const double bound = master_worker_regret_bound(m, 5, horizon, eps, 0.2, 0.8);
      for (const auto& run : out.runs) REQUIRE(run.final_regret() <= bound);
    }
  }

  // Decentralized on a 5-cycle with gaussian rewards.
  const MixingMatrix mixing =
      MixingMatrix::from_graph(build_graph(Topology::cycle, 5), 0.5);
  for (double eps : {1.0, 5.0, kInf}) {
    ExperimentConfig cfg;
    cfg.algorithm = ExperimentConfig::Algorithm::decentralized;
    cfg.agents = 5;
    cfg.arms = 5;
    cfg.horizon = 10000;
    cfg.topology = Topology::cycle;
    cfg.kappa = 0.5;
    cfg.arm_kind = ArmModel::Kind::gaussian;
    cfg.sigma = 0.1;
    cfg.rho = 2.0;
    cfg.epsilon = eps;
    cfg.repeats = 2;
    cfg.master_seed = 707;
    cfg.threads = 1;
    const ExperimentOutput out = run_experiment(cfg);

    const double bound = decentralized_regret_bound(5, 5, horizon, eps, 2.0, 0.01,
                                                    mixing.c0(), mixing.c_i(), gaps);
    for (const auto& run : out.runs) REQUIRE(run.final_regret() <= bound);
  }
}

TEST_CASE("criterion 8: spectral constants order topologies sensibly") {
  CriterionBanner banner(8);

  // Frozen 3-agent path at kappa = 0.5 (eigenvalues 1, 3/4, 1/4).
  {
    const MixingMatrix mixing =
        MixingMatrix::from_graph(build_graph(Topology::path, 3), 0.5);
    REQUIRE(mixing.c0() == doctest::Approx(5.773502691896257).epsilon(1e-9));
    REQUIRE(mixing.c_i()[0] == doctest::Approx(3.6884004884004895).epsilon(1e-9));
    REQUIRE(mixing.c_i()[1] == doctest::Approx(0.35555555555555557).epsilon(1e-9));
    REQUIRE(mixing.c_i()[2] == doctest::Approx(3.688400488400488).epsilon(1e-9));
  }

  // A sparse ring mixes far slower than a complete graph of the same size:
  // both its drift radius c0 and every agent's excess-variance constant must
  // dominate the complete graph's.
  const MixingMatrix ring =
      MixingMatrix::from_graph(build_graph(Topology::cycle, 20), 0.5);
  const MixingMatrix full =
      MixingMatrix::from_graph(build_graph(Topology::complete, 20), 0.5);
  REQUIRE(ring.c0() > full.c0());

  double ring_min = kInf, full_max = 0.0;
  for (double c : ring.c_i()) ring_min = std::min(ring_min, c);
  for (double c : full.c_i()) full_max = std::max(full_max, c);
  REQUIRE(ring_min > full_max);

  // Nonnegativity everywhere; the single-agent network has no drift at all.
  for (const Topology topo :
       {Topology::cycle, Topology::complete, Topology::star, Topology::path}) {
    const MixingMatrix mixing = MixingMatrix::from_graph(build_graph(topo, 20), 0.5);
    REQUIRE(mixing.c0() >= 0.0);
    for (double c : mixing.c_i()) REQUIRE(c >= 0.0);
  }
  const MixingMatrix solo = MixingMatrix::trivial();
  REQUIRE(solo.c0() == 0.0);
  REQUIRE(solo.c_i() == std::vector<double>{0.0});
}

TEST_CASE("criterion 9: the command-line tool is deterministic and signals errors") {
  CriterionBanner banner(9);
  TempDir tmp("cli");

  const std::string cli = FEDBAN_CLI_PATH;
  auto run_cli = [&](const std::string& args) {
    const std::string cmd = args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  };

  {
    std::ofstream cfg(tmp.path / "run.cfg");
    cfg << "algorithm = decentralized\n"
        << "M = 3\nK = 2\nT = 300\n"
        << "topology = cycle\n"
        << "means = 0.9, 0.5\n"
        << "epsilon = 1\n"
        << "repeats = 2\n"
        << "master_seed = 77\n"
        << "threads = 1\n";
  }
  const std::string cfg_path = (tmp.path / "run.cfg").string();

  // Same seed twice: byte-identical traces.
  REQUIRE(run_cli("\"" + cli + "\" run --config \"" + cfg_path + "\" --out \"" +
                  (tmp.path / "a").string() + "\" --quiet") == 0);
  REQUIRE(run_cli("\"" + cli + "\" run --config \"" + cfg_path + "\" --out \"" +
                  (tmp.path / "b").string() + "\" --quiet") == 0);
  for (const char* name : {"trace_r000.csv", "trace_r001.csv"}) {
    REQUIRE(slurp(tmp.path / "a" / name) == slurp(tmp.path / "b" / name));
  }

  // A different seed through the environment changes the traces.
  REQUIRE(run_cli("FEDBAN_SEED=123 \"" + cli + "\" run --config \"" + cfg_path +
                  "\" --out \"" + (tmp.path / "c").string() + "\" --quiet") == 0);
  REQUIRE(slurp(tmp.path / "a" / "trace_r000.csv") !=
          slurp(tmp.path / "c" / "trace_r000.csv"));

  // Configuration errors exit 2; I/O errors exit 3.
  {
    std::ofstream bad(tmp.path / "bad.cfg");
    bad << "K = 1\n";
  }
  REQUIRE(run_cli("\"" + cli + "\" run --config \"" + (tmp.path / "bad.cfg").string() +
                  "\"") == 2);
  REQUIRE(run_cli("\"" + cli + "\" run --config \"" + (tmp.path / "absent.cfg").string() +
                  "\"") == 3);

  // Subcommands stay healthy.
  REQUIRE(run_cli("\"" + cli + "\" graph-info --topology cycle --M 6") == 0);
}
