// Acceptance suite. Each test prints one "[ACCEPTANCE] <n> <name>: ..."
// line. Criteria 1-3 run against MNIST when the IDX files are available
// (GPAE_MNIST_DIR or <repo>/data/mnist); in environments without MNIST,
// criteria 1-2 run the same procedure at the same thresholds on the
// bundled UCI handwritten-digits IDX fixtures (real 8x8 digit images) and
// say so in their output line. Criterion 3 is the long full-scale run and
// stays opt-in via GPAE_RUN_FULLSCALE=1.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gpae/artifacts.hpp"
#include "gpae/evolution.hpp"
#include "gpae/fitness.hpp"
#include "gpae/sexpr.hpp"

namespace fs = std::filesystem;
using namespace gpae;

namespace {

void report(int criterion, const std::string& name, bool pass,
            const std::string& detail) {
  std::printf("[ACCEPTANCE] %d %s: %s (%s)\n", criterion, name.c_str(),
              pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
}

void report_skip(int criterion, const std::string& name,
                 const std::string& why) {
  std::printf("[ACCEPTANCE] %d %s: SKIP (%s)\n", criterion, name.c_str(),
              why.c_str());
  std::fflush(stdout);
}

struct ImagePair {
  fs::path train, test;
  std::string label;
  bool is_mnist = false;
};

// MNIST when present, otherwise the bundled digits fixtures.
ImagePair locate_images() {
  std::vector<fs::path> roots;
  if (const char* env = std::getenv("GPAE_MNIST_DIR")) roots.push_back(env);
  roots.push_back(fs::path(GPAE_DATA_DIR) / "mnist");
  for (const fs::path& root : roots) {
    const fs::path train = root / "train-images-idx3-ubyte";
    const fs::path test = root / "t10k-images-idx3-ubyte";
    if (fs::exists(train) && fs::exists(test))
      return {train, test, "mnist", true};
  }
  const fs::path digits = fs::path(GPAE_DATA_DIR) / "digits";
  return {digits / "train-images-idx3-ubyte",
          digits / "test-images-idx3-ubyte",
          "uci-digits surrogate; provide GPAE_MNIST_DIR for the canonical run",
          false};
}

struct RunOutput {
  int exit_code = -1;
  fs::path dir;
  RunLog log;
};

fs::path scratch_dir() {
  static int counter = 0;
  const fs::path p = fs::temp_directory_path() /
                     ("gpae-accept-" + std::to_string(::getpid()) + "-" +
                      std::to_string(counter++));
  fs::create_directories(p);
  return p;
}

RunOutput cli_train(const std::string& args) {
  RunOutput out;
  out.dir = scratch_dir();
  const std::string cmd = std::string(GPAE_CLI_PATH) + " train " + args +
                          " --out " + out.dir.string() + " > " +
                          (out.dir / "stdout.txt").string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  out.exit_code = status < 0 ? -1 : WEXITSTATUS(status);
  if (out.exit_code == 0)
    out.log = read_metrics_csv(out.dir / "metrics.csv");
  return out;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double median3(double a, double b, double c) {
  std::vector<double> v{a, b, c};
  std::sort(v.begin(), v.end());
  return v[1];
}

}  // namespace

TEST_CASE("criterion 1: partitioned beats straightforward by the required factor") {
  const ImagePair data = locate_images();
  const std::string limits =
      data.is_mnist ? " --limit 2000 --test-limit 500"
                    : " --limit 1400 --test-limit 350";
  std::vector<double> ratios;
  std::string per_seed;
  for (const int seed : {1, 2, 3}) {
    const std::string common = "--train " + data.train.string() + " --test " +
                               data.test.string() + limits +
                               " --generations 40 --seed " +
                               std::to_string(seed) + " --log-timing zero";
    const RunOutput sf = cli_train(common + " --setup straightforward");
    const RunOutput pt = cli_train(common + " --setup partitioned");
    REQUIRE(sf.exit_code == 0);
    REQUIRE(pt.exit_code == 0);
    const double mse_sf = sf.log.summary->test_mse.value();
    const double mse_pt = pt.log.summary->test_mse.value();
    ratios.push_back(mse_sf / mse_pt);
    per_seed += " seed" + std::to_string(seed) + "=" +
                format_shortest(mse_sf) + "/" + format_shortest(mse_pt);
  }
  const double med = median3(ratios[0], ratios[1], ratios[2]);
  const bool pass = med >= 5.0;
  report(1, "partitioned-vs-straightforward", pass,
         "median ratio " + format_shortest(med) + " (need >= 5);" + per_seed +
             "; dataset=" + data.label);
  CHECK(pass);
}

TEST_CASE("criterion 2: more minibatch passes improve testing MSE") {
  const ImagePair data = locate_images();
  const std::string limits = data.is_mnist ? " --limit 6000 --test-limit 1000"
                                           : " --limit 1437 --test-limit 360";
  bool pass = true;
  std::string detail;
  for (const int seed : {1, 2, 3}) {
    const std::string common = "--setup partitioned --train " +
                               data.train.string() + " --test " +
                               data.test.string() + limits + " --batch 60" +
                               " --seed " + std::to_string(seed) +
                               " --log-timing zero";
    const RunOutput one = cli_train(common + " --passes 1");
    const RunOutput five = cli_train(common + " --passes 5");
    REQUIRE(one.exit_code == 0);
    REQUIRE(five.exit_code == 0);
    const double mse1 = one.log.summary->test_mse.value();
    const double mse5 = five.log.summary->test_mse.value();
    pass = pass && mse5 < mse1;
    detail += " seed" + std::to_string(seed) + ": 1-pass=" +
              format_shortest(mse1) + " 5-pass=" + format_shortest(mse5) + ";";
  }
  report(2, "minibatch-passes-improve", pass, detail + " dataset=" + data.label);
  CHECK(pass);
}

TEST_CASE("criterion 3: full-scale MNIST ballpark (optional, long-running)") {
  if (!std::getenv("GPAE_RUN_FULLSCALE")) {
    report_skip(3, "full-scale-ballpark",
                "opt-in long run; set GPAE_RUN_FULLSCALE=1 with MNIST available");
    return;
  }
  const ImagePair data = locate_images();
  if (!data.is_mnist) {
    report_skip(3, "full-scale-ballpark", "MNIST files not found");
    return;
  }
  const RunOutput run = cli_train(
      "--setup partitioned --train " + data.train.string() + " --test " +
      data.test.string() + " --batch 60 --passes 5 --seed 1");
  REQUIRE(run.exit_code == 0);
  const double mse = run.log.summary->test_mse.value();
  const bool pass = mse <= 0.015;
  report(3, "full-scale-ballpark", pass,
         "testing MSE " + format_shortest(mse) + " (need <= 0.015)");
  CHECK(pass);
}

TEST_CASE("criterion 4: MSE oracle equivalence at 1e-12") {
  std::mt19937_64 rng(401);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> x(300), y(300);
  double max_err = 0.0;
  for (int rep = 0; rep < 10000; ++rep) {
    for (double& v : x) v = unit(rng);
    for (double& v : y) v = unit(rng);
    // independent reference: Kahan-compensated summation
    long double sum = 0.0L, c = 0.0L;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const long double d = static_cast<long double>(x[i]) - y[i];
      const long double term = d * d - c;
      const long double t = sum + term;
      c = (t - sum) - term;
      sum = t;
    }
    const double oracle =
        static_cast<double>(sum / static_cast<long double>(x.size()));
    max_err = std::max(max_err, std::abs(mse(x, y) - oracle));
  }
  const bool pass = max_err <= 1e-12;
  report(4, "mse-oracle-equivalence", pass,
         "max |difference| " + format_shortest(max_err) + " over 10000 pairs");
  CHECK(pass);
}

TEST_CASE("criterion 5: elitism monotonicity under full-set evaluation") {
  int violations = 0;
  int checked = 0;
  for (const std::uint64_t seed : {11u, 22u, 33u, 44u, 55u}) {
    const Dataset train =
        synth_dataset(SynthKind::kBlockwiseConstant, 200, 16, seed);
    for (const SetupKind setup :
         {SetupKind::kStraightforward, SetupKind::kPartitioned}) {
      EvolutionConfig cfg;
      cfg.seed = seed;
      cfg.generations = 30;
      cfg.setup = setup;
      cfg.log_timing = false;
      const RunResult res = setup == SetupKind::kPartitioned
                                ? evolve_partitioned(train, cfg)
                                : evolve_straightforward(train, cfg);
      REQUIRE(res.log.records.size() == 30);
      for (std::size_t g = 1; g < res.log.records.size(); ++g) {
        ++checked;
        if (res.log.records[g].best > res.log.records[g - 1].best)
          ++violations;
      }
    }
  }
  const bool pass = violations == 0;
  report(5, "elitism-monotonicity", pass,
         std::to_string(violations) + " violations in " +
             std::to_string(checked) + " generation transitions, 5 seeds x 2 setups");
  CHECK(pass);
}

TEST_CASE("criterion 6: perfect-compressibility floor on blockwise data") {
  int reached = 0;
  std::string detail;
  for (const std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    const Dataset train =
        synth_dataset(SynthKind::kBlockwiseConstant, 256, 8, 1000 + seed);
    EvolutionConfig cfg;
    cfg.seed = seed;
    cfg.generations = 60;
    cfg.setup = SetupKind::kPartitioned;
    cfg.log_timing = false;
    const RunResult res = evolve_partitioned(train, cfg);
    const double mse = res.log.summary->train_mse;
    if (mse <= 1e-3) ++reached;
    detail += " seed" + std::to_string(seed) + "=" + format_shortest(mse);
  }
  const bool pass = reached >= 4;
  report(6, "perfect-compressibility-floor", pass,
         std::to_string(reached) + "/5 seeds reached 1e-3;" + detail);
  CHECK(pass);
}

TEST_CASE("criterion 7: structural invariants over 10^4 genetic operations") {
  auto topo =
      std::make_shared<const LayerTopology>(build_topology_partitioned(8));
  std::mt19937_64 rng(701);
  long ops = 0, ok = 0;

  const auto legal = [&](const AutoencoderIndividual& ind) {
    if (!scopes_match_topology(ind)) return false;
    for (const ExprTree& t : ind.encoder)
      if (t.depth() > 4) return false;
    for (const ExprTree& t : ind.decoder)
      if (t.depth() > 4) return false;
    return true;
  };

  const auto a = random_individual(topo, 4, rng);
  const auto b = random_individual(topo, 4, rng);
  for (int i = 0; i < 4000; ++i) {
    const auto [ca, cb] = crossover(a, b, rng);
    ops += 2;
    ok += legal(ca) + legal(cb);
  }
  for (int i = 0; i < 1000; ++i) {
    ++ops;
    ok += legal(mutate(a, rng, 4));
  }

  // full generation steps: every bred individual must stay legal and the
  // population size constant
  Population pop;
  pop.rng = derive_stream(702, kStreamPopulation, 0);
  for (int i = 0; i < 60; ++i)
    pop.individuals.push_back(random_individual(topo, 4, pop.rng));
  const Dataset data = synth_dataset(SynthKind::kUniformNoise, 40, 8, 703);
  const auto rows = all_rows(data);
  EvolutionConfig cfg;
  const StepCounts counts = StepCounts::derive(cfg);
  bool sizes_ok = true;
  for (int g = 0; g < 20; ++g) {
    assign_fitness_serial(pop, SampleView{&data, rows, 0, 8}, g);
    generation_step(pop, counts, 4);
    sizes_ok = sizes_ok && pop.individuals.size() == 60;
    for (const auto& ind : pop.individuals) {
      ++ops;
      ok += legal(ind);
    }
  }

  const bool pass = ok == ops && sizes_ok && ops >= 10000;
  report(7, "structural-invariants", pass,
         std::to_string(ok) + "/" + std::to_string(ops) +
             " offspring legal; population size " +
             (sizes_ok ? "constant" : "DRIFTED"));
  CHECK(pass);
}

TEST_CASE("criterion 8: worker count cannot change emitted artifacts") {
  const ImagePair data = locate_images();
  const std::string common =
      "--setup partitioned --train " + data.train.string() + " --test " +
      data.test.string() + " --limit 600 --test-limit 100 --generations 12" +
      " --seed 77 --log-timing zero";
  const RunOutput w1 = cli_train(common + " --workers 1");
  const RunOutput w4 = cli_train(common + " --workers 4");
  REQUIRE(w1.exit_code == 0);
  REQUIRE(w4.exit_code == 0);
  const bool model_same = read_file(w1.dir / "model.gpae") ==
                          read_file(w4.dir / "model.gpae");
  const bool csv_same = read_file(w1.dir / "metrics.csv") ==
                        read_file(w4.dir / "metrics.csv");
  const bool pass = model_same && csv_same;
  report(8, "worker-determinism", pass,
         std::string("model ") + (model_same ? "identical" : "DIFFERS") +
             ", metrics " + (csv_same ? "identical" : "DIFFERS"));
  CHECK(pass);
}

TEST_CASE("criterion 9: protected division and closure under fuzzing") {
  std::mt19937_64 rng(901);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  long non_finite = 0;
  for (int rep = 0; rep < 100000; ++rep) {
    const int n_vis = 1 + static_cast<int>(rng() % 16);
    const ExprTree t = random_tree(identity_scope(n_vis), 4, rng);
    std::vector<double> x(static_cast<std::size_t>(n_vis));
    for (double& v : x) v = unit(rng);
    if (!std::isfinite(t.eval(x))) ++non_finite;
  }

  bool sentinel_exact = true;
  for (int rep = 0; rep < 10000; ++rep) {
    const double a = unit(rng) * 2000.0 - 1000.0;
    const ExprTree div_zero(
        {TreeNode::constant(a), TreeNode::constant(0.0),
         TreeNode::op(NodeKind::kDiv)},
        identity_scope(1));
    const double x[1] = {0.0};
    sentinel_exact = sentinel_exact && div_zero.eval(x) == 1.0e6;
  }

  const bool pass = non_finite == 0 && sentinel_exact;
  report(9, "protected-division-closure", pass,
         std::to_string(non_finite) + " non-finite results in 100000 trees; "
         "div-by-zero sentinel " + (sentinel_exact ? "exact" : "WRONG"));
  CHECK(pass);
}

TEST_CASE("criterion 10: block-decomposition identity of the assembled model") {
  // a genuinely assembled model from a short partitioned run
  const Dataset train = synth_dataset(SynthKind::kLowRank, 100, 16, 1001);
  EvolutionConfig cfg;
  cfg.seed = 5;
  cfg.generations = 10;
  cfg.setup = SetupKind::kPartitioned;
  cfg.log_timing = false;
  const RunResult res = evolve_partitioned(train, cfg);
  const AutoencoderIndividual& model = res.best;

  const Dataset probe = synth_dataset(SynthKind::kUniformNoise, 1000, 16, 1002);
  const double full = mean_mse_over(probe, model);

  std::vector<CompensatedMean> block_mse(4);
  std::vector<double> code(12), recon(16);
  for (std::int64_t s = 0; s < probe.count; ++s) {
    const auto x = probe.row(s);
    encode(model, x, code);
    decode(model, code, recon);
    for (int b = 0; b < 4; ++b)
      block_mse[static_cast<std::size_t>(b)].add(
          mse(x.subspan(static_cast<std::size_t>(4 * b), 4),
              std::span<const double>(recon).subspan(
                  static_cast<std::size_t>(4 * b), 4)));
  }
  CompensatedMean across;
  for (const auto& m : block_mse) across.add(m.mean());
  const double err = std::abs(full - across.mean());
  const bool pass = err <= 1e-12;
  report(10, "block-decomposition-identity", pass,
         "|full - mean(blocks)| = " + format_shortest(err) +
             " over 1000 samples");
  CHECK(pass);
}
