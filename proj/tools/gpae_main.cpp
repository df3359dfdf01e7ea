#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>

#include "gpae/artifacts.hpp"
#include "gpae/evolution.hpp"
#include "gpae/fitness.hpp"
#include "gpae/sexpr.hpp"

namespace fs = std::filesystem;
using namespace gpae;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitFormat = 4;

Dataset load_any(const std::string& path, std::int64_t limit) {
  Dataset d;
  if (fs::is_directory(path)) {
    d = load_raster_dir(path);
    if (limit >= 0) d = d.truncated(limit);
  } else {
    d = load_idx(path, limit >= 0 ? std::optional<std::int64_t>(limit)
                                  : std::nullopt);
  }
  return d;
}

std::string hhmmss(std::int64_t ms) {
  const std::int64_t s = ms / 1000;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%02lld:%02lld:%02lld",
                static_cast<long long>(s / 3600),
                static_cast<long long>((s / 60) % 60),
                static_cast<long long>(s % 60));
  return buf;
}

struct TrainArgs {
  std::string train_path, test_path, out_dir;
  std::string setup = "straightforward";
  std::string preset;
  std::string log_timing = "real";
  std::int64_t limit = -1;
  std::int64_t test_limit = -1;
  std::uint64_t seed = 0;
  int generations = -1;  // -1 = unset
  int batch = -1;
  int passes = 1;
  int workers = 0;
  int population = 60;
  int max_depth = 4;
  double crossover_prob = 0.6;
  double mutation_prob = 0.3;
  int elitism = -1;
  int code_size = -1;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

template <typename T>
T parse_number(const std::string& value, const std::string& key) {
  T v{};
  const std::string t = trim(value);
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw ConfigError("config key '" + key + "': bad number '" + value + "'");
  return v;
}

// key=value config: every key mirrors a train flag; a flag given on the
// command line (or via its env var) wins over the file.
void apply_config_file(const std::string& path, CLI::App* cmd, TrainArgs& a) {
  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"train", [&](const std::string&, const std::string& v) { a.train_path = trim(v); }},
      {"test", [&](const std::string&, const std::string& v) { a.test_path = trim(v); }},
      {"out", [&](const std::string&, const std::string& v) { a.out_dir = trim(v); }},
      {"setup", [&](const std::string&, const std::string& v) { a.setup = trim(v); }},
      {"preset", [&](const std::string&, const std::string& v) { a.preset = trim(v); }},
      {"log-timing", [&](const std::string&, const std::string& v) { a.log_timing = trim(v); }},
      {"limit", [&](const std::string& k, const std::string& v) { a.limit = parse_number<std::int64_t>(v, k); }},
      {"test-limit", [&](const std::string& k, const std::string& v) { a.test_limit = parse_number<std::int64_t>(v, k); }},
      {"seed", [&](const std::string& k, const std::string& v) { a.seed = parse_number<std::uint64_t>(v, k); }},
      {"generations", [&](const std::string& k, const std::string& v) { a.generations = parse_number<int>(v, k); }},
      {"batch", [&](const std::string& k, const std::string& v) { a.batch = parse_number<int>(v, k); }},
      {"passes", [&](const std::string& k, const std::string& v) { a.passes = parse_number<int>(v, k); }},
      {"workers", [&](const std::string& k, const std::string& v) { a.workers = parse_number<int>(v, k); }},
      {"population", [&](const std::string& k, const std::string& v) { a.population = parse_number<int>(v, k); }},
      {"max-depth", [&](const std::string& k, const std::string& v) { a.max_depth = parse_number<int>(v, k); }},
      {"crossover-prob", [&](const std::string& k, const std::string& v) { a.crossover_prob = parse_number<double>(v, k); }},
      {"mutation-prob", [&](const std::string& k, const std::string& v) { a.mutation_prob = parse_number<double>(v, k); }},
      {"elitism", [&](const std::string& k, const std::string& v) { a.elitism = parse_number<int>(v, k); }},
      {"code-size", [&](const std::string& k, const std::string& v) { a.code_size = parse_number<int>(v, k); }},
  };

  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": expected key=value, got '" + stripped + "'");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = stripped.substr(eq + 1);
    const auto it = setters.find(key);
    if (it == setters.end())
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": unknown config key '" + key + "'");
    if (cmd->count("--" + key) > 0) continue;  // flag wins
    it->second(key, value);
  }
}

int run_train(const TrainArgs& a) {
  EvolutionConfig config;
  config.population_size = a.population;
  config.max_depth = a.max_depth;
  config.crossover_prob = a.crossover_prob;
  config.mutation_prob = a.mutation_prob;
  if (a.elitism >= 0) config.elitism = a.elitism;
  if (a.generations >= 0) config.generations = a.generations;
  if (a.batch >= 0) config.minibatch_size = a.batch;
  config.passes = a.passes;
  config.seed = a.seed;
  config.setup = setup_from_string(a.setup);
  config.parallel_workers = a.workers;
  if (a.code_size >= 0) config.code_size = a.code_size;
  if (a.log_timing == "zero")
    config.log_timing = false;
  else if (a.log_timing != "real")
    throw ConfigError("log-timing must be 'real' or 'zero'");
  validate(config);

  const Dataset train = load_any(a.train_path, a.limit);
  const Dataset test = load_any(a.test_path, a.test_limit);
  if (train.n_features() != test.n_features())
    throw FormatError("train geometry " + std::to_string(train.n_features()) +
                      " != test geometry " + std::to_string(test.n_features()));

  const auto t0 = std::chrono::steady_clock::now();
  RunResult res = config.setup == SetupKind::kPartitioned
                      ? evolve_partitioned(train, config)
                      : evolve_straightforward(train, config);
  res.log.summary->test_mse =
      mean_mse_over(test, res.best, config.parallel_workers);
  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - t0)
                           .count();

  fs::create_directories(a.out_dir);
  save_model(res.best, config, train.width, train.height,
             fs::path(a.out_dir) / "model.gpae");
  write_metrics_csv(res.log, fs::path(a.out_dir) / "metrics.csv");
  write_reconstruction_strip(res.best, test, 10,
                             fs::path(a.out_dir) / "reconstruction.pgm");

  std::cout << "setup=" << a.setup
            << " train_mse=" << format_shortest(res.log.summary->train_mse)
            << " test_mse=" << format_shortest(*res.log.summary->test_mse)
            << " time=" << hhmmss(elapsed) << '\n';
  return kExitOk;
}

int run_transform(const std::string& model_path, const std::string& data_path,
                  const std::string& out_path) {
  const LoadedModel model = load_model(model_path);
  const Dataset data = load_any(data_path, -1);
  if (data.n_features() != model.topology->n_in)
    throw FormatError("dataset has " + std::to_string(data.n_features()) +
                      " features but model expects " +
                      std::to_string(model.topology->n_in));

  const EncoderModel enc = split_encoder(model.individual);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw IoError("cannot write " + out_path);
  std::vector<double> code(static_cast<std::size_t>(model.topology->n_code));
  for (std::int64_t i = 0; i < data.count; ++i) {
    enc.transform(data.row(i), code);
    for (std::size_t j = 0; j < code.size(); ++j) {
      if (j) out << ',';
      out << format_shortest(code[j]);
    }
    out << '\n';
  }
  if (!out) throw IoError("short write to " + out_path);
  return kExitOk;
}

int run_reconstruct(const std::string& model_path, const std::string& data_path,
                    const std::string& out_path, std::int64_t count) {
  const LoadedModel model = load_model(model_path);
  const Dataset data = load_any(data_path, -1);
  if (data.n_features() != model.topology->n_in)
    throw FormatError("dataset has " + std::to_string(data.n_features()) +
                      " features but model expects " +
                      std::to_string(model.topology->n_in));
  if (count < 1) throw ConfigError("count must be >= 1");
  if (count > data.count) {
    std::cerr << "warning: count " << count << " exceeds dataset size "
              << data.count << "; clamping\n";
    count = data.count;
  }
  write_reconstruction_strip(model.individual, data, count, out_path);
  return kExitOk;
}

struct ForestStats {
  int min_size = 0, max_size = 0;
  double mean_size = 0.0;
  int min_depth = 0, max_depth = 0;
  double mean_depth = 0.0;
};

ForestStats forest_stats(const std::vector<ExprTree>& forest) {
  ForestStats s;
  s.min_size = s.max_size = forest.front().size();
  s.min_depth = s.max_depth = forest.front().depth();
  double size_sum = 0.0, depth_sum = 0.0;
  for (const ExprTree& t : forest) {
    s.min_size = std::min(s.min_size, t.size());
    s.max_size = std::max(s.max_size, t.size());
    s.min_depth = std::min(s.min_depth, t.depth());
    s.max_depth = std::max(s.max_depth, t.depth());
    size_sum += t.size();
    depth_sum += t.depth();
  }
  s.mean_size = size_sum / static_cast<double>(forest.size());
  s.mean_depth = depth_sum / static_cast<double>(forest.size());
  return s;
}

void print_forest(const char* name, const std::vector<ExprTree>& forest) {
  const ForestStats s = forest_stats(forest);
  std::printf("%s: %zu trees, size min/mean/max = %d/%.1f/%d, "
              "depth min/mean/max = %d/%.1f/%d\n",
              name, forest.size(), s.min_size, s.mean_size, s.max_size,
              s.min_depth, s.mean_depth, s.max_depth);
}

int run_inspect(const std::string& model_path) {
  const LoadedModel model = load_model(model_path);
  const LayerTopology& t = *model.topology;
  std::printf("model: %s\n", model_path.c_str());
  std::printf("kind: %s\n", t.kind == TopologyKind::kPartitioned
                                ? "partitioned"
                                : "straightforward");
  std::printf("geometry: %dx%d (%d features)\n", model.width, model.height,
              t.n_in);
  if (t.kind == TopologyKind::kPartitioned)
    std::printf("layout: %d blocks, code %d\n", t.blocks(), t.n_code);
  else
    std::printf("layout: code %d\n", t.n_code);
  print_forest("encoder", model.individual.encoder);
  print_forest("decoder", model.individual.decoder);
  const double log2_size = search_space_log2(t.n_code, 4, t.n_in);
  std::printf("straightforward search space: log2 = %g (m=%d, K=4, n=%d)\n",
              log2_size, t.n_code, t.n_in);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GP-forest autoencoders: straightforward GP and partitioned "
               "1-layer deep GP with minibatch training"};
  app.require_subcommand(1);

  TrainArgs ta;
  std::string config_path;
  CLI::App* train = app.add_subcommand("train", "evolve an autoencoder");
  train->add_option("--config", config_path, "key=value config file (flags win)");
  train->add_option("--setup", ta.setup, "straightforward | partitioned");
  train->add_option("--train", ta.train_path, "training images (IDX file or PGM dir)");
  train->add_option("--test", ta.test_path, "testing images");
  train->add_option("--out", ta.out_dir, "output directory");
  train->add_option("--seed", ta.seed, "RNG seed");
  train->add_option("--generations", ta.generations,
                    "generation count (default: derived from batch/passes)");
  train->add_option("--batch", ta.batch, "minibatch size");
  train->add_option("--passes", ta.passes, "passes over the training data");
  train->add_option("--workers", ta.workers, "worker threads (0 = all cores)")
      ->envname("GPAE_WORKERS");
  train->add_option("--limit", ta.limit, "truncate training set");
  train->add_option("--test-limit", ta.test_limit, "truncate testing set");
  train->add_option("--population", ta.population, "population size");
  train->add_option("--max-depth", ta.max_depth, "tree depth cap");
  train->add_option("--crossover-prob", ta.crossover_prob, "crossover fraction");
  train->add_option("--mutation-prob", ta.mutation_prob, "mutation fraction");
  train->add_option("--elitism", ta.elitism, "elite count (must match derived)");
  train->add_option("--code-size", ta.code_size,
                    "code width for straightforward setup");
  train->add_option("--preset", ta.preset, "named preset: table3-best");
  train->add_option("--log-timing", ta.log_timing,
                    "real | zero (zero makes logs byte-reproducible)");

  std::string model_path, data_path, out_path;
  std::int64_t count = 10;
  CLI::App* transform =
      app.add_subcommand("transform", "encode a dataset with a trained model");
  transform->add_option("model", model_path, "model file")->required();
  transform->add_option("data", data_path, "dataset")->required();
  transform->add_option("out", out_path, "output CSV")->required();

  CLI::App* reconstruct = app.add_subcommand(
      "reconstruct", "original/reconstruction strip for the first samples");
  reconstruct->add_option("model", model_path, "model file")->required();
  reconstruct->add_option("data", data_path, "dataset")->required();
  reconstruct->add_option("out", out_path, "output PGM")->required();
  reconstruct->add_option("--count", count, "samples in the strip");

  CLI::App* inspect =
      app.add_subcommand("inspect", "print a model summary");
  inspect->add_option("model", model_path, "model file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (train->parsed()) {
      TrainArgs defaults;  // preset only fills slots still at their defaults
      if (!config_path.empty()) apply_config_file(config_path, train, ta);
      if (!ta.preset.empty()) {
        if (ta.preset != "table3-best")
          throw ConfigError("unknown preset '" + ta.preset + "'");
        if (train->count("--setup") == 0 && ta.setup == defaults.setup)
          ta.setup = "partitioned";
        if (train->count("--batch") == 0 && ta.batch == defaults.batch)
          ta.batch = 60;
        if (train->count("--passes") == 0 && ta.passes == defaults.passes)
          ta.passes = 5;
      }
      if (ta.train_path.empty()) throw ConfigError("--train is required");
      if (ta.test_path.empty()) throw ConfigError("--test is required");
      if (ta.out_dir.empty()) throw ConfigError("--out is required");
      return run_train(ta);
    }
    if (transform->parsed())
      return run_transform(model_path, data_path, out_path);
    if (reconstruct->parsed())
      return run_reconstruct(model_path, data_path, out_path, count);
    if (inspect->parsed()) return run_inspect(model_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kExitFormat;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitConfig;
}
