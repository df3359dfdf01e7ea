#include "gpae/evolution.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "gpae/fitness.hpp"

namespace gpae {

std::string to_string(SetupKind k) {
  return k == SetupKind::kStraightforward ? "straightforward" : "partitioned";
}

SetupKind setup_from_string(const std::string& s) {
  if (s == "straightforward") return SetupKind::kStraightforward;
  if (s == "partitioned") return SetupKind::kPartitioned;
  throw ConfigError("unknown setup '" + s +
                    "' (expected straightforward or partitioned)");
}

StepCounts StepCounts::derive(const EvolutionConfig& config) {
  const int p = config.population_size;
  StepCounts c;
  c.survivors = p / 2;
  const int rest = p - c.survivors;
  // Ties round to even so crossover children pair up at the .5 boundary.
  c.crossover = static_cast<int>(std::nearbyint(rest * config.crossover_prob));
  c.mutation = static_cast<int>(std::lround(rest * config.mutation_prob));
  c.elites = rest - c.crossover - c.mutation;
  if (c.elites < 0)
    throw ConfigError("elite count is negative: population " +
                      std::to_string(p) + " splits into " +
                      std::to_string(c.survivors) + "+" +
                      std::to_string(c.crossover) + "+" +
                      std::to_string(c.mutation));
  if (config.elitism && *config.elitism != c.elites)
    throw ConfigError("elitism=" + std::to_string(*config.elitism) +
                      " inconsistent with derived elite count " +
                      std::to_string(c.elites));
  return c;
}

void validate(const EvolutionConfig& config) {
  if (config.population_size < 2)
    throw ConfigError("population_size must be at least 2");
  if (config.max_depth < 0) throw ConfigError("max_depth must be >= 0");
  if (config.crossover_prob < 0.0 || config.crossover_prob > 1.0)
    throw ConfigError("crossover_prob must be in [0,1]");
  if (config.mutation_prob < 0.0 || config.mutation_prob > 1.0)
    throw ConfigError("mutation_prob must be in [0,1]");
  if (config.crossover_prob + config.mutation_prob > 1.0)
    throw ConfigError("crossover_prob + mutation_prob must not exceed 1");
  if (config.passes < 1) throw ConfigError("passes must be >= 1");
  if (config.minibatch_size && *config.minibatch_size < 1)
    throw ConfigError("minibatch size must be >= 1");
  if (config.generations && *config.generations < 0)
    throw ConfigError("generations must be >= 0");
  if (!config.generations && !config.minibatch_size)
    throw ConfigError("generations is required when no minibatch size is set");
  if (config.parallel_workers < 0)
    throw ConfigError("workers must be >= 0");
  if (config.code_size && *config.code_size < 1)
    throw ConfigError("code_size must be >= 1");
  StepCounts::derive(config);  // counts must be consistent at startup
}

std::vector<AutoencoderIndividual> binary_tournament_survivors(
    const std::vector<AutoencoderIndividual>& pop, int n_survivors,
    std::mt19937_64& rng) {
  if (pop.size() < 2)
    throw std::invalid_argument("tournament needs at least 2 individuals");
  for (const auto& ind : pop)
    if (!ind.fitness)
      throw std::logic_error("tournament: individual has no fitness");

  std::uniform_int_distribution<std::size_t> first(0, pop.size() - 1);
  std::uniform_int_distribution<std::size_t> second(0, pop.size() - 2);
  std::uniform_int_distribution<int> coin(0, 1);

  std::vector<AutoencoderIndividual> out;
  out.reserve(static_cast<std::size_t>(n_survivors));
  for (int k = 0; k < n_survivors; ++k) {
    const std::size_t i = first(rng);
    std::size_t j = second(rng);
    if (j >= i) ++j;
    const double fi = *pop[i].fitness;
    const double fj = *pop[j].fitness;
    std::size_t win;
    if (fi < fj)
      win = i;
    else if (fj < fi)
      win = j;
    else
      win = coin(rng) == 0 ? i : j;
    out.push_back(pop[win]);
  }
  return out;
}

namespace {

void require_same_topology(const AutoencoderIndividual& a,
                           const AutoencoderIndividual& b) {
  const LayerTopology& ta = *a.topology;
  const LayerTopology& tb = *b.topology;
  if (ta.kind != tb.kind || ta.n_in != tb.n_in || ta.n_code != tb.n_code)
    throw std::invalid_argument("crossover: parents have different topologies");
}

}  // namespace

std::pair<AutoencoderIndividual, AutoencoderIndividual> crossover(
    const AutoencoderIndividual& a, const AutoencoderIndividual& b,
    std::mt19937_64& rng) {
  require_same_topology(a, b);
  AutoencoderIndividual ca = a;
  AutoencoderIndividual cb = b;
  const std::size_t e = std::uniform_int_distribution<std::size_t>(
      0, ca.encoder.size() - 1)(rng);
  std::swap(ca.encoder[e], cb.encoder[e]);
  const std::size_t d = std::uniform_int_distribution<std::size_t>(
      0, ca.decoder.size() - 1)(rng);
  std::swap(ca.decoder[d], cb.decoder[d]);
  ca.fitness.reset();
  cb.fitness.reset();
  return {std::move(ca), std::move(cb)};
}

AutoencoderIndividual mutate(const AutoencoderIndividual& a,
                             std::mt19937_64& rng, int max_depth) {
  AutoencoderIndividual child = a;
  const std::size_t e = std::uniform_int_distribution<std::size_t>(
      0, child.encoder.size() - 1)(rng);
  child.encoder[e] =
      random_tree(a.topology->encoder_scopes[e], max_depth, rng);
  const std::size_t d = std::uniform_int_distribution<std::size_t>(
      0, child.decoder.size() - 1)(rng);
  child.decoder[d] =
      random_tree(a.topology->decoder_scopes[d], max_depth, rng);
  child.fitness.reset();
  return child;
}

namespace {

std::vector<std::size_t> best_order(
    const std::vector<AutoencoderIndividual>& pop, int count) {
  std::vector<std::size_t> idx(pop.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::partial_sort(idx.begin(), idx.begin() + count, idx.end(),
                    [&](std::size_t a, std::size_t b) {
                      const double fa = pop[a].fitness.value();
                      const double fb = pop[b].fitness.value();
                      return fa != fb ? fa < fb : a < b;
                    });
  idx.resize(static_cast<std::size_t>(count));
  return idx;
}

}  // namespace

void generation_step(Population& pop, const StepCounts& counts,
                     int max_depth) {
  std::mt19937_64& rng = pop.rng;

  // Elites are chosen from the previous generation before it is replaced.
  std::vector<AutoencoderIndividual> elites;
  elites.reserve(static_cast<std::size_t>(counts.elites));
  for (const std::size_t i : best_order(pop.individuals, counts.elites))
    elites.push_back(pop.individuals[i]);

  std::vector<AutoencoderIndividual> next =
      binary_tournament_survivors(pop.individuals, counts.survivors, rng);
  next.reserve(pop.individuals.size());

  std::uniform_int_distribution<std::size_t> pick(
      0, static_cast<std::size_t>(counts.survivors) - 1);
  std::uniform_int_distribution<int> coin(0, 1);

  int remaining = counts.crossover;
  while (remaining > 0) {
    auto [ca, cb] = crossover(next[pick(rng)], next[pick(rng)], rng);
    if (remaining >= 2) {
      next.push_back(std::move(ca));
      next.push_back(std::move(cb));
      remaining -= 2;
    } else {
      // odd crossover budget: keep one child of the final pair
      next.push_back(coin(rng) == 0 ? std::move(ca) : std::move(cb));
      remaining = 0;
    }
  }

  for (int m = 0; m < counts.mutation; ++m)
    next.push_back(mutate(next[pick(rng)], rng, max_depth));

  for (AutoencoderIndividual& e : elites) next.push_back(std::move(e));

  pop.individuals = std::move(next);
  ++pop.generation;
}

MinibatchSchedule make_schedule(std::int64_t train_size, int batch_size,
                                int passes, std::mt19937_64& rng) {
  if (batch_size <= 0) throw ConfigError("batch size must be positive");
  if (train_size <= 0) throw ConfigError("empty training set");
  if (batch_size > train_size)
    throw ConfigError("batch size " + std::to_string(batch_size) +
                      " exceeds training size " + std::to_string(train_size));
  if (passes < 1) throw ConfigError("passes must be >= 1");

  const int per_pass = static_cast<int>((train_size + batch_size - 1) / batch_size);
  MinibatchSchedule s;
  s.batch_size = batch_size;
  s.generations = passes * per_pass;
  s.batches.reserve(static_cast<std::size_t>(s.generations));

  std::vector<std::int64_t> perm(static_cast<std::size_t>(train_size));
  std::iota(perm.begin(), perm.end(), std::int64_t{0});
  for (int p = 0; p < passes; ++p) {
    std::shuffle(perm.begin(), perm.end(), rng);
    for (std::int64_t off = 0; off < train_size; off += batch_size) {
      const auto b = perm.begin() + off;
      const auto e = perm.begin() + std::min<std::int64_t>(off + batch_size,
                                                           train_size);
      s.batches.emplace_back(b, e);
    }
  }
  return s;
}

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t ms_since(Clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() -
                                                               t0)
      .count();
}

struct PopStats {
  double best = std::numeric_limits<double>::infinity();
  double mean = 0.0;
  double worst = -std::numeric_limits<double>::infinity();
};

PopStats population_stats(const Population& pop) {
  PopStats s;
  CompensatedMean m;
  for (const AutoencoderIndividual& ind : pop.individuals) {
    const double f = ind.fitness.value();
    s.best = std::min(s.best, f);
    s.worst = std::max(s.worst, f);
    m.add(f);
  }
  s.mean = m.mean();
  return s;
}

struct GenPlan {
  int generations = 0;
  std::optional<MinibatchSchedule> schedule;

  // Rows and batch id for generation g; rows_all backs full-set regimes.
  std::span<const std::int64_t> rows(int g,
                                     const std::vector<std::int64_t>& rows_all,
                                     std::int64_t& batch_id,
                                     std::int64_t& eval_id) const {
    if (schedule) {
      const std::size_t n = schedule->batches.size();
      batch_id = static_cast<std::int64_t>(g % n);
      eval_id = g;
      return schedule->batches[static_cast<std::size_t>(batch_id)];
    }
    batch_id = -1;
    eval_id = 0;  // same set every generation: cached fitness stays valid
    return rows_all;
  }
};

GenPlan make_plan(const Dataset& train, const EvolutionConfig& config) {
  GenPlan plan;
  if (config.minibatch_size) {
    std::mt19937_64 sched_rng = derive_stream(config.seed, kStreamSchedule);
    plan.schedule = make_schedule(train.count, *config.minibatch_size,
                                  config.passes, sched_rng);
    plan.generations = config.generations.value_or(plan.schedule->generations);
  } else {
    plan.generations = config.generations.value();
  }
  return plan;
}

std::size_t best_index(const std::vector<AutoencoderIndividual>& pop) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < pop.size(); ++i)
    if (pop[i].fitness.value() < pop[best].fitness.value()) best = i;
  return best;
}

}  // namespace

RunResult evolve_straightforward(const Dataset& train,
                                 const EvolutionConfig& config) {
  validate(config);
  if (train.count < 1) throw ConfigError("empty training set");
  const int n_in = train.n_features();
  const int n_code = config.code_size.value_or(default_code_size(n_in));
  auto topo = std::make_shared<const LayerTopology>(
      build_topology_straightforward(n_in, n_code));
  const StepCounts counts = StepCounts::derive(config);
  const GenPlan plan = make_plan(train, config);
  const std::vector<std::int64_t> rows_all = all_rows(train);

  Population pop;
  pop.rng = derive_stream(config.seed, kStreamPopulation, 0);
  pop.individuals.reserve(static_cast<std::size_t>(config.population_size));
  for (int i = 0; i < config.population_size; ++i)
    pop.individuals.push_back(
        random_individual(topo, config.max_depth, pop.rng));

  RunResult res;
  res.topology = topo;
  const auto t0 = Clock::now();

  for (int g = 0; g < plan.generations; ++g) {
    const auto g0 = Clock::now();
    std::int64_t batch_id = 0, eval_id = 0;
    const auto rows = plan.rows(g, rows_all, batch_id, eval_id);
    assign_fitness(pop, SampleView{&train, rows, 0, n_in}, eval_id,
                   config.parallel_workers);
    const PopStats st = population_stats(pop);
    res.log.records.push_back({g, st.best, st.mean, st.worst,
                               config.log_timing ? ms_since(g0) : 0,
                               batch_id});
    generation_step(pop, counts, config.max_depth);
  }

  // Termination: rank the final population on the complete training set.
  assign_fitness(pop, SampleView{&train, rows_all, 0, n_in},
                 plan.schedule ? plan.generations : 0,
                 config.parallel_workers);
  res.best = pop.individuals[best_index(pop.individuals)];
  res.log.summary = RunSummary{res.best.fitness.value(), std::nullopt,
                               config.log_timing ? ms_since(t0) : 0};
  return res;
}

RunResult evolve_partitioned(const Dataset& train,
                             const EvolutionConfig& config) {
  validate(config);
  if (train.count < 1) throw ConfigError("empty training set");
  const int n_in = train.n_features();
  auto topo = std::make_shared<const LayerTopology>(
      build_topology_partitioned(n_in));
  auto block_topo =
      std::make_shared<const LayerTopology>(build_block_topology());
  const int n_blocks = topo->blocks();
  const StepCounts counts = StepCounts::derive(config);
  const GenPlan plan = make_plan(train, config);
  const std::vector<std::int64_t> rows_all = all_rows(train);
  const int workers = config.parallel_workers > 0 ? config.parallel_workers
                                                  : omp_get_max_threads();

  // Each block owns an RNG stream derived from (seed, block), so results
  // do not depend on how blocks are spread over threads.
  std::vector<Population> blocks(static_cast<std::size_t>(n_blocks));
  for (int b = 0; b < n_blocks; ++b) {
    Population& pop = blocks[static_cast<std::size_t>(b)];
    pop.rng = derive_stream(config.seed, kStreamPopulation,
                            static_cast<std::uint64_t>(b));
    pop.individuals.reserve(static_cast<std::size_t>(config.population_size));
    for (int i = 0; i < config.population_size; ++i)
      pop.individuals.push_back(
          random_individual(block_topo, config.max_depth, pop.rng));
  }

  RunResult res;
  res.topology = topo;
  const auto t0 = Clock::now();

  std::vector<PopStats> stats(static_cast<std::size_t>(n_blocks));
  for (int g = 0; g < plan.generations; ++g) {
    const auto g0 = Clock::now();
    std::int64_t batch_id = 0, eval_id = 0;
    const auto rows = plan.rows(g, rows_all, batch_id, eval_id);

#pragma omp parallel for schedule(dynamic) num_threads(workers) if (workers > 1)
    for (int b = 0; b < n_blocks; ++b) {
      Population& pop = blocks[static_cast<std::size_t>(b)];
      assign_fitness_serial(pop, SampleView{&train, rows, 4 * b, 4}, eval_id);
      stats[static_cast<std::size_t>(b)] = population_stats(pop);
      generation_step(pop, counts, config.max_depth);
    }

    // Merged in block order: the mean of per-block bests equals the
    // full-vector MSE of the best-per-block assembly (equal block sizes).
    CompensatedMean best_m, mean_m, worst_m;
    for (const PopStats& s : stats) {
      best_m.add(s.best);
      mean_m.add(s.mean);
      worst_m.add(s.worst);
    }
    res.log.records.push_back({g, best_m.mean(), mean_m.mean(),
                               worst_m.mean(),
                               config.log_timing ? ms_since(g0) : 0,
                               batch_id});
  }

  // Rank every block population on the full training set, then assemble
  // the winners into one autoencoder over the partitioned topology.
  const std::int64_t final_id = plan.schedule ? plan.generations : 0;
  std::vector<std::size_t> winner(static_cast<std::size_t>(n_blocks));
#pragma omp parallel for schedule(dynamic) num_threads(workers) if (workers > 1)
  for (int b = 0; b < n_blocks; ++b) {
    Population& pop = blocks[static_cast<std::size_t>(b)];
    assign_fitness_serial(pop, SampleView{&train, rows_all, 4 * b, 4},
                          final_id);
    winner[static_cast<std::size_t>(b)] = best_index(pop.individuals);
  }

  AutoencoderIndividual model;
  model.topology = topo;
  model.encoder.reserve(static_cast<std::size_t>(topo->n_code));
  model.decoder.reserve(static_cast<std::size_t>(topo->n_in));
  for (int b = 0; b < n_blocks; ++b) {
    const AutoencoderIndividual& mini =
        blocks[static_cast<std::size_t>(b)]
            .individuals[winner[static_cast<std::size_t>(b)]];
    for (int j = 0; j < 3; ++j)
      model.encoder.push_back(mini.encoder[static_cast<std::size_t>(j)]
                                  .with_scope(topo->encoder_scopes[
                                      static_cast<std::size_t>(3 * b + j)]));
    for (int i = 0; i < 4; ++i)
      model.decoder.push_back(mini.decoder[static_cast<std::size_t>(i)]
                                  .with_scope(topo->decoder_scopes[
                                      static_cast<std::size_t>(4 * b + i)]));
  }
  model.fitness = mean_mse_over(train, model, config.parallel_workers);

  res.best = std::move(model);
  res.log.summary = RunSummary{res.best.fitness.value(), std::nullopt,
                               config.log_timing ? ms_since(t0) : 0};
  return res;
}

}  // namespace gpae
