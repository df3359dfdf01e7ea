#pragma once

#include <random>
#include <utility>
#include <vector>

#include "gpae/artifacts.hpp"
#include "gpae/dataset.hpp"
#include "gpae/eval_kernel.hpp"
#include "gpae/evolution_config.hpp"
#include "gpae/individual.hpp"

namespace gpae {

// Exactly floor(pop/2) winners; each tournament draws two distinct
// individuals uniformly and keeps the lower fitness (ties decided by a
// fair coin). Sampling is with replacement across tournaments.
std::vector<AutoencoderIndividual> binary_tournament_survivors(
    const std::vector<AutoencoderIndividual>& pop, int n_survivors,
    std::mt19937_64& rng);

// Swaps one uniformly chosen encoder slot and, independently, one decoder
// slot between copies of the parents. Same slot on both sides, so scope
// invariants hold under any topology. Children's fitness is unset.
std::pair<AutoencoderIndividual, AutoencoderIndividual> crossover(
    const AutoencoderIndividual& a, const AutoencoderIndividual& b,
    std::mt19937_64& rng);

// Replaces one uniformly chosen tree per forest with a fresh random tree
// over the same scope.
AutoencoderIndividual mutate(const AutoencoderIndividual& a,
                             std::mt19937_64& rng, int max_depth);

// Survivors ++ crossover children ++ mutation children ++ elites, in that
// order. Parents are drawn uniformly from the survivor set; elites are the
// best of the previous generation (ties broken by lower index) and are
// copied, so they may also appear as parents.
void generation_step(Population& pop, const StepCounts& counts, int max_depth);

struct MinibatchSchedule {
  int batch_size = 0;
  int generations = 0;
  // One entry per generation; each pass is a freshly shuffled partition of
  // the training indices, so batches within a pass are disjoint and cover
  // everything.
  std::vector<std::vector<std::int64_t>> batches;
};

MinibatchSchedule make_schedule(std::int64_t train_size, int batch_size,
                                int passes, std::mt19937_64& rng);

struct RunResult {
  AutoencoderIndividual best;  // by full-training-set fitness at termination
  RunLog log;
  std::shared_ptr<const LayerTopology> topology;
};

// Single population over the full-visibility topology; the baseline the
// partitioned setup is measured against. Evaluates on the full training
// set unless a minibatch size is configured.
RunResult evolve_straightforward(const Dataset& train,
                                 const EvolutionConfig& config);

// One independent population of 4-3-4 mini-autoencoders per feature block,
// evolved concurrently; block fitness is the MSE over that block's four
// features only. The returned model assembles each block's best mini.
RunResult evolve_partitioned(const Dataset& train,
                             const EvolutionConfig& config);

}  // namespace gpae
