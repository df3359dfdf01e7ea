#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "gpae/common.hpp"

namespace gpae {

enum class SetupKind { kStraightforward, kPartitioned };

std::string to_string(SetupKind k);
SetupKind setup_from_string(const std::string& s);

struct EvolutionConfig {
  int population_size = 60;
  int max_depth = 4;
  double crossover_prob = 0.6;
  double mutation_prob = 0.3;
  // When set, must equal the derived elite count P - S - C - M.
  std::optional<int> elitism;
  // When unset and a minibatch size is given, derived as
  // passes * ceil(train_size / minibatch_size).
  std::optional<int> generations;
  std::optional<int> minibatch_size;
  int passes = 1;
  std::uint64_t seed = 0;
  SetupKind setup = SetupKind::kStraightforward;
  int parallel_workers = 0;  // 0 = all available cores
  // Straightforward code width; defaults to ceil(3*n_in/4).
  std::optional<int> code_size;
  bool log_timing = true;  // false zeroes wall-clock fields in run logs
};

// Per-generation slot breakdown: survivors via tournament, crossover
// children, mutation children, elites. Crossover and mutation fractions
// apply to the non-survivor half, reproducing (30, 18, 9, 3) at the
// defaults. Throws ConfigError when the pieces cannot sum to the
// population size.
struct StepCounts {
  int survivors = 0;
  int crossover = 0;
  int mutation = 0;
  int elites = 0;

  static StepCounts derive(const EvolutionConfig& config);
};

// Validates ranges and cross-field constraints; throws ConfigError.
void validate(const EvolutionConfig& config);

}  // namespace gpae
