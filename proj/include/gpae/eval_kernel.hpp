#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "gpae/dataset.hpp"
#include "gpae/individual.hpp"

namespace gpae {

struct Population {
  std::vector<AutoencoderIndividual> individuals;
  int generation = 0;
  std::mt19937_64 rng;
  // Identifier of the sample set the current fitness values were computed
  // on; lets full-set runs skip re-evaluating unchanged individuals.
  std::int64_t last_eval_id = -1;
};

// A window onto a dataset: which rows, and which contiguous feature
// columns. Block populations evaluate against [4b, 4b+4) of each row; full
// topologies use the whole row.
struct SampleView {
  const Dataset* data = nullptr;
  std::span<const std::int64_t> rows;
  int col0 = 0;
  int width = 0;

  std::span<const double> slice(std::int64_t r) const {
    return data->row(r).subspan(static_cast<std::size_t>(col0),
                                static_cast<std::size_t>(width));
  }
};

// Mean over the view's rows of mse(x, decode(encode(x))). Accumulation
// order is the row order, independent of threading.
double individual_mse(const AutoencoderIndividual& ind, const SampleView& view);

// Serial reference for the population-evaluation kernel. Kept alongside
// the OpenMP version; the two must produce bit-identical fitness values.
void assign_fitness_serial(Population& pop, const SampleView& view,
                           std::int64_t eval_id);

// OpenMP kernel: individuals are independent, one task each. Skips
// individuals whose fitness is already valid for this eval_id.
void assign_fitness(Population& pop, const SampleView& view,
                    std::int64_t eval_id, int workers);

std::vector<std::int64_t> all_rows(const Dataset& data);

}  // namespace gpae
