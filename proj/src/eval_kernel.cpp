#include "gpae/eval_kernel.hpp"

#include <omp.h>

#include <numeric>

#include "gpae/fitness.hpp"

namespace gpae {

double individual_mse(const AutoencoderIndividual& ind,
                      const SampleView& view) {
  thread_local std::vector<double> code, recon;
  code.resize(static_cast<std::size_t>(ind.topology->n_code));
  recon.resize(static_cast<std::size_t>(ind.topology->n_in));

  CompensatedMean acc;
  for (const std::int64_t r : view.rows) {
    const std::span<const double> x = view.slice(r);
    encode(ind, x, code);
    decode(ind, code, recon);
    acc.add(mse(x, recon));
  }
  return acc.mean();
}

namespace {

inline bool needs_eval(const AutoencoderIndividual& ind,
                       std::int64_t last_eval_id, std::int64_t eval_id) {
  return !ind.fitness.has_value() || last_eval_id != eval_id;
}

}  // namespace

void assign_fitness_serial(Population& pop, const SampleView& view,
                           std::int64_t eval_id) {
  for (AutoencoderIndividual& ind : pop.individuals)
    if (needs_eval(ind, pop.last_eval_id, eval_id))
      ind.fitness = individual_mse(ind, view);
  pop.last_eval_id = eval_id;
}

void assign_fitness(Population& pop, const SampleView& view,
                    std::int64_t eval_id, int workers) {
  const int w = workers > 0 ? workers : omp_get_max_threads();
  if (w <= 1) {
    assign_fitness_serial(pop, view, eval_id);
    return;
  }
  const std::int64_t n = static_cast<std::int64_t>(pop.individuals.size());
#pragma omp parallel for schedule(dynamic) num_threads(w)
  for (std::int64_t i = 0; i < n; ++i) {
    AutoencoderIndividual& ind = pop.individuals[static_cast<std::size_t>(i)];
    if (needs_eval(ind, pop.last_eval_id, eval_id))
      ind.fitness = individual_mse(ind, view);
  }
  pop.last_eval_id = eval_id;
}

std::vector<std::int64_t> all_rows(const Dataset& data) {
  std::vector<std::int64_t> rows(static_cast<std::size_t>(data.count));
  std::iota(rows.begin(), rows.end(), std::int64_t{0});
  return rows;
}

}  // namespace gpae
