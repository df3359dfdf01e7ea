#include "gpae/fitness.hpp"

#include <omp.h>

#include <cmath>
#include <stdexcept>

namespace gpae {

namespace {

double sq_diff_sum(const double* x, const double* y, std::size_t n) {
  if (n <= 32) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = x[i] - y[i];
      s += d * d;
    }
    return s;
  }
  const std::size_t h = n / 2;
  return sq_diff_sum(x, y, h) + sq_diff_sum(x + h, y + h, n - h);
}

}  // namespace

double mse(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw std::invalid_argument("mse: length mismatch (" +
                                std::to_string(x.size()) + " vs " +
                                std::to_string(y.size()) + ")");
  if (x.empty()) throw std::invalid_argument("mse: empty vectors");
  return sq_diff_sum(x.data(), y.data(), x.size()) /
         static_cast<double>(x.size());
}

double mean_mse_over(const Dataset& samples, const AutoencoderIndividual& ind,
                     int workers) {
  if (samples.count == 0) throw std::invalid_argument("mean_mse_over: empty sample set");
  if (samples.n_features() != ind.topology->n_in)
    throw std::invalid_argument("mean_mse_over: dataset geometry != model n_in");

  const int w = workers > 0 ? workers : omp_get_max_threads();
  std::vector<double> per_sample(static_cast<std::size_t>(samples.count));
#pragma omp parallel for schedule(static) num_threads(w) if (w > 1)
  for (std::int64_t i = 0; i < samples.count; ++i) {
    thread_local std::vector<double> code, recon;
    code.resize(static_cast<std::size_t>(ind.topology->n_code));
    recon.resize(static_cast<std::size_t>(ind.topology->n_in));
    const auto x = samples.row(i);
    encode(ind, x, code);
    decode(ind, code, recon);
    per_sample[static_cast<std::size_t>(i)] = mse(x, recon);
  }

  CompensatedMean acc;
  for (const double v : per_sample) acc.add(v);
  return acc.mean();
}

}  // namespace gpae
