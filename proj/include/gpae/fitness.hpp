#pragma once

#include <span>

#include "gpae/dataset.hpp"
#include "gpae/individual.hpp"

namespace gpae {

// Mean square error between two equal-length vectors (the reconstruction
// distance minimized as fitness). Pairwise summation keeps accumulation
// error far below the reported precision even at thousands of features.
double mse(std::span<const double> x, std::span<const double> y);

// Neumaier-compensated running mean; deterministic in insertion order.
class CompensatedMean {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
    ++count_;
  }
  std::int64_t count() const { return count_; }
  double mean() const { return (sum_ + comp_) / static_cast<double>(count_); }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
  std::int64_t count_ = 0;
};

// Mean over all samples of mse(sample, decode(encode(sample))). Per-sample
// errors are computed in parallel across `workers` threads; the reduction
// order is fixed, so the result does not depend on the worker count.
double mean_mse_over(const Dataset& samples, const AutoencoderIndividual& ind,
                     int workers = 1);

}  // namespace gpae
