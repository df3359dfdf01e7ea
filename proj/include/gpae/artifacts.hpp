#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gpae/dataset.hpp"
#include "gpae/evolution_config.hpp"
#include "gpae/individual.hpp"

namespace gpae {

// One row per generation: fitness statistics on that generation's
// evaluation set, plus wall time. batch is -1 when the full training set
// was used.
struct GenRecord {
  int generation = 0;
  double best = 0.0;
  double mean = 0.0;
  double worst = 0.0;
  std::int64_t wall_ms = 0;
  std::int64_t batch = -1;
};

struct RunSummary {
  double train_mse = 0.0;
  std::optional<double> test_mse;  // filled by the orchestrator
  std::int64_t total_ms = 0;
};

struct RunLog {
  std::vector<GenRecord> records;
  std::optional<RunSummary> summary;
};

// Header row, one row per generation, one summary row. Fitness fields are
// written with full round-trip precision.
void write_metrics_csv(const RunLog& log, const std::filesystem::path& path);
RunLog read_metrics_csv(const std::filesystem::path& path);

// Two-band P5 strip: top row the first `count` originals, bottom row their
// reconstructions, clamped to [0,1] and quantized to 8 bits.
void write_reconstruction_strip(const AutoencoderIndividual& ind,
                                const Dataset& samples, std::int64_t count,
                                const std::filesystem::path& path);

void write_pgm(const std::filesystem::path& path, int width, int height,
               std::span<const unsigned char> pixels);

struct LoadedModel {
  AutoencoderIndividual individual;
  std::shared_ptr<const LayerTopology> topology;
  EvolutionConfig config;
  int width = 0;
  int height = 0;
};

// "#gpae v1" header of key=value lines, then one s-expression per tree:
// encoder trees first, each line "enc:<slot> <expr>", then "dec:<slot>".
void save_model(const AutoencoderIndividual& ind, const EvolutionConfig& config,
                int width, int height, const std::filesystem::path& path);
LoadedModel load_model(const std::filesystem::path& path);

}  // namespace gpae
