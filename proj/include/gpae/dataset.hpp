#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gpae/common.hpp"

namespace gpae {

// Grayscale image collection flattened row-major into [0,1] feature vectors.
struct Dataset {
  std::string name;
  int width = 0;
  int height = 0;
  std::int64_t count = 0;
  std::vector<double> values;  // count * width * height, row-major

  int n_features() const { return width * height; }
  std::span<const double> row(std::int64_t i) const {
    const std::size_t n = static_cast<std::size_t>(n_features());
    return {values.data() + static_cast<std::size_t>(i) * n, n};
  }
  Dataset truncated(std::int64_t limit) const;
};

// IDX3 unsigned-byte images (big-endian magic 0x00000803). Pixels are
// normalized by 255. count_limit keeps only the first images.
Dataset load_idx(const std::filesystem::path& images_path,
                 std::optional<std::int64_t> count_limit = std::nullopt);

// Directory of equal-geometry binary PGM (P5, maxval 255) files, loaded in
// lexicographic filename order.
Dataset load_raster_dir(const std::filesystem::path& dir_path);

enum class SynthKind { kUniformNoise, kBlockwiseConstant, kLowRank };

// Deterministic synthetic fixtures. kBlockwiseConstant repeats one value
// across each group of 4 consecutive features, so a 4->3 partitioned model
// can reach zero error. kLowRank mixes two fixed basis rows.
Dataset synth_dataset(SynthKind kind, std::int64_t count, int n_features,
                      std::uint64_t seed);

}  // namespace gpae
