#include "gpae/dataset.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <random>

namespace gpae {

namespace fs = std::filesystem;

namespace {

std::uint32_t read_be32(std::istream& in, const std::string& path,
                        const char* what) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4))
    throw FormatError(path + ": truncated while reading " + what);
  return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
         (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

void bytes_to_unit(const std::vector<unsigned char>& raw,
                   std::vector<double>& out) {
  out.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i)
    out[i] = static_cast<double>(raw[i]) / 255.0;
}

// P5 header token reader: skips whitespace and '#' comments.
int read_pnm_int(std::istream& in, const std::string& path) {
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (!std::isspace(c)) {
      break;
    }
    if (c != EOF) c = in.get();
  }
  if (c == EOF || !std::isdigit(c))
    throw FormatError(path + ": malformed PGM header");
  int v = 0;
  while (c != EOF && std::isdigit(c)) {
    v = v * 10 + (c - '0');
    c = in.get();
  }
  return v;
}

struct PgmImage {
  int width = 0;
  int height = 0;
  std::vector<unsigned char> pixels;
};

PgmImage load_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char m0 = 0, m1 = 0;
  in.get(m0);
  in.get(m1);
  if (!in || m0 != 'P' || m1 != '5')
    throw FormatError(path.string() + ": not a binary PGM (P5) file");
  PgmImage img;
  img.width = read_pnm_int(in, path.string());
  img.height = read_pnm_int(in, path.string());
  const int maxval = read_pnm_int(in, path.string());
  if (maxval != 255)
    throw FormatError(path.string() + ": unsupported maxval " +
                      std::to_string(maxval) + " (need 255)");
  // read_pnm_int consumed the single whitespace after maxval, so the
  // stream now sits on the first pixel byte.
  const std::size_t n =
      static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height);
  img.pixels.resize(n);
  if (!in.read(reinterpret_cast<char*>(img.pixels.data()),
               static_cast<std::streamsize>(n)))
    throw FormatError(path.string() + ": truncated pixel data");
  return img;
}

}  // namespace

Dataset Dataset::truncated(std::int64_t limit) const {
  if (limit < 0 || limit >= count) return *this;
  Dataset d;
  d.name = name;
  d.width = width;
  d.height = height;
  d.count = limit;
  d.values.assign(values.begin(),
                  values.begin() + static_cast<std::ptrdiff_t>(
                                       limit * n_features()));
  return d;
}

Dataset load_idx(const fs::path& images_path,
                 std::optional<std::int64_t> count_limit) {
  std::ifstream in(images_path, std::ios::binary);
  if (!in) throw IoError("cannot open " + images_path.string());
  const std::string p = images_path.string();

  const std::uint32_t magic = read_be32(in, p, "magic");
  if (magic != 0x00000803u)
    throw FormatError(p + ": bad IDX magic (expected 0x00000803, got 0x" +
                      [&] {
                        char buf[16];
                        std::snprintf(buf, sizeof buf, "%08x", magic);
                        return std::string(buf);
                      }() +
                      ")");
  const std::int64_t total = read_be32(in, p, "image count");
  const int rows = static_cast<int>(read_be32(in, p, "row count"));
  const int cols = static_cast<int>(read_be32(in, p, "column count"));
  if (rows <= 0 || cols <= 0 || total < 0)
    throw FormatError(p + ": nonsensical IDX dimensions " +
                      std::to_string(total) + "x" + std::to_string(rows) +
                      "x" + std::to_string(cols));

  std::int64_t count = total;
  if (count_limit && *count_limit >= 0) count = std::min(count, *count_limit);
  if (count == 0) throw FormatError(p + ": no images");

  const std::size_t n =
      static_cast<std::size_t>(count) * static_cast<std::size_t>(rows) *
      static_cast<std::size_t>(cols);
  std::vector<unsigned char> raw(n);
  if (!in.read(reinterpret_cast<char*>(raw.data()),
               static_cast<std::streamsize>(n)))
    throw FormatError(p + ": truncated (header promises " +
                      std::to_string(total) + " images of " +
                      std::to_string(rows) + "x" + std::to_string(cols) + ")");

  Dataset d;
  d.name = images_path.filename().string();
  d.width = cols;
  d.height = rows;
  d.count = count;
  bytes_to_unit(raw, d.values);
  return d;
}

Dataset load_raster_dir(const fs::path& dir_path) {
  if (!fs::is_directory(dir_path))
    throw IoError(dir_path.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir_path))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
    return a.filename().string() < b.filename().string();
  });
  if (files.empty())
    throw FormatError(dir_path.string() + ": no files in directory");

  Dataset d;
  d.name = dir_path.filename().string();
  d.count = 0;
  for (const fs::path& f : files) {
    const PgmImage img = load_pgm(f);
    if (d.count == 0) {
      d.width = img.width;
      d.height = img.height;
    } else if (img.width != d.width || img.height != d.height) {
      throw FormatError(f.string() + ": geometry " + std::to_string(img.width) +
                        "x" + std::to_string(img.height) +
                        " differs from first file's " + std::to_string(d.width) +
                        "x" + std::to_string(d.height));
    }
    const std::size_t before = d.values.size();
    d.values.resize(before + img.pixels.size());
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
      d.values[before + i] = static_cast<double>(img.pixels[i]) / 255.0;
    ++d.count;
  }
  return d;
}

Dataset synth_dataset(SynthKind kind, std::int64_t count, int n_features,
                      std::uint64_t seed) {
  Dataset d;
  d.width = n_features;
  d.height = 1;
  d.count = count;
  d.values.resize(static_cast<std::size_t>(count) *
                  static_cast<std::size_t>(n_features));
  std::mt19937_64 rng = derive_stream(seed, 0x53594e5448ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  switch (kind) {
    case SynthKind::kUniformNoise:
      d.name = "synth-uniform-noise";
      for (double& v : d.values) v = unit(rng);
      break;
    case SynthKind::kBlockwiseConstant:
      d.name = "synth-blockwise-constant";
      for (std::int64_t s = 0; s < count; ++s) {
        double* row = d.values.data() + s * n_features;
        for (int f = 0; f < n_features; f += 4) {
          const double u = unit(rng);
          for (int k = f; k < std::min(f + 4, n_features); ++k) row[k] = u;
        }
      }
      break;
    case SynthKind::kLowRank: {
      d.name = "synth-low-rank";
      std::vector<double> basis(2 * static_cast<std::size_t>(n_features));
      for (double& v : basis) v = unit(rng);
      for (std::int64_t s = 0; s < count; ++s) {
        const double a = unit(rng), b = unit(rng);
        double* row = d.values.data() + s * n_features;
        for (int f = 0; f < n_features; ++f)
          row[f] = 0.5 * (a * basis[f] + b * basis[n_features + f]);
      }
      break;
    }
  }
  return d;
}

}  // namespace gpae
