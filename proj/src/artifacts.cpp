#include "gpae/artifacts.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "gpae/sexpr.hpp"

namespace gpae {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double parse_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw FormatError(where + ": bad number '" + s + "'");
  return v;
}

std::int64_t parse_int(const std::string& s, const std::string& where) {
  std::int64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw FormatError(where + ": bad integer '" + s + "'");
  return v;
}

constexpr char kCsvHeader[] = "generation,best_mse,mean_mse,worst_mse,wall_ms,batch";

}  // namespace

void write_metrics_csv(const RunLog& log, const fs::path& path) {
  if (!log.summary)
    throw std::invalid_argument("write_metrics_csv: incomplete log (no summary)");
  for (std::size_t i = 0; i < log.records.size(); ++i)
    if (log.records[i].generation != static_cast<int>(i))
      throw std::invalid_argument("write_metrics_csv: generation indices not contiguous");

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << kCsvHeader << '\n';
  for (const GenRecord& r : log.records) {
    out << r.generation << ',' << format_shortest(r.best) << ','
        << format_shortest(r.mean) << ',' << format_shortest(r.worst) << ','
        << r.wall_ms << ',';
    if (r.batch >= 0) out << r.batch;
    out << '\n';
  }
  const RunSummary& s = *log.summary;
  out << "summary," << format_shortest(s.train_mse) << ',';
  if (s.test_mse) out << format_shortest(*s.test_mse);
  out << ',' << s.total_ms << ",,\n";
  if (!out) throw IoError("short write to " + path.string());
}

RunLog read_metrics_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw FormatError(path.string() + ": missing metrics header");

  RunLog log;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f[0] == "summary") {
      if (f.size() != 6)
        throw FormatError(path.string() + ": malformed summary row");
      RunSummary s;
      s.train_mse = parse_double(f[1], path.string());
      if (!f[2].empty()) s.test_mse = parse_double(f[2], path.string());
      s.total_ms = parse_int(f[3], path.string());
      log.summary = s;
      continue;
    }
    if (f.size() != 6)
      throw FormatError(path.string() + ": malformed record row");
    GenRecord r;
    r.generation = static_cast<int>(parse_int(f[0], path.string()));
    r.best = parse_double(f[1], path.string());
    r.mean = parse_double(f[2], path.string());
    r.worst = parse_double(f[3], path.string());
    r.wall_ms = parse_int(f[4], path.string());
    r.batch = f[5].empty() ? -1 : parse_int(f[5], path.string());
    log.records.push_back(r);
  }
  return log;
}

void write_pgm(const fs::path& path, int width, int height,
               std::span<const unsigned char> pixels) {
  if (static_cast<std::size_t>(width) * static_cast<std::size_t>(height) !=
      pixels.size())
    throw std::invalid_argument("write_pgm: pixel count != geometry");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "P5\n" << width << ' ' << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(pixels.data()),
            static_cast<std::streamsize>(pixels.size()));
  if (!out) throw IoError("short write to " + path.string());
}

namespace {

unsigned char quantize(double v) {
  const double c = v < 0.0 ? 0.0 : v > 1.0 ? 1.0 : v;
  return static_cast<unsigned char>(std::lround(c * 255.0));
}

}  // namespace

void write_reconstruction_strip(const AutoencoderIndividual& ind,
                                const Dataset& samples, std::int64_t count,
                                const fs::path& path) {
  if (samples.count < 1)
    throw std::invalid_argument("reconstruction strip needs at least 1 sample");
  if (samples.n_features() != ind.topology->n_in)
    throw std::invalid_argument(
        "reconstruction strip: dataset geometry " +
        std::to_string(samples.n_features()) + " != model n_in " +
        std::to_string(ind.topology->n_in));
  count = std::min(count, samples.count);
  if (count < 1) throw std::invalid_argument("reconstruction strip: count < 1");

  const int w = samples.width;
  const int h = samples.height;
  const int strip_w = static_cast<int>(count) * w;
  const int strip_h = 2 * h;
  std::vector<unsigned char> canvas(
      static_cast<std::size_t>(strip_w) * static_cast<std::size_t>(strip_h));

  std::vector<double> code(static_cast<std::size_t>(ind.topology->n_code));
  std::vector<double> recon(static_cast<std::size_t>(ind.topology->n_in));
  for (std::int64_t i = 0; i < count; ++i) {
    const auto x = samples.row(i);
    encode(ind, x, code);
    decode(ind, code, recon);
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) {
        const std::size_t src = static_cast<std::size_t>(r) * w + c;
        const std::size_t col = static_cast<std::size_t>(i) * w + c;
        canvas[static_cast<std::size_t>(r) * strip_w + col] = quantize(x[src]);
        canvas[static_cast<std::size_t>(r + h) * strip_w + col] =
            quantize(recon[src]);
      }
  }
  write_pgm(path, strip_w, strip_h, canvas);
}

namespace {

constexpr char kModelMagic[] = "#gpae v1";

void write_header_line(std::ofstream& out, const std::string& key,
                       const std::string& value) {
  out << key << '=' << value << '\n';
}

}  // namespace

void save_model(const AutoencoderIndividual& ind, const EvolutionConfig& config,
                int width, int height, const fs::path& path) {
  const LayerTopology& t = *ind.topology;
  if (ind.encoder.size() != static_cast<std::size_t>(t.n_code) ||
      ind.decoder.size() != static_cast<std::size_t>(t.n_in))
    throw std::invalid_argument("save_model: forest sizes do not match topology");
  if (width * height != t.n_in)
    throw std::invalid_argument("save_model: geometry does not match n_in");

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << kModelMagic << '\n';
  write_header_line(out, "kind",
                    t.kind == TopologyKind::kPartitioned ? "partitioned"
                                                         : "straightforward");
  write_header_line(out, "n_in", std::to_string(t.n_in));
  write_header_line(out, "n_code", std::to_string(t.n_code));
  write_header_line(out, "width", std::to_string(width));
  write_header_line(out, "height", std::to_string(height));
  write_header_line(out, "seed", std::to_string(config.seed));
  write_header_line(out, "population_size",
                    std::to_string(config.population_size));
  write_header_line(out, "max_depth", std::to_string(config.max_depth));
  write_header_line(out, "crossover_prob",
                    format_shortest(config.crossover_prob));
  write_header_line(out, "mutation_prob", format_shortest(config.mutation_prob));
  if (config.elitism)
    write_header_line(out, "elitism", std::to_string(*config.elitism));
  if (config.generations)
    write_header_line(out, "generations", std::to_string(*config.generations));
  if (config.minibatch_size)
    write_header_line(out, "minibatch", std::to_string(*config.minibatch_size));
  write_header_line(out, "passes", std::to_string(config.passes));

  for (std::size_t j = 0; j < ind.encoder.size(); ++j)
    out << "enc:" << j << ' ' << serialize_tree(ind.encoder[j]) << '\n';
  for (std::size_t i = 0; i < ind.decoder.size(); ++i)
    out << "dec:" << i << ' ' << serialize_tree(ind.decoder[i]) << '\n';
  if (!out) throw IoError("short write to " + path.string());
}

LoadedModel load_model(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string p = path.string();

  std::string line;
  int line_no = 1;
  if (!std::getline(in, line)) throw FormatError(p + ": empty file");
  if (line != kModelMagic) {
    if (line.rfind("#gpae ", 0) == 0)
      throw FormatError(p + ": unsupported model version '" + line +
                        "' (expected '" + kModelMagic + "')");
    throw FormatError(p + ": not a gpae model file");
  }

  // Header phase: key=value lines until the first tree line.
  std::string kind_str;
  int n_in = -1, n_code = -1, width = -1, height = -1;
  EvolutionConfig config;
  bool in_header = true;
  LoadedModel model;
  std::vector<std::string> tree_lines;
  std::vector<int> tree_line_nos;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.rfind("enc:", 0) == 0 || line.rfind("dec:", 0) == 0) {
      in_header = false;
      tree_lines.push_back(line);
      tree_line_nos.push_back(line_no);
      continue;
    }
    if (!in_header)
      throw FormatError(p + ":" + std::to_string(line_no) +
                        ": header line after tree section");
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw FormatError(p + ":" + std::to_string(line_no) +
                        ": expected key=value, got '" + line + "'");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    const std::string where = p + ":" + std::to_string(line_no);
    if (key == "kind")
      kind_str = value;
    else if (key == "n_in")
      n_in = static_cast<int>(parse_int(value, where));
    else if (key == "n_code")
      n_code = static_cast<int>(parse_int(value, where));
    else if (key == "width")
      width = static_cast<int>(parse_int(value, where));
    else if (key == "height")
      height = static_cast<int>(parse_int(value, where));
    else if (key == "seed")
      config.seed = static_cast<std::uint64_t>(parse_int(value, where));
    else if (key == "population_size")
      config.population_size = static_cast<int>(parse_int(value, where));
    else if (key == "max_depth")
      config.max_depth = static_cast<int>(parse_int(value, where));
    else if (key == "crossover_prob")
      config.crossover_prob = parse_double(value, where);
    else if (key == "mutation_prob")
      config.mutation_prob = parse_double(value, where);
    else if (key == "elitism")
      config.elitism = static_cast<int>(parse_int(value, where));
    else if (key == "generations")
      config.generations = static_cast<int>(parse_int(value, where));
    else if (key == "minibatch")
      config.minibatch_size = static_cast<int>(parse_int(value, where));
    else if (key == "passes")
      config.passes = static_cast<int>(parse_int(value, where));
    else
      throw FormatError(where + ": unknown header key '" + key + "'");
  }

  if (kind_str.empty() || n_in < 0 || n_code < 0 || width < 0 || height < 0)
    throw FormatError(p + ": header missing kind/n_in/n_code/width/height");
  if (width * height != n_in)
    throw FormatError(p + ": geometry " + std::to_string(width) + "x" +
                      std::to_string(height) + " != n_in " +
                      std::to_string(n_in));

  std::shared_ptr<const LayerTopology> topo;
  if (kind_str == "straightforward") {
    topo = std::make_shared<const LayerTopology>(
        build_topology_straightforward(n_in, n_code));
    config.setup = SetupKind::kStraightforward;
    config.code_size = n_code;
  } else if (kind_str == "partitioned") {
    topo = std::make_shared<const LayerTopology>(
        build_topology_partitioned(n_in));
    config.setup = SetupKind::kPartitioned;
    if (topo->n_code != n_code)
      throw FormatError(p + ": partitioned n_code should be " +
                        std::to_string(topo->n_code) + ", header says " +
                        std::to_string(n_code));
  } else {
    throw FormatError(p + ": unknown topology kind '" + kind_str + "'");
  }

  const std::size_t expected =
      static_cast<std::size_t>(n_code) + static_cast<std::size_t>(n_in);
  if (tree_lines.size() != expected)
    throw FormatError(p + ": expected " + std::to_string(n_code) +
                      " encoder + " + std::to_string(n_in) +
                      " decoder trees, found " +
                      std::to_string(tree_lines.size()) + " tree lines");

  AutoencoderIndividual ind;
  ind.topology = topo;
  ind.encoder.reserve(static_cast<std::size_t>(n_code));
  ind.decoder.reserve(static_cast<std::size_t>(n_in));
  for (std::size_t i = 0; i < tree_lines.size(); ++i) {
    const std::string& tl = tree_lines[i];
    const std::string where = p + ":" + std::to_string(tree_line_nos[i]);
    const bool is_enc = i < static_cast<std::size_t>(n_code);
    const char* role = is_enc ? "enc:" : "dec:";
    const std::size_t slot = is_enc ? i : i - static_cast<std::size_t>(n_code);
    if (tl.rfind(role, 0) != 0)
      throw FormatError(where + ": expected " + std::string(role) +
                        std::to_string(slot) + " line");
    const std::size_t sp = tl.find(' ');
    if (sp == std::string::npos)
      throw FormatError(where + ": missing expression");
    const std::string slot_str = tl.substr(4, sp - 4);
    if (parse_int(slot_str, where) != static_cast<std::int64_t>(slot))
      throw FormatError(where + ": expected slot " + std::to_string(slot) +
                        ", found " + slot_str);
    const Scope scope = is_enc ? topo->encoder_scopes[slot]
                               : topo->decoder_scopes[slot];
    try {
      ExprTree tree = parse_tree(std::string_view(tl).substr(sp + 1), scope);
      if (is_enc)
        ind.encoder.push_back(std::move(tree));
      else
        ind.decoder.push_back(std::move(tree));
    } catch (const ParseError& e) {
      throw FormatError(where + ": " + e.what());
    }
  }

  model.individual = std::move(ind);
  model.topology = topo;
  model.config = config;
  model.width = width;
  model.height = height;
  return model;
}

}  // namespace gpae
