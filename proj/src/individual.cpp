#include "gpae/individual.hpp"

#include <stdexcept>

namespace gpae {

namespace {

void eval_forest(const std::vector<ExprTree>& forest,
                 std::span<const double> input, bool identity_scopes,
                 std::span<double> out) {
  if (identity_scopes) {
    for (std::size_t j = 0; j < forest.size(); ++j)
      out[j] = forest[j].eval(input);
    return;
  }
  thread_local std::vector<double> gather;
  for (std::size_t j = 0; j < forest.size(); ++j) {
    const std::vector<int>& scope = *forest[j].visible();
    gather.resize(scope.size());
    for (std::size_t k = 0; k < scope.size(); ++k)
      gather[k] = input[static_cast<std::size_t>(scope[k])];
    out[j] = forest[j].eval(gather);
  }
}

}  // namespace

AutoencoderIndividual random_individual(
    std::shared_ptr<const LayerTopology> topology, int max_depth,
    std::mt19937_64& rng) {
  if (!topology) throw std::invalid_argument("random_individual: null topology");
  AutoencoderIndividual ind;
  ind.topology = topology;
  ind.encoder.reserve(topology->encoder_scopes.size());
  ind.decoder.reserve(topology->decoder_scopes.size());
  for (const Scope& s : topology->encoder_scopes)
    ind.encoder.push_back(random_tree(s, max_depth, rng));
  for (const Scope& s : topology->decoder_scopes)
    ind.decoder.push_back(random_tree(s, max_depth, rng));
  return ind;
}

void encode(const AutoencoderIndividual& ind, std::span<const double> sample,
            std::span<double> code_out) {
  const LayerTopology& t = *ind.topology;
  if (static_cast<int>(sample.size()) != t.n_in)
    throw std::invalid_argument("encode: sample length != n_in");
  if (static_cast<int>(code_out.size()) != t.n_code)
    throw std::invalid_argument("encode: output length != n_code");
  eval_forest(ind.encoder, sample, t.encoder_identity, code_out);
}

void decode(const AutoencoderIndividual& ind, std::span<const double> code,
            std::span<double> out) {
  const LayerTopology& t = *ind.topology;
  if (static_cast<int>(code.size()) != t.n_code)
    throw std::invalid_argument("decode: code length != n_code");
  if (static_cast<int>(out.size()) != t.n_in)
    throw std::invalid_argument("decode: output length != n_in");
  eval_forest(ind.decoder, code, t.decoder_identity, out);
}

std::vector<double> encode(const AutoencoderIndividual& ind,
                           std::span<const double> sample) {
  std::vector<double> code(static_cast<std::size_t>(ind.topology->n_code));
  encode(ind, sample, code);
  return code;
}

std::vector<double> decode(const AutoencoderIndividual& ind,
                           std::span<const double> code) {
  std::vector<double> out(static_cast<std::size_t>(ind.topology->n_in));
  decode(ind, code, out);
  return out;
}

void EncoderModel::transform(std::span<const double> sample,
                             std::span<double> out) const {
  if (static_cast<int>(sample.size()) != topology->n_in)
    throw std::invalid_argument("transform: sample length != n_in");
  if (static_cast<int>(out.size()) != topology->n_code)
    throw std::invalid_argument("transform: output length != n_code");
  eval_forest(trees, sample, topology->encoder_identity, out);
}

EncoderModel split_encoder(const AutoencoderIndividual& ind) {
  return EncoderModel{ind.topology, ind.encoder};
}

bool scopes_match_topology(const AutoencoderIndividual& ind) {
  const LayerTopology& t = *ind.topology;
  if (ind.encoder.size() != t.encoder_scopes.size()) return false;
  if (ind.decoder.size() != t.decoder_scopes.size()) return false;
  for (std::size_t j = 0; j < ind.encoder.size(); ++j)
    if (*ind.encoder[j].visible() != *t.encoder_scopes[j]) return false;
  for (std::size_t i = 0; i < ind.decoder.size(); ++i)
    if (*ind.decoder[i].visible() != *t.decoder_scopes[i]) return false;
  return true;
}

}  // namespace gpae
