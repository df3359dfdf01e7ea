#pragma once

#include <optional>
#include <span>
#include <vector>

#include "gpae/topology.hpp"
#include "gpae/tree.hpp"

namespace gpae {

// Encoder forest + decoder forest joined by the code bus. The two forests
// are one unit of selection and are never split across individuals.
struct AutoencoderIndividual {
  std::shared_ptr<const LayerTopology> topology;
  std::vector<ExprTree> encoder;  // n_code trees
  std::vector<ExprTree> decoder;  // n_in trees
  std::optional<double> fitness;  // average MSE, lower is better
};

AutoencoderIndividual random_individual(
    std::shared_ptr<const LayerTopology> topology, int max_depth,
    std::mt19937_64& rng);

// code_out[j] = encoder tree j applied to its scope's slice of sample.
void encode(const AutoencoderIndividual& ind, std::span<const double> sample,
            std::span<double> code_out);
void decode(const AutoencoderIndividual& ind, std::span<const double> code,
            std::span<double> out);

std::vector<double> encode(const AutoencoderIndividual& ind,
                           std::span<const double> sample);
std::vector<double> decode(const AutoencoderIndividual& ind,
                           std::span<const double> code);

// Encoder-only model: the decoder is dropped once training is done and the
// compact representation is all that is needed.
struct EncoderModel {
  std::shared_ptr<const LayerTopology> topology;
  std::vector<ExprTree> trees;

  void transform(std::span<const double> sample, std::span<double> out) const;
};

EncoderModel split_encoder(const AutoencoderIndividual& ind);

// Structural check: forest sizes match the topology and every tree's
// visible-feature list equals its slot's scope. Run after genetic ops in
// tests and assertions.
bool scopes_match_topology(const AutoencoderIndividual& ind);

}  // namespace gpae
