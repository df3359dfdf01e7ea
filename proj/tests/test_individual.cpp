#include <doctest.h>

#include "gpae/individual.hpp"
#include "gpae/sexpr.hpp"
#include "test_util.hpp"

using namespace gpae;

namespace {

std::shared_ptr<const LayerTopology> straightforward(int n_in, int n_code) {
  return std::make_shared<const LayerTopology>(
      build_topology_straightforward(n_in, n_code));
}

std::shared_ptr<const LayerTopology> partitioned(int n_in) {
  return std::make_shared<const LayerTopology>(
      build_topology_partitioned(n_in));
}

// Individual whose every tree is the given single-node terminal.
AutoencoderIndividual uniform_individual(
    std::shared_ptr<const LayerTopology> topo, TreeNode enc_leaf,
    TreeNode dec_leaf) {
  AutoencoderIndividual ind;
  ind.topology = topo;
  for (const Scope& s : topo->encoder_scopes)
    ind.encoder.push_back(ExprTree({enc_leaf}, s));
  for (const Scope& s : topo->decoder_scopes)
    ind.decoder.push_back(ExprTree({dec_leaf}, s));
  return ind;
}

}  // namespace

TEST_CASE("random_individual: forest sizes and scope invariants") {
  std::mt19937_64 rng(5);
  const auto ind = random_individual(straightforward(4, 3), 4, rng);
  CHECK(ind.encoder.size() == 3);
  CHECK(ind.decoder.size() == 4);
  CHECK_FALSE(ind.fitness.has_value());
  CHECK(scopes_match_topology(ind));
}

TEST_CASE("random_individual: deterministic per seed") {
  const auto topo = partitioned(8);
  std::mt19937_64 a(9), b(9);
  const auto ia = random_individual(topo, 4, a);
  const auto ib = random_individual(topo, 4, b);
  REQUIRE(ia.encoder.size() == ib.encoder.size());
  for (std::size_t j = 0; j < ia.encoder.size(); ++j)
    CHECK(ia.encoder[j] == ib.encoder[j]);
  for (std::size_t i = 0; i < ia.decoder.size(); ++i)
    CHECK(ia.decoder[i] == ib.decoder[i]);
}

TEST_CASE("random_individual: 100 partitioned individuals hold invariants") {
  const auto topo = partitioned(784);
  std::mt19937_64 rng(13);
  for (int i = 0; i < 100; ++i) {
    const auto ind = random_individual(topo, 4, rng);
    REQUIRE(scopes_match_topology(ind));
    for (const ExprTree& t : ind.encoder) REQUIRE(t.depth() <= 4);
    for (const ExprTree& t : ind.decoder) REQUIRE(t.depth() <= 4);
  }
}

TEST_CASE("encode: constant encoders give a constant code") {
  const auto ind = uniform_individual(straightforward(8, 6),
                                      TreeNode::constant(0.5),
                                      TreeNode::constant(0.0));
  std::vector<double> sample(8, 0.3);
  const auto code = encode(ind, sample);
  REQUIRE(code.size() == 6);
  for (const double v : code) CHECK(v == 0.5);
}

TEST_CASE("encode: identity wiring under the partitioned topology") {
  // encoder tree j = x0 reads the first feature of its block, i.e. input
  // 4*(j div 3)
  const auto ind = uniform_individual(partitioned(8), TreeNode::feature_ref(0),
                                      TreeNode::constant(0.0));
  const std::vector<double> sample = {.1, .2, .3, .4, .5, .6, .7, .8};
  const auto code = encode(ind, sample);
  REQUIRE(code.size() == 6);
  for (std::size_t j = 0; j < code.size(); ++j)
    CHECK(code[j] == sample[static_cast<std::size_t>(4 * (j / 3))]);
}

TEST_CASE("decode: zero decoders and shape contract") {
  const auto topo = partitioned(8);
  const auto ind = uniform_individual(topo, TreeNode::feature_ref(0),
                                      TreeNode::constant(0.0));
  std::vector<double> sample(8, 0.9);
  const auto out = decode(ind, encode(ind, sample));
  REQUIRE(out.size() == 8);
  for (const double v : out) CHECK(v == 0.0);
}

TEST_CASE("decode: block-local code duplication") {
  // decoder tree i = c(i mod 3): the reconstruction repeats the block's
  // code features
  const auto topo = partitioned(4);
  AutoencoderIndividual ind;
  ind.topology = topo;
  for (const Scope& s : topo->encoder_scopes)
    ind.encoder.push_back(ExprTree({TreeNode::feature_ref(0)}, s));
  for (std::size_t i = 0; i < topo->decoder_scopes.size(); ++i)
    ind.decoder.push_back(ExprTree(
        {TreeNode::feature_ref(static_cast<std::int32_t>(i % 3))},
        topo->decoder_scopes[i]));
  const std::vector<double> code = {.7, .8, .9};
  const auto out = decode(ind, code);
  CHECK(out == std::vector<double>{.7, .8, .9, .7});
}

TEST_CASE("encode/decode agree with the reference evaluator") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (const auto& topo : {straightforward(8, 6), partitioned(8)}) {
    const auto ind = random_individual(topo, 4, rng);
    for (int rep = 0; rep < 50; ++rep) {
      std::vector<double> sample(8);
      for (double& v : sample) v = unit(rng);
      const auto code = encode(ind, sample);
      for (std::size_t j = 0; j < code.size(); ++j) {
        const auto ref = testutil::ref_parse(serialize_tree(ind.encoder[j]));
        std::vector<double> local;
        for (const int g : *ind.encoder[j].visible())
          local.push_back(sample[static_cast<std::size_t>(g)]);
        REQUIRE(code[j] == testutil::ref_eval(*ref, local));
      }
      const auto out = decode(ind, code);
      for (std::size_t i = 0; i < out.size(); ++i) {
        const auto ref = testutil::ref_parse(serialize_tree(ind.decoder[i]));
        std::vector<double> local;
        for (const int g : *ind.decoder[i].visible())
          local.push_back(code[static_cast<std::size_t>(g)]);
        REQUIRE(out[i] == testutil::ref_eval(*ref, local));
      }
    }
  }
}

TEST_CASE("encode/decode are pure") {
  std::mt19937_64 rng(29);
  const auto ind = random_individual(partitioned(8), 4, rng);
  const std::vector<double> sample = {.1, .2, .3, .4, .5, .6, .7, .8};
  CHECK(encode(ind, sample) == encode(ind, sample));
  const auto code = encode(ind, sample);
  CHECK(decode(ind, code) == decode(ind, code));
}

TEST_CASE("block independence: outside perturbations cannot leak in") {
  std::mt19937_64 rng(31);
  const auto ind = random_individual(partitioned(8), 4, rng);
  std::vector<double> sample = {.1, .2, .3, .4, .5, .6, .7, .8};
  const auto before = decode(ind, encode(ind, sample));
  for (int f = 4; f < 8; ++f) sample[static_cast<std::size_t>(f)] = 0.99;
  const auto after = decode(ind, encode(ind, sample));
  for (int f = 0; f < 4; ++f)
    CHECK(before[static_cast<std::size_t>(f)] ==
          after[static_cast<std::size_t>(f)]);
}

TEST_CASE("split_encoder: code half of the forward pass") {
  std::mt19937_64 rng(37);
  const auto ind = random_individual(straightforward(8, 6), 4, rng);
  const EncoderModel enc = split_encoder(ind);
  CHECK(enc.trees.size() == 6);
  const std::vector<double> sample = {.1, .2, .3, .4, .5, .6, .7, .8};
  std::vector<double> out(6);
  enc.transform(sample, out);
  CHECK(out == encode(ind, sample));
}

TEST_CASE("errors: length mismatches") {
  std::mt19937_64 rng(41);
  const auto ind = random_individual(straightforward(8, 6), 4, rng);
  std::vector<double> bad(7, 0.0);
  CHECK_THROWS_AS(encode(ind, bad), std::invalid_argument);
  CHECK_THROWS_AS(decode(ind, bad), std::invalid_argument);
}
