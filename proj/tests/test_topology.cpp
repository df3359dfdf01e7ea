#include <doctest.h>

#include "gpae/topology.hpp"

using namespace gpae;

TEST_CASE("straightforward topology: full visibility both ways") {
  const LayerTopology t = build_topology_straightforward(784, 588);
  CHECK(t.kind == TopologyKind::kStraightforward);
  CHECK(t.encoder_scopes.size() == 588);
  CHECK(t.decoder_scopes.size() == 784);
  CHECK(t.encoder_scopes[0]->size() == 784);
  CHECK(t.decoder_scopes[0]->size() == 588);
  CHECK(t.encoder_identity);
  CHECK(t.decoder_identity);

  const LayerTopology tiny = build_topology_straightforward(4, 3);
  CHECK(tiny.encoder_scopes.size() == 3);
  CHECK(tiny.decoder_scopes.size() == 4);

  const LayerTopology faces = build_topology_straightforward(4096, 3072);
  CHECK(faces.encoder_scopes.size() == 3072);
  CHECK(faces.encoder_scopes.back()->size() == 4096);
}

TEST_CASE("straightforward topology: size violations") {
  CHECK_THROWS_AS(build_topology_straightforward(4, 4), ConfigError);
  CHECK_THROWS_AS(build_topology_straightforward(4, 0), ConfigError);
  CHECK_THROWS_AS(build_topology_straightforward(0, 3), ConfigError);
  CHECK_THROWS_AS(build_topology_straightforward(3, 4), ConfigError);
}

TEST_CASE("partitioned topology: block wiring") {
  const LayerTopology t = build_topology_partitioned(8);
  CHECK(t.kind == TopologyKind::kPartitioned);
  CHECK(t.n_code == 6);
  CHECK(t.blocks() == 2);
  REQUIRE(t.encoder_scopes.size() == 6);
  REQUIRE(t.decoder_scopes.size() == 8);
  CHECK(*t.encoder_scopes[0] == std::vector<int>{0, 1, 2, 3});
  CHECK(*t.encoder_scopes[2] == std::vector<int>{0, 1, 2, 3});
  CHECK(*t.encoder_scopes[3] == std::vector<int>{4, 5, 6, 7});
  CHECK(*t.encoder_scopes[5] == std::vector<int>{4, 5, 6, 7});
  CHECK(*t.decoder_scopes[0] == std::vector<int>{0, 1, 2});
  CHECK(*t.decoder_scopes[3] == std::vector<int>{0, 1, 2});
  CHECK(*t.decoder_scopes[4] == std::vector<int>{3, 4, 5});
  CHECK(*t.decoder_scopes[7] == std::vector<int>{3, 4, 5});
  CHECK_FALSE(t.encoder_identity);
}

TEST_CASE("partitioned topology: full image geometries") {
  const LayerTopology mnist = build_topology_partitioned(784);
  CHECK(mnist.blocks() == 196);
  CHECK(mnist.n_code == 588);
  CHECK(*mnist.encoder_scopes[3] == std::vector<int>{4, 5, 6, 7});
  CHECK(*mnist.decoder_scopes[783] == std::vector<int>{585, 586, 587});

  const LayerTopology faces = build_topology_partitioned(4096);
  CHECK(faces.blocks() == 1024);
  CHECK(faces.n_code == 3072);
}

TEST_CASE("partitioned topology: indivisible input is refused with remainder") {
  try {
    build_topology_partitioned(10);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("remainder 2") != std::string::npos);
  }
  CHECK_THROWS_AS(build_topology_partitioned(0), ConfigError);
}

TEST_CASE("default code size is the 3/4 compression") {
  CHECK(default_code_size(784) == 588);
  CHECK(default_code_size(4096) == 3072);
  CHECK(default_code_size(4) == 3);
  CHECK(default_code_size(5) == 4);  // ceil(15/4)
}

TEST_CASE("search space log2") {
  CHECK(search_space_log2(32, 4, 4096) == 8197.0);
  CHECK(search_space_log2(1, 7, 0) == 0.0);
  CHECK(search_space_log2(2, 2, 10) == 11.0);
}
