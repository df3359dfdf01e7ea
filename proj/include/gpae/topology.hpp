#pragma once

#include <memory>
#include <vector>

#include "gpae/tree.hpp"

namespace gpae {

enum class TopologyKind { kStraightforward, kPartitioned };

// Wiring plan for one autoencoder layer: which input features each encoder
// tree may read and which code features each decoder tree may read.
struct LayerTopology {
  TopologyKind kind = TopologyKind::kStraightforward;
  int n_in = 0;
  int n_code = 0;
  std::vector<Scope> encoder_scopes;  // n_code entries, indices into [0, n_in)
  std::vector<Scope> decoder_scopes;  // n_in entries, indices into [0, n_code)
  bool encoder_identity = false;  // every encoder scope is 0..n_in-1
  bool decoder_identity = false;

  int blocks() const {
    return kind == TopologyKind::kPartitioned ? n_in / 4 : 1;
  }
};

int default_code_size(int n_in);  // ceil(3*n_in/4)

// Every encoder tree sees all inputs, every decoder tree sees all code
// features. Requires 0 < n_code < n_in.
LayerTopology build_topology_straightforward(int n_in, int n_code);

// n_in/4 mini-autoencoder blocks: block i reads inputs {4i..4i+3} and owns
// code features {3i..3i+2}. n_in must be divisible by 4.
LayerTopology build_topology_partitioned(int n_in);

// The 4-in/3-code block of a partitioned topology, as a standalone wiring
// over local indices; used by the per-block evolution engines.
LayerTopology build_block_topology();

// log2(m * K^n): size of the straightforward search space on a log scale.
double search_space_log2(double m, double k, double n);

}  // namespace gpae
