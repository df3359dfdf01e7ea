#include "gpae/topology.hpp"

#include <cmath>
#include <string>

namespace gpae {

int default_code_size(int n_in) { return (3 * n_in + 3) / 4; }

LayerTopology build_topology_straightforward(int n_in, int n_code) {
  if (n_in <= 0 || n_code <= 0 || n_code >= n_in)
    throw ConfigError("straightforward topology requires 0 < n_code < n_in, got n_in=" +
                      std::to_string(n_in) + " n_code=" + std::to_string(n_code));
  LayerTopology t;
  t.kind = TopologyKind::kStraightforward;
  t.n_in = n_in;
  t.n_code = n_code;
  const Scope in_scope = identity_scope(n_in);
  const Scope code_scope = identity_scope(n_code);
  t.encoder_scopes.assign(static_cast<std::size_t>(n_code), in_scope);
  t.decoder_scopes.assign(static_cast<std::size_t>(n_in), code_scope);
  t.encoder_identity = true;
  t.decoder_identity = true;
  return t;
}

LayerTopology build_topology_partitioned(int n_in) {
  if (n_in <= 0)
    throw ConfigError("partitioned topology requires n_in > 0");
  if (n_in % 4 != 0)
    throw ConfigError("partitioned topology requires n_in divisible by 4; n_in=" +
                      std::to_string(n_in) + " leaves remainder " +
                      std::to_string(n_in % 4));
  LayerTopology t;
  t.kind = TopologyKind::kPartitioned;
  t.n_in = n_in;
  t.n_code = 3 * n_in / 4;
  const int c = n_in / 4;
  t.encoder_scopes.reserve(static_cast<std::size_t>(t.n_code));
  t.decoder_scopes.reserve(static_cast<std::size_t>(n_in));
  for (int b = 0; b < c; ++b) {
    const Scope in_b = make_scope({4 * b, 4 * b + 1, 4 * b + 2, 4 * b + 3});
    const Scope code_b = make_scope({3 * b, 3 * b + 1, 3 * b + 2});
    for (int j = 0; j < 3; ++j) t.encoder_scopes.push_back(in_b);
    for (int i = 0; i < 4; ++i) t.decoder_scopes.push_back(code_b);
  }
  return t;
}

LayerTopology build_block_topology() {
  return build_topology_straightforward(4, 3);
}

double search_space_log2(double m, double k, double n) {
  return std::log2(m) + n * std::log2(k);
}

}  // namespace gpae
