#ifndef CLOUDKSVD_NETWORK_HPP
#define CLOUDKSVD_NETWORK_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "cloudksvd/linalg.hpp"

namespace cksvd {

// Undirected connected graph over N sites, self-loops always present.
struct Topology {
  std::size_t N = 0;
  std::vector<char> adj;  // row-major N x N, symmetric, true diagonal

  bool edge(std::size_t i, std::size_t j) const { return adj[i * N + j] != 0; }
  void set_edge(std::size_t i, std::size_t j) {
    adj[i * N + j] = 1;
    adj[j * N + i] = 1;
  }
  std::size_t degree_excl_self(std::size_t i) const;
  std::size_t edge_count_nonself() const;  // undirected pairs
  bool connected() const;                  // single BFS component
};

Topology make_complete_topology(std::size_t N);
Topology make_path_topology(std::size_t N);

// Samples each off-diagonal pair with probability p; resamples from an
// advanced stream while disconnected, up to 1000 attempts.
Topology gen_erdos_renyi_connected(std::size_t N, double p, std::uint64_t seed);

struct WeightMatrix {
  Mat W;
  Topology topology;
  std::size_t size() const { return topology.N; }
};

// w_ij = 1/(1 + max(deg_i, deg_j)) on non-self edges (degrees exclude the
// self-loop), diagonal absorbs the remainder. Doubly stochastic by symmetry.
WeightMatrix local_degree_weights(const Topology& top);

// Throws invalid-input if row/column sums deviate from 1 by more than 1e-12,
// any entry is negative, or support violates the topology.
void validate_weight_matrix(const WeightMatrix& wm);

// T_c synchronous rounds z <- W z applied to per-site vectors; neighbor sums
// run in ascending site order. Counts one vector per directed non-self edge
// per round into *comm_counter when given.
std::vector<Vec> consensus_rounds(std::vector<Vec> z, const WeightMatrix& wm, std::size_t rounds,
                                  std::size_t* comm_counter = nullptr);

// [W^rounds e_1]_i for every site (the sum-correction denominators).
Vec consensus_corrections(const WeightMatrix& wm, std::size_t rounds);

struct ConsensusRun {
  std::vector<Vec> estimates;  // corrected estimates of sum_j z_j^(0)
  Vec corrections;             // [W^{T_c} e_1]_i
  std::size_t rounds = 0;
  std::size_t comm_vectors = 0;
};

// Corrected consensus summation: T_c rounds, then divide by the correction.
// Throws correction-underflow if any correction falls below 1e-14.
ConsensusRun consensus_sum(const std::vector<Vec>& z_init, const WeightMatrix& wm,
                           std::size_t T_c);

// Smallest t >= 1 with max_i ||e_i^T W^t - (1/N) 1^T||_2 <= 1/2, by direct
// powering; throws mixing-time-overflow past 10,000.
std::size_t estimate_mixing_time(const WeightMatrix& wm);

// Plain-text square-matrix format: first line N, then N rows of N
// space-separated values.
void save_matrix_text(const Mat& m, const std::string& path);
Mat load_matrix_text(const std::string& path);
void save_topology_text(const Topology& top, const std::string& path);
Topology load_topology_text(const std::string& path);

}  // namespace cksvd

#endif
