#include "cloudksvd/network.hpp"

#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <sstream>

#include "cloudksvd/errors.hpp"
#include "cloudksvd/rng.hpp"

namespace cksvd {

std::size_t Topology::degree_excl_self(std::size_t i) const {
  std::size_t d = 0;
  for (std::size_t j = 0; j < N; ++j)
    if (j != i && edge(i, j)) ++d;
  return d;
}

std::size_t Topology::edge_count_nonself() const {
  std::size_t m = 0;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j < N; ++j)
      if (edge(i, j)) ++m;
  return m;
}

bool Topology::connected() const {
  if (N == 0) return false;
  std::vector<char> seen(N, 0);
  std::deque<std::size_t> queue{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!queue.empty()) {
    std::size_t i = queue.front();
    queue.pop_front();
    for (std::size_t j = 0; j < N; ++j) {
      if (!seen[j] && edge(i, j)) {
        seen[j] = 1;
        ++count;
        queue.push_back(j);
      }
    }
  }
  return count == N;
}

namespace {

Topology blank_topology(std::size_t N) {
  Topology t;
  t.N = N;
  t.adj.assign(N * N, 0);
  for (std::size_t i = 0; i < N; ++i) t.adj[i * N + i] = 1;
  return t;
}

}  // namespace

Topology make_complete_topology(std::size_t N) {
  Topology t = blank_topology(N);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j < N; ++j) t.set_edge(i, j);
  return t;
}

Topology make_path_topology(std::size_t N) {
  Topology t = blank_topology(N);
  for (std::size_t i = 0; i + 1 < N; ++i) t.set_edge(i, i + 1);
  return t;
}

Topology gen_erdos_renyi_connected(std::size_t N, double p, std::uint64_t seed) {
  if (N < 1) throw Error(errc::invalid_config, "gen_erdos_renyi_connected: N must be >= 1");
  if (!(p > 0.0 && p <= 1.0))
    throw Error(errc::invalid_config, "gen_erdos_renyi_connected: p must be in (0, 1]");
  for (std::uint64_t attempt = 0; attempt < 1000; ++attempt) {
    Rng rng(derive_seed(seed, stream::graph, attempt));
    Topology t = blank_topology(N);
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = i + 1; j < N; ++j)
        if (rng.uniform() < p) t.set_edge(i, j);
    if (t.connected()) return t;
  }
  throw Error(errc::topology_generation_failure,
              "gen_erdos_renyi_connected: 1000 disconnected samples (p too small for N?)");
}

WeightMatrix local_degree_weights(const Topology& top) {
  if (!top.connected())
    throw Error(errc::invalid_input, "local_degree_weights: topology not connected");
  const std::size_t N = top.N;
  std::vector<std::size_t> deg(N);
  for (std::size_t i = 0; i < N; ++i) deg[i] = top.degree_excl_self(i);

  WeightMatrix wm;
  wm.topology = top;
  wm.W = Mat(N, N, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    double off = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
      if (j == i || !top.edge(i, j)) continue;
      const double w = 1.0 / (1.0 + static_cast<double>(std::max(deg[i], deg[j])));
      wm.W(i, j) = w;
      off += w;
    }
    wm.W(i, i) = 1.0 - off;
  }
  validate_weight_matrix(wm);
  return wm;
}

void validate_weight_matrix(const WeightMatrix& wm) {
  const std::size_t N = wm.size();
  if (wm.W.rows() != N || wm.W.cols() != N)
    throw Error(errc::invalid_input, "weight matrix shape mismatch");
  for (std::size_t i = 0; i < N; ++i) {
    double row = 0.0, col = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
      if (wm.W(i, j) < 0.0) throw Error(errc::invalid_input, "weight matrix: negative entry");
      if (!wm.topology.edge(i, j) && wm.W(i, j) != 0.0)
        throw Error(errc::invalid_input, "weight matrix: support violates topology");
      row += wm.W(i, j);
      col += wm.W(j, i);
    }
    if (std::abs(row - 1.0) > 1e-12 || std::abs(col - 1.0) > 1e-12)
      throw Error(errc::invalid_input, "weight matrix: not doubly stochastic");
  }
}

std::vector<Vec> consensus_rounds(std::vector<Vec> z, const WeightMatrix& wm, std::size_t rounds,
                                  std::size_t* comm_counter) {
  const std::size_t N = wm.size();
  if (z.size() != N) throw Error(errc::invalid_input, "consensus_rounds: site count mismatch");
  const std::size_t dim = z.empty() ? 0 : z[0].size();
  for (const auto& v : z)
    if (v.size() != dim) throw Error(errc::invalid_input, "consensus_rounds: ragged vectors");

  const std::size_t directed_nonself = 2 * wm.topology.edge_count_nonself();
  std::vector<Vec> next(N, Vec(dim, 0.0));
  for (std::size_t r = 0; r < rounds; ++r) {
    for (std::size_t i = 0; i < N; ++i) {
      Vec& acc = next[i];
      acc.assign(dim, 0.0);
      for (std::size_t j = 0; j < N; ++j) {
        const double w = wm.W(i, j);
        if (w == 0.0) continue;
        const Vec& zj = z[j];
        for (std::size_t d = 0; d < dim; ++d) acc[d] += w * zj[d];
      }
    }
    z.swap(next);
    if (comm_counter) *comm_counter += directed_nonself;
  }
  return z;
}

Vec consensus_corrections(const WeightMatrix& wm, std::size_t rounds) {
  const std::size_t N = wm.size();
  Vec c(N, 0.0);
  c[0] = 1.0;
  Vec next(N, 0.0);
  for (std::size_t r = 0; r < rounds; ++r) {
    for (std::size_t i = 0; i < N; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < N; ++j) s += wm.W(i, j) * c[j];
      next[i] = s;
    }
    c.swap(next);
  }
  return c;
}

ConsensusRun consensus_sum(const std::vector<Vec>& z_init, const WeightMatrix& wm,
                           std::size_t T_c) {
  if (T_c < 1) throw Error(errc::invalid_config, "consensus_sum: T_c must be >= 1");
  ConsensusRun out;
  out.rounds = T_c;
  out.estimates = consensus_rounds(z_init, wm, T_c, &out.comm_vectors);
  out.corrections = consensus_corrections(wm, T_c);
  for (std::size_t i = 0; i < wm.size(); ++i) {
    if (out.corrections[i] < 1e-14)
      throw Error(errc::correction_underflow, "consensus_sum: correction underflow at a site");
    for (auto& x : out.estimates[i]) x /= out.corrections[i];
  }
  return out;
}

std::size_t estimate_mixing_time(const WeightMatrix& wm) {
  validate_weight_matrix(wm);
  const std::size_t N = wm.size();
  const double uniform = 1.0 / static_cast<double>(N);
  Mat P = wm.W;
  for (std::size_t t = 1; t <= 10000; ++t) {
    double worst = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < N; ++j) {
        const double d = P(i, j) - uniform;
        s += d * d;
      }
      worst = std::max(worst, s);
    }
    if (std::sqrt(worst) <= 0.5) return t;
    P = matmul(P, wm.W);
  }
  throw Error(errc::mixing_time_overflow, "estimate_mixing_time: cap of 10,000 exceeded");
}

void save_matrix_text(const Mat& m, const std::string& path) {
  if (m.rows() != m.cols()) throw Error(errc::invalid_input, "save_matrix_text: square only");
  std::ofstream f(path);
  if (!f) throw Error(errc::io_error, "cannot open for writing: " + path);
  f << m.rows() << "\n";
  char buf[32];
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      f << buf << (j + 1 == m.cols() ? "" : " ");
    }
    f << "\n";
  }
  if (!f) throw Error(errc::io_error, "write failed: " + path);
}

Mat load_matrix_text(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(errc::io_error, "cannot open: " + path);
  std::size_t N = 0;
  if (!(f >> N) || N == 0) throw Error(errc::format_error, "bad matrix header: " + path);
  Mat m(N, N);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j)
      if (!(f >> m(i, j))) throw Error(errc::format_error, "truncated matrix: " + path);
  return m;
}

void save_topology_text(const Topology& top, const std::string& path) {
  Mat m(top.N, top.N, 0.0);
  for (std::size_t i = 0; i < top.N; ++i)
    for (std::size_t j = 0; j < top.N; ++j) m(i, j) = top.edge(i, j) ? 1.0 : 0.0;
  save_matrix_text(m, path);
}

Topology load_topology_text(const std::string& path) {
  Mat m = load_matrix_text(path);
  Topology t;
  t.N = m.rows();
  t.adj.assign(t.N * t.N, 0);
  for (std::size_t i = 0; i < t.N; ++i)
    for (std::size_t j = 0; j < t.N; ++j)
      if (m(i, j) != 0.0) t.adj[i * t.N + j] = 1;
  for (std::size_t i = 0; i < t.N; ++i)
    if (!t.edge(i, i)) throw Error(errc::format_error, "topology missing self-loop: " + path);
  return t;
}

}  // namespace cksvd
