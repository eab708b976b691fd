#ifndef CLOUDKSVD_CLOUD_HPP
#define CLOUDKSVD_CLOUD_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "cloudksvd/ksvd.hpp"
#include "cloudksvd/network.hpp"

namespace cksvd {

struct CloudConfig {
  std::size_t K = 1;
  std::size_t T0 = 1;
  std::size_t T_d = 1;
  std::size_t T_p = 1;
  std::size_t T_c = 1;
  std::uint64_t seed = 0;
  Vec d_ref;  // unit reference; derived from seed when empty
  CodingMode coding = CodingMode::omp;
  CodingConfig lasso_cfg{};
  bool record_dictionaries = false;  // per-t per-site dictionary snapshots
  bool record_power_parts = false;   // per-(t,k) M_i parts and q_init
};

struct CloudTkRecord {
  std::size_t t = 0, k = 0;  // 1-based
  std::vector<std::size_t> omega_sizes;  // per site
  std::vector<double> e_block_fro;       // per site ||E_i||_F (0 for empty support)
  bool reseeded = false;
  std::size_t comm_vectors = 0;
  std::vector<Mat> m_parts;  // record_power_parts
  Vec q_init;                // record_power_parts
};

struct CloudTrace {
  std::size_t N = 0, n = 0, K = 0, T0 = 0, T_d = 0, T_p = 0, T_c = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> site_sizes;
  Vec corrections;  // [W^{T_c} e_1]_i, fixed across the run
  std::vector<CloudTkRecord> tk;          // T_d * K records
  std::vector<double> repr_error_per_t;
  std::vector<std::vector<Mat>> dicts_per_t;  // [t][site], record_dictionaries
  std::size_t edge_count_nonself = 0;
};

struct CloudResult {
  std::vector<Dictionary> dicts;
  std::vector<CodeMatrix> codes;
  CloudTrace trace;
};

// q unchanged when <d_ref, q> >= 0, negated otherwise (sgn(0) := +1).
Vec sign_align(const Vec& d_ref, Vec q);

struct DpmOptions {
  bool record_iterates = false;
};

struct DpmResult {
  std::vector<Vec> finals;                 // per-site unit estimates after T_p iterations
  std::vector<std::vector<Vec>> iterates;  // [t_p][site], when recorded
  Vec corrections;
  std::size_t comm_vectors = 0;
};

// Steps 7-17: per power iteration each site applies its local part, T_c
// consensus rounds approximate the network sum, the correction rescales it,
// and the site normalizes. Rescaling by a positive correction does not change
// the normalized direction, so when a correction is structurally zero (site
// farther than T_c hops from site 1) the division is skipped rather than
// producing an overflow. Throws power-collapse when a site's iterate norm
// falls below 1e-14.
DpmResult distributed_power_method(const std::vector<Mat>& m_parts, const WeightMatrix& wm,
                                   std::size_t T_p, std::size_t T_c, const Vec& q_init,
                                   const DpmOptions& opt = {});

// Full collaborative dictionary learning round structure: local sparse
// coding, per-atom distributed rank-1 updates, sign alignment against the
// shared reference, and local coefficient write-back.
CloudResult cloud_ksvd_run(const std::vector<Mat>& site_data, const WeightMatrix& wm,
                           const CloudConfig& cfg);

// CSV with one row per (t, k, site) plus a manifest of every config field.
void save_cloud_trace_csv(const CloudTrace& trace, const std::string& path);
void save_cloud_manifest(const CloudTrace& trace, const CloudConfig& cfg,
                         const std::string& path);

}  // namespace cksvd

#endif
