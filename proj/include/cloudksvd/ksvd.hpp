#ifndef CLOUDKSVD_KSVD_HPP
#define CLOUDKSVD_KSVD_HPP

#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "cloudksvd/dictionary.hpp"
#include "cloudksvd/sparse_coding.hpp"

namespace cksvd {

enum class CodingMode { omp, lasso };

struct KsvdOptions {
  CodingMode coding = CodingMode::omp;
  CodingConfig lasso_cfg{};  // lasso mode; tau re-selected each iteration
  // When set, atom updates run exactly power_iters power iterations from a
  // per-(t,k) seeded q_init (mirrors the distributed budget). Otherwise the
  // tight eigensolver is used.
  std::optional<std::size_t> power_iters;
  Vec d_ref;  // sign-alignment reference; derived from the seed when empty
  bool record_snapshots = false;
  bool record_per_atom_error = false;
  std::vector<std::size_t> site_sizes;  // column partition, for per-site diagnostics
};

struct IterRecord {
  double repr_error = 0.0;
  double tau = std::numeric_limits<double>::quiet_NaN();
  double eta_tau = std::numeric_limits<double>::quiet_NaN();  // max_s ||x_s||_1 at coding
  std::vector<std::size_t> omega_sizes;
  std::size_t replaced_atoms = 0;
  // Snapshots (only with record_snapshots):
  Mat dict_before;          // dictionary used for coding this iteration
  Mat dict_after;
  CodeMatrix codes_coding;  // codes as produced by the coding stage
  std::vector<Mat> ekr_grams;                        // per k: E_kR E_kR^T
  std::vector<std::vector<double>> site_block_norms; // per k, per site: ||E_{i,k}||_2
  std::vector<double> per_atom_frobenius;            // ||Y - D X||_F after each atom update
};

struct LearnTrace {
  std::size_t n = 0, K = 0, T0 = 0;
  std::uint64_t seed = 0;
  bool has_snapshots = false;
  std::vector<std::size_t> site_sizes;
  Mat data;       // copy of Y (snapshots only)
  Mat dict_init;  // D^(0)
  std::vector<IterRecord> iters;
};

struct KsvdResult {
  Dictionary dict;
  CodeMatrix codes;
  LearnTrace trace;
};

// Best unit-left-factor rank-1 approximation of E_kR: d is the dominant
// eigenvector of E_kR E_kR^T sign-flipped so <d_ref, d> >= 0 (sgn(0) := +1),
// and x_row = d^T E_kR. Throws empty-energy when ||E_kR||_F < 1e-12.
std::pair<Vec, Vec> atom_update(const Mat& E_kR, const Vec& d_ref);

// Same contract but with a fixed power-iteration budget from q_init; shares
// the matvec path with the distributed update so single-site runs agree
// bitwise.
std::pair<Vec, Vec> atom_update_budget(const Mat& E_kR, const Vec& d_ref, const Vec& q_init,
                                       std::size_t T_p);

// Columns of E_k (current residual with atom k's contribution added back)
// restricted to the samples in omega.
Mat restricted_error_matrix(const Mat& Y, const Dictionary& D, const CodeMatrix& X,
                            std::size_t k, const std::vector<std::size_t>& omega);

// sum_s ||y_s - D x_s||_2
double residual_norm_sum(const Mat& Y, const Dictionary& D, const CodeMatrix& X);

// (1/(n S)) sum_s ||y_s - D x_s||_2
double representation_error(const Mat& Y, const Dictionary& D, const CodeMatrix& X);

// One sparse-coding + dictionary-update pass over all atoms.
std::pair<Dictionary, CodeMatrix> ksvd_iteration(const Mat& Y, const Dictionary& D,
                                                 std::size_t T0, const KsvdOptions& opt = {},
                                                 std::uint64_t seed = 0);

KsvdResult run_ksvd(const Mat& Y, std::size_t n, std::size_t K, std::size_t T0, std::size_t T_d,
                    std::uint64_t seed, const KsvdOptions& opt = {});

// Warm start from a given dictionary (online setting).
KsvdResult run_ksvd_warm(const Mat& Y, const Dictionary& D0, std::size_t T0, std::size_t T_d,
                         std::uint64_t seed, const KsvdOptions& opt = {});

// Independent per-site runs with the shared seed.
std::vector<KsvdResult> run_local_ksvd(const std::vector<Mat>& site_data, std::size_t n,
                                       std::size_t K, std::size_t T0, std::size_t T_d,
                                       std::uint64_t seed, const KsvdOptions& opt = {});

}  // namespace cksvd

#endif
