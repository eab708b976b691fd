#include "cloudksvd/ksvd.hpp"

#include <cmath>

#include "cloudksvd/errors.hpp"
#include "cloudksvd/rng.hpp"

namespace cksvd {

namespace {

Vec unit_gaussian(Rng& rng, std::size_t n) {
  Vec v = rng.gaussian_vec(n);
  while (normalize(v) == 0.0) v = rng.gaussian_vec(n);
  return v;
}

void apply_sign(const Vec& d_ref, Vec& q) {
  if (dot(d_ref, q) < 0.0)
    for (auto& x : q) x = -x;
}

}  // namespace

std::pair<Vec, Vec> atom_update(const Mat& E_kR, const Vec& d_ref) {
  if (fro_norm(E_kR) < 1e-12)
    throw Error(errc::empty_energy, "atom_update: restricted error matrix has no energy");
  EigenPair top = reference_top_eigenpair(aat(E_kR));
  Vec d = top.vector;
  apply_sign(d_ref, d);
  return {d, matvec_t(E_kR, d)};
}

std::pair<Vec, Vec> atom_update_budget(const Mat& E_kR, const Vec& d_ref, const Vec& q_init,
                                       std::size_t T_p) {
  if (fro_norm(E_kR) < 1e-12)
    throw Error(errc::empty_energy, "atom_update_budget: restricted error matrix has no energy");
  Vec d = power_iterate(aat(E_kR), q_init, T_p);
  apply_sign(d_ref, d);
  return {d, matvec_t(E_kR, d)};
}

Mat restricted_error_matrix(const Mat& Y, const Dictionary& D, const CodeMatrix& X,
                            std::size_t k, const std::vector<std::size_t>& omega) {
  const std::size_t n = Y.rows();
  Mat E(n, omega.size());
  for (std::size_t c = 0; c < omega.size(); ++c) {
    const std::size_t s = omega[c];
    Vec col = Y.col(s);
    const SparseCode& code = X.cols[s];
    for (std::size_t t = 0; t < code.support.size(); ++t) {
      const std::size_t j = code.support[t];
      if (j == k) continue;
      const double cj = code.values[t];
      for (std::size_t i = 0; i < n; ++i) col[i] -= cj * D.atoms(i, j);
    }
    E.set_col(c, col);
  }
  return E;
}

double residual_norm_sum(const Mat& Y, const Dictionary& D, const CodeMatrix& X) {
  if (Y.cols() != X.sample_count())
    throw Error(errc::invalid_input, "residual_norm_sum: sample count mismatch");
  double sum = 0.0;
  for (std::size_t s = 0; s < Y.cols(); ++s) {
    Vec r = Y.col(s);
    const SparseCode& code = X.cols[s];
    for (std::size_t t = 0; t < code.support.size(); ++t) {
      const std::size_t j = code.support[t];
      const double cj = code.values[t];
      for (std::size_t i = 0; i < Y.rows(); ++i) r[i] -= cj * D.atoms(i, j);
    }
    sum += norm2(r);
  }
  return sum;
}

double representation_error(const Mat& Y, const Dictionary& D, const CodeMatrix& X) {
  return residual_norm_sum(Y, D, X) /
         (static_cast<double>(Y.rows()) * static_cast<double>(Y.cols()));
}

namespace {

double fro_of_residual(const Mat& Y, const Dictionary& D, const CodeMatrix& X) {
  double sum = 0.0;
  for (std::size_t s = 0; s < Y.cols(); ++s) {
    Vec r = Y.col(s);
    const SparseCode& code = X.cols[s];
    for (std::size_t t = 0; t < code.support.size(); ++t) {
      const std::size_t j = code.support[t];
      const double cj = code.values[t];
      for (std::size_t i = 0; i < Y.rows(); ++i) r[i] -= cj * D.atoms(i, j);
    }
    sum += dot(r, r);
  }
  return std::sqrt(sum);
}

// Largest-residual data column, ties by lowest index; used to revive atoms
// whose row support is empty.
Vec worst_represented_column(const Mat& Y, const Dictionary& D, const CodeMatrix& X) {
  std::size_t arg = 0;
  double worst = -1.0;
  for (std::size_t s = 0; s < Y.cols(); ++s) {
    Vec r = Y.col(s);
    const SparseCode& code = X.cols[s];
    for (std::size_t t = 0; t < code.support.size(); ++t) {
      const std::size_t j = code.support[t];
      const double cj = code.values[t];
      for (std::size_t i = 0; i < Y.rows(); ++i) r[i] -= cj * D.atoms(i, j);
    }
    const double rn = norm2(r);
    if (rn > worst) {
      worst = rn;
      arg = s;
    }
  }
  Vec d = Y.col(arg);
  if (normalize(d) == 0.0) {
    d.assign(Y.rows(), 0.0);
    d[0] = 1.0;
  }
  return d;
}

struct IterationInputs {
  const Mat& Y;
  std::size_t T0;
  const KsvdOptions& opt;
  std::uint64_t seed;
  std::size_t t;  // 1-based dictionary-learning iteration, for seeded streams
  const Vec& d_ref;
};

void site_block_norms_of(const Mat& Y, const Dictionary& D, const CodeMatrix& X, std::size_t k,
                         const std::vector<std::size_t>& site_sizes,
                         std::vector<double>& out) {
  // Full E_k (all S columns, atom k's contribution added back), then the
  // spectral norm of each site's column block.
  const std::size_t n = Y.rows();
  Mat E(n, Y.cols());
  for (std::size_t s = 0; s < Y.cols(); ++s) {
    Vec col = Y.col(s);
    const SparseCode& code = X.cols[s];
    for (std::size_t t = 0; t < code.support.size(); ++t) {
      const std::size_t j = code.support[t];
      if (j == k) continue;
      const double cj = code.values[t];
      for (std::size_t i = 0; i < n; ++i) col[i] -= cj * D.atoms(i, j);
    }
    E.set_col(s, col);
  }
  out.clear();
  std::size_t start = 0;
  for (std::size_t sz : site_sizes) {
    Mat block(n, sz);
    for (std::size_t c = 0; c < sz; ++c)
      for (std::size_t i = 0; i < n; ++i) block(i, c) = E(i, start + c);
    out.push_back(spectral_norm(block));
    start += sz;
  }
}

IterRecord ksvd_iteration_inplace(Dictionary& D, CodeMatrix& X_out, const IterationInputs& in) {
  const Mat& Y = in.Y;
  const KsvdOptions& opt = in.opt;
  const std::size_t K = D.atom_count();
  IterRecord rec;

  if (opt.record_snapshots) rec.dict_before = D.atoms;

  // Sparse coding stage.
  CodeMatrix X;
  if (opt.coding == CodingMode::omp) {
    X = omp_encode_all(Y, D, in.T0);
  } else {
    // One tau per iteration, large enough that every sample meets the
    // sparsity budget.
    double tau = 0.0;
    for (std::size_t s = 0; s < Y.cols(); ++s)
      tau = std::max(tau, select_tau_for_sparsity(Y.col(s), D, in.T0, opt.lasso_cfg));
    X = lasso_encode_all(Y, D, tau, opt.lasso_cfg);
    rec.tau = tau;
    double eta = 0.0;
    for (const auto& c : X.cols) eta = std::max(eta, norm1(c.values));
    rec.eta_tau = eta;
  }
  if (opt.record_snapshots) rec.codes_coding = X;

  // Dictionary update stage; supports are frozen for the whole k-loop.
  std::vector<std::vector<std::size_t>> omegas(K);
  for (std::size_t k = 0; k < K; ++k) omegas[k] = X.row_support(k);

  for (std::size_t k = 0; k < K; ++k) {
    const auto& omega = omegas[k];
    rec.omega_sizes.push_back(omega.size());

    bool replace = omega.empty();
    if (!replace) {
      Mat E = restricted_error_matrix(Y, D, X, k, omega);
      if (opt.record_snapshots) {
        rec.ekr_grams.push_back(aat(E));
        if (!opt.site_sizes.empty()) {
          rec.site_block_norms.emplace_back();
          site_block_norms_of(Y, D, X, k, opt.site_sizes, rec.site_block_norms.back());
        }
      }
      if (fro_norm(E) < 1e-12) {
        replace = true;
      } else {
        std::pair<Vec, Vec> upd;
        try {
          if (opt.power_iters) {
            Rng qrng(derive_seed(in.seed, stream::q_init, in.t, k + 1));
            Vec q0 = unit_gaussian(qrng, Y.rows());
            upd = atom_update_budget(E, in.d_ref, q0, *opt.power_iters);
          } else {
            upd = atom_update(E, in.d_ref);
          }
        } catch (const Error& e) {
          if (e.code() != errc::power_collapse && e.code() != errc::empty_energy) throw;
          replace = true;
        }
        if (!replace) {
          D.set_atom(k, upd.first);
          for (std::size_t c = 0; c < omega.size(); ++c)
            X.set_coeff_on_support(k, omega[c], upd.second[c]);
        }
      }
    } else if (opt.record_snapshots) {
      rec.ekr_grams.emplace_back();
      if (!opt.site_sizes.empty()) rec.site_block_norms.emplace_back();
    }

    if (replace) {
      D.set_atom(k, worst_represented_column(Y, D, X));
      rec.replaced_atoms += 1;
    }

    if (opt.record_per_atom_error) rec.per_atom_frobenius.push_back(fro_of_residual(Y, D, X));
  }

  rec.repr_error = representation_error(Y, D, X);
  if (opt.record_snapshots) rec.dict_after = D.atoms;
  X_out = std::move(X);
  return rec;
}

KsvdResult run_from(const Mat& Y, Dictionary D, std::size_t T0, std::size_t T_d,
                    std::uint64_t seed, KsvdOptions opt) {
  if (T_d < 1) throw Error(errc::invalid_config, "run_ksvd: T_d must be >= 1");
  if (T0 < 1 || T0 > D.atom_count()) throw Error(errc::invalid_config, "run_ksvd: bad T0");
  if (opt.d_ref.empty()) {
    Rng r(derive_seed(seed, stream::d_ref));
    opt.d_ref = unit_gaussian(r, Y.rows());
  }

  KsvdResult out;
  out.trace.n = Y.rows();
  out.trace.K = D.atom_count();
  out.trace.T0 = T0;
  out.trace.seed = seed;
  out.trace.site_sizes = opt.site_sizes;
  out.trace.has_snapshots = opt.record_snapshots;
  out.trace.dict_init = D.atoms;
  if (opt.record_snapshots) out.trace.data = Y;

  CodeMatrix X;
  for (std::size_t t = 1; t <= T_d; ++t) {
    IterationInputs in{Y, T0, opt, seed, t, opt.d_ref};
    out.trace.iters.push_back(ksvd_iteration_inplace(D, X, in));
  }
  out.dict = std::move(D);
  out.codes = std::move(X);
  return out;
}

}  // namespace

std::pair<Dictionary, CodeMatrix> ksvd_iteration(const Mat& Y, const Dictionary& D,
                                                 std::size_t T0, const KsvdOptions& opt,
                                                 std::uint64_t seed) {
  KsvdOptions o = opt;
  if (o.d_ref.empty()) {
    Rng r(derive_seed(seed, stream::d_ref));
    o.d_ref = unit_gaussian(r, Y.rows());
  }
  Dictionary Dc = D;
  CodeMatrix X;
  IterationInputs in{Y, T0, o, seed, 1, o.d_ref};
  ksvd_iteration_inplace(Dc, X, in);
  return {std::move(Dc), std::move(X)};
}

KsvdResult run_ksvd(const Mat& Y, std::size_t n, std::size_t K, std::size_t T0, std::size_t T_d,
                    std::uint64_t seed, const KsvdOptions& opt) {
  if (Y.rows() != n) throw Error(errc::invalid_config, "run_ksvd: Y rows != n");
  return run_from(Y, init_dictionary(n, K, seed), T0, T_d, seed, opt);
}

KsvdResult run_ksvd_warm(const Mat& Y, const Dictionary& D0, std::size_t T0, std::size_t T_d,
                         std::uint64_t seed, const KsvdOptions& opt) {
  if (Y.rows() != D0.dim()) throw Error(errc::invalid_config, "run_ksvd_warm: dimension mismatch");
  return run_from(Y, D0, T0, T_d, seed, opt);
}

std::vector<KsvdResult> run_local_ksvd(const std::vector<Mat>& site_data, std::size_t n,
                                       std::size_t K, std::size_t T0, std::size_t T_d,
                                       std::uint64_t seed, const KsvdOptions& opt) {
  std::vector<KsvdResult> out;
  out.reserve(site_data.size());
  for (const Mat& Y : site_data) out.push_back(run_ksvd(Y, n, K, T0, T_d, seed, opt));
  return out;
}

}  // namespace cksvd
