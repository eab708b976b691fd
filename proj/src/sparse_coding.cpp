#include "cloudksvd/sparse_coding.hpp"

#include <algorithm>
#include <cmath>

namespace cksvd {

Vec decode(const Dictionary& D, const SparseCode& x) {
  Vec y(D.dim(), 0.0);
  for (std::size_t t = 0; t < x.support.size(); ++t) {
    const std::size_t j = x.support[t];
    const double c = x.values[t];
    for (std::size_t i = 0; i < D.dim(); ++i) y[i] += c * D.atoms(i, j);
  }
  return y;
}

Vec residual(const Vec& y, const Dictionary& D, const SparseCode& x) {
  Vec r = y;
  for (std::size_t t = 0; t < x.support.size(); ++t) {
    const std::size_t j = x.support[t];
    const double c = x.values[t];
    for (std::size_t i = 0; i < D.dim(); ++i) r[i] -= c * D.atoms(i, j);
  }
  return r;
}

namespace {

void check_dictionary(const Dictionary& D) {
  for (std::size_t k = 0; k < D.atom_count(); ++k) {
    double n = 0.0;
    for (std::size_t i = 0; i < D.dim(); ++i) n += D.atoms(i, k) * D.atoms(i, k);
    if (n < 1e-24) throw Error(errc::invalid_dictionary, "zero dictionary atom");
  }
}

// Rows of Dt are atoms, so correlations scan contiguously.
Mat atom_rows(const Dictionary& D) { return transpose(D.atoms); }

double dot_row(const Mat& Dt, std::size_t j, const Vec& r) {
  const double* row = Dt.row_ptr(j);
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) s += row[i] * r[i];
  return s;
}

SparseCode finish_sorted(std::vector<std::size_t> support, Vec coeffs, std::size_t K) {
  std::vector<std::size_t> order(support.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return support[a] < support[b]; });
  SparseCode out;
  out.K = K;
  for (std::size_t i : order) {
    if (coeffs[i] == 0.0) continue;
    out.support.push_back(support[i]);
    out.values.push_back(coeffs[i]);
  }
  return out;
}

OmpTrace omp_core(const Vec& y, const Dictionary& D, const Mat& Dt, std::size_t T0) {
  const std::size_t n = D.dim();
  const std::size_t K = D.atom_count();
  if (T0 > K) throw Error(errc::invalid_config, "omp_encode: T0 exceeds atom count");

  OmpTrace trace;
  std::vector<std::size_t> support;
  Vec coeffs;
  Vec r = y;
  std::vector<char> used(K, 0);

  while (support.size() < T0) {
    if (norm2(r) < 1e-12) break;
    // argmax |<d_j, r>|, lowest index on ties
    std::size_t best = K;
    double best_abs = 0.0;
    for (std::size_t j = 0; j < K; ++j) {
      if (used[j]) continue;
      double c = std::abs(dot_row(Dt, j, r));
      if (c > best_abs) {
        best_abs = c;
        best = j;
      }
    }
    if (best == K || best_abs == 0.0) break;
    used[best] = 1;
    support.push_back(best);

    // least squares on the support: (G + ridge I) x = D_S^T y
    const std::size_t m = support.size();
    Mat G(m, m);
    Vec b(m);
    for (std::size_t a = 0; a < m; ++a) {
      const double* da = Dt.row_ptr(support[a]);
      for (std::size_t c = 0; c <= a; ++c) {
        const double* dc = Dt.row_ptr(support[c]);
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += da[i] * dc[i];
        G(a, c) = s;
        G(c, a) = s;
      }
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += da[i] * y[i];
      b[a] = s;
    }
    for (std::size_t a = 0; a < m; ++a) G(a, a) += 1e-12;
    coeffs = solve_spd(std::move(G), std::move(b));

    r = y;
    for (std::size_t a = 0; a < m; ++a) {
      const double* da = Dt.row_ptr(support[a]);
      for (std::size_t i = 0; i < n; ++i) r[i] -= coeffs[a] * da[i];
    }
    trace.step_residual_norms.push_back(norm2(r));
  }

  trace.code = finish_sorted(std::move(support), std::move(coeffs), K);
  return trace;
}

}  // namespace

SparseCode omp_encode(const Vec& y, const Dictionary& D, std::size_t T0) {
  check_dictionary(D);
  return omp_core(y, D, atom_rows(D), T0).code;
}

OmpTrace omp_encode_traced(const Vec& y, const Dictionary& D, std::size_t T0) {
  check_dictionary(D);
  return omp_core(y, D, atom_rows(D), T0);
}

namespace {

SparseCode lasso_core(const Vec& y, const Dictionary& D, const Mat& Dt, double tau,
                      const CodingConfig& cfg) {
  const std::size_t n = D.dim();
  const std::size_t K = D.atom_count();
  Vec x(K, 0.0);
  Vec r = y;  // r = y - D x, maintained incrementally
  Vec atom_sq(K);
  for (std::size_t j = 0; j < K; ++j) {
    const double* dj = Dt.row_ptr(j);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += dj[i] * dj[i];
    atom_sq[j] = s;
  }

  bool converged = false;
  for (std::size_t sweep = 0; sweep < cfg.lasso_max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (std::size_t j = 0; j < K; ++j) {
      const double* dj = Dt.row_ptr(j);
      double rho = 0.0;
      for (std::size_t i = 0; i < n; ++i) rho += dj[i] * r[i];
      rho += atom_sq[j] * x[j];
      double xj;
      if (rho > tau)
        xj = (rho - tau) / atom_sq[j];
      else if (rho < -tau)
        xj = (rho + tau) / atom_sq[j];
      else
        xj = 0.0;
      const double delta = xj - x[j];
      if (delta != 0.0) {
        for (std::size_t i = 0; i < n; ++i) r[i] -= delta * dj[i];
        x[j] = xj;
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    if (max_change < cfg.lasso_tol) {
      converged = true;
      break;
    }
  }

  SparseCode out;
  out.K = K;
  for (std::size_t j = 0; j < K; ++j) {
    if (x[j] != 0.0) {
      out.support.push_back(j);
      out.values.push_back(x[j]);
    }
  }
  if (!converged)
    throw LassoConvergenceError(std::move(out), "lasso_encode: sweep cap reached");
  return out;
}

}  // namespace

SparseCode lasso_encode(const Vec& y, const Dictionary& D, double tau, const CodingConfig& cfg) {
  if (tau < 0.0) throw Error(errc::invalid_config, "lasso_encode: tau must be >= 0");
  if (cfg.lasso_tol <= 0.0) throw Error(errc::invalid_config, "lasso_encode: tol must be > 0");
  check_dictionary(D);
  return lasso_core(y, D, atom_rows(D), tau, cfg);
}

double lasso_objective(const Vec& y, const Dictionary& D, const SparseCode& x, double tau) {
  Vec r = residual(y, D, x);
  return 0.5 * dot(r, r) + tau * norm1(x.values);
}

double select_tau_for_sparsity(const Vec& y, const Dictionary& D, std::size_t T0,
                               const CodingConfig& cfg) {
  if (T0 < 1) throw Error(errc::invalid_config, "select_tau_for_sparsity: T0 must be >= 1");
  check_dictionary(D);
  Mat Dt = atom_rows(D);

  double hi = 0.0;
  for (std::size_t j = 0; j < D.atom_count(); ++j)
    hi = std::max(hi, std::abs(dot_row(Dt, j, y)));
  if (hi == 0.0) return 0.0;  // y = 0: any tau gives the zero solution

  auto sparse_enough = [&](double tau) {
    // Feasibility probe only; a capped-out iterate is still informative.
    try {
      return lasso_core(y, D, Dt, tau, cfg).nnz() <= T0;
    } catch (const LassoConvergenceError& e) {
      return e.last_iterate.nnz() <= T0;
    }
  };

  double best = hi;  // tau = ||D^T y||_inf always yields x = 0
  double lo = 0.0;
  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (lo + hi);
    if (sparse_enough(mid)) {
      best = std::min(best, mid);
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return best;
}

std::vector<std::size_t> CodeMatrix::row_support(std::size_t k) const {
  std::vector<std::size_t> omega;
  for (std::size_t s = 0; s < cols.size(); ++s) {
    const SparseCode& c = cols[s];
    for (std::size_t t = 0; t < c.support.size(); ++t) {
      if (c.support[t] == k && c.values[t] != 0.0) {
        omega.push_back(s);
        break;
      }
    }
  }
  return omega;
}

double CodeMatrix::coeff(std::size_t k, std::size_t s) const {
  const SparseCode& c = cols[s];
  for (std::size_t t = 0; t < c.support.size(); ++t)
    if (c.support[t] == k) return c.values[t];
  return 0.0;
}

void CodeMatrix::set_coeff_on_support(std::size_t k, std::size_t s, double v) {
  SparseCode& c = cols[s];
  for (std::size_t t = 0; t < c.support.size(); ++t) {
    if (c.support[t] == k) {
      c.values[t] = v;
      return;
    }
  }
  throw Error(errc::invalid_input, "set_coeff_on_support: index not in support");
}

CodeMatrix omp_encode_all(const Mat& Y, const Dictionary& D, std::size_t T0) {
  check_dictionary(D);
  Mat Dt = atom_rows(D);
  CodeMatrix X;
  X.K = D.atom_count();
  X.cols.reserve(Y.cols());
  for (std::size_t s = 0; s < Y.cols(); ++s)
    X.cols.push_back(omp_core(Y.col(s), D, Dt, T0).code);
  return X;
}

CodeMatrix lasso_encode_all(const Mat& Y, const Dictionary& D, double tau,
                            const CodingConfig& cfg) {
  check_dictionary(D);
  Mat Dt = atom_rows(D);
  CodeMatrix X;
  X.K = D.atom_count();
  X.cols.reserve(Y.cols());
  for (std::size_t s = 0; s < Y.cols(); ++s)
    X.cols.push_back(lasso_core(Y.col(s), D, Dt, tau, cfg));
  return X;
}

}  // namespace cksvd
