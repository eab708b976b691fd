#ifndef CLOUDKSVD_SPARSE_CODING_HPP
#define CLOUDKSVD_SPARSE_CODING_HPP

#include <cstddef>
#include <vector>

#include "cloudksvd/dictionary.hpp"
#include "cloudksvd/errors.hpp"
#include "cloudksvd/linalg.hpp"

namespace cksvd {

// One sample's sparse code: strictly increasing support indices into
// {0..K-1} with aligned nonzero coefficients.
struct SparseCode {
  std::vector<std::size_t> support;
  Vec values;
  std::size_t K = 0;

  std::size_t nnz() const { return support.size(); }
};

struct CodingConfig {
  std::size_t T0 = 1;
  double lasso_tau = 0.0;
  double lasso_tol = 1e-8;
  std::size_t lasso_max_sweeps = 10000;
};

// Thrown when coordinate descent hits the sweep cap; carries the last iterate.
class LassoConvergenceError : public Error {
public:
  LassoConvergenceError(SparseCode last, const std::string& what)
      : Error(errc::convergence_failure, what), last_iterate(std::move(last)) {}
  SparseCode last_iterate;
};

Vec decode(const Dictionary& D, const SparseCode& x);
Vec residual(const Vec& y, const Dictionary& D, const SparseCode& x);

// Greedy OMP: pick the atom with the largest |<d_j, r>| (ties -> lowest
// index), re-solve least squares on the support (normal equations, ridge
// 1e-12), stop after T0 picks or when ||r|| < 1e-12.
SparseCode omp_encode(const Vec& y, const Dictionary& D, std::size_t T0);

struct OmpTrace {
  SparseCode code;
  std::vector<double> step_residual_norms;  // after each selection
};
OmpTrace omp_encode_traced(const Vec& y, const Dictionary& D, std::size_t T0);

// Cyclic coordinate descent with soft thresholding for
// (1/2)||y - D x||^2 + tau ||x||_1.
SparseCode lasso_encode(const Vec& y, const Dictionary& D, double tau, const CodingConfig& cfg);

double lasso_objective(const Vec& y, const Dictionary& D, const SparseCode& x, double tau);

// Bisection over tau in [0, ||D^T y||_inf], 60 probes; returns the smallest
// probed tau whose lasso solution has at most T0 nonzeros.
double select_tau_for_sparsity(const Vec& y, const Dictionary& D, std::size_t T0,
                               const CodingConfig& cfg = CodingConfig{});

// Column-sparse code matrix: one SparseCode per sample. Supports stay fixed
// once coded; dictionary-update write-backs only change values (zeros may
// appear transiently there).
struct CodeMatrix {
  std::size_t K = 0;
  std::vector<SparseCode> cols;

  std::size_t sample_count() const { return cols.size(); }
  // ordered list of samples whose row-k coefficient is nonzero
  std::vector<std::size_t> row_support(std::size_t k) const;
  double coeff(std::size_t k, std::size_t s) const;
  void set_coeff_on_support(std::size_t k, std::size_t s, double v);
};

CodeMatrix omp_encode_all(const Mat& Y, const Dictionary& D, std::size_t T0);
CodeMatrix lasso_encode_all(const Mat& Y, const Dictionary& D, double tau,
                            const CodingConfig& cfg);

}  // namespace cksvd

#endif
