#include "cloudksvd/linalg.hpp"

#include <cmath>
#include <cstdlib>

#include "cloudksvd/errors.hpp"
#include "cloudksvd/rng.hpp"

namespace cksvd {

Mat::Mat(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), d_(rows * cols, fill) {
  if (rows == 0 || cols == 0) throw Error(errc::invalid_input, "Mat: zero dimension");
}

Mat Mat::identity(std::size_t n) {
  Mat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vec Mat::col(std::size_t j) const {
  Vec v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
  return v;
}

void Mat::set_col(std::size_t j, const Vec& v) {
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

bool Mat::all_finite() const {
  for (double x : d_)
    if (!std::isfinite(x)) return false;
  return true;
}

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Vec& v) { return std::sqrt(dot(v, v)); }

double norm1(const Vec& v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

double normalize(Vec& v) {
  double n = norm2(v);
  if (n > 0.0)
    for (auto& x : v) x /= n;
  return n;
}

Vec matvec(const Mat& A, const Vec& x) {
  Vec y(A.rows(), 0.0);
  for (std::size_t i = 0; i < A.rows(); ++i) {
    const double* row = A.row_ptr(i);
    double s = 0.0;
    for (std::size_t j = 0; j < A.cols(); ++j) s += row[j] * x[j];
    y[i] = s;
  }
  return y;
}

Vec matvec_t(const Mat& A, const Vec& x) {
  Vec y(A.cols(), 0.0);
  for (std::size_t i = 0; i < A.rows(); ++i) {
    const double* row = A.row_ptr(i);
    const double xi = x[i];
    for (std::size_t j = 0; j < A.cols(); ++j) y[j] += row[j] * xi;
  }
  return y;
}

Mat matmul(const Mat& A, const Mat& B) {
  if (A.cols() != B.rows()) throw Error(errc::invalid_input, "matmul: dimension mismatch");
  Mat C(A.rows(), B.cols(), 0.0);
  for (std::size_t i = 0; i < A.rows(); ++i) {
    for (std::size_t k = 0; k < A.cols(); ++k) {
      const double a = A(i, k);
      if (a == 0.0) continue;
      const double* brow = B.row_ptr(k);
      double* crow = C.row_ptr(i);
      for (std::size_t j = 0; j < B.cols(); ++j) crow[j] += a * brow[j];
    }
  }
  return C;
}

Mat transpose(const Mat& A) {
  Mat T(A.cols(), A.rows());
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t j = 0; j < A.cols(); ++j) T(j, i) = A(i, j);
  return T;
}

Mat outer(const Vec& u, const Vec& v) {
  Mat M(u.size(), v.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) M(i, j) = u[i] * v[j];
  return M;
}

Mat aat(const Mat& A) {
  Mat M(A.rows(), A.rows(), 0.0);
  for (std::size_t i = 0; i < A.rows(); ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = 0.0;
      const double* ri = A.row_ptr(i);
      const double* rj = A.row_ptr(j);
      for (std::size_t k = 0; k < A.cols(); ++k) s += ri[k] * rj[k];
      M(i, j) = s;
      M(j, i) = s;
    }
  }
  return M;
}

Mat add_scaled(const Mat& A, const Mat& B, double s) {
  if (A.rows() != B.rows() || A.cols() != B.cols())
    throw Error(errc::invalid_input, "add_scaled: dimension mismatch");
  Mat C = A;
  for (std::size_t i = 0; i < C.data().size(); ++i) C.data()[i] += s * B.data()[i];
  return C;
}

double fro_norm(const Mat& A) {
  double s = 0.0;
  for (double x : A.data()) s += x * x;
  return std::sqrt(s);
}

double max_abs(const Mat& A) {
  double m = 0.0;
  for (double x : A.data()) m = std::max(m, std::abs(x));
  return m;
}

Vec solve_spd(Mat G, Vec b) {
  const std::size_t n = G.rows();
  if (G.cols() != n || b.size() != n) throw Error(errc::invalid_input, "solve_spd: shape");
  // In-place lower Cholesky.
  for (std::size_t j = 0; j < n; ++j) {
    double d = G(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= G(j, k) * G(j, k);
    if (d <= 0.0) throw Error(errc::invalid_input, "solve_spd: matrix not positive definite");
    d = std::sqrt(d);
    G(j, j) = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = G(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= G(i, k) * G(j, k);
      G(i, j) = s / d;
    }
  }
  // Forward then backward substitution.
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= G(i, k) * b[k];
    b[i] = s / G(i, i);
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= G(k, ii) * b[k];
    b[ii] = s / G(ii, ii);
  }
  return b;
}

namespace {

// Fixed pseudo-random start vector; avoids adversarial orthogonal starts while
// staying deterministic.
Vec start_vector(std::size_t n) {
  Rng rng(derive_seed(0x5eed, stream::misc, n));
  Vec v = rng.gaussian_vec(n);
  if (normalize(v) == 0.0) {
    v.assign(n, 0.0);
    v[0] = 1.0;
  }
  return v;
}

}  // namespace

double spectral_norm(const Mat& A) {
  if (!A.all_finite()) throw Error(errc::invalid_input, "spectral_norm: non-finite input");
  Vec v = start_vector(A.cols());
  double lambda = 0.0;
  for (int it = 0; it < 10000; ++it) {
    Vec w = matvec_t(A, matvec(A, v));  // A^T A v
    double nw = norm2(w);
    if (nw < 1e-300) return 0.0;
    for (auto& x : w) x /= nw;
    double lambda_new = nw;  // Rayleigh estimate of lambda(A^T A) after normalization
    v = w;
    if (std::abs(lambda_new - lambda) <= 1e-12 * std::max(1.0, std::abs(lambda_new)))
      return std::sqrt(lambda_new);
    lambda = lambda_new;
  }
  return std::sqrt(lambda);
}

namespace {

struct PowerOut {
  double lambda = 0.0;
  Vec vec;
};

PowerOut top_eigen_power(const Mat& M) {
  const std::size_t n = M.rows();
  Vec q = start_vector(n);
  double lambda = 0.0;
  for (int it = 0; it < 100000; ++it) {
    Vec w = matvec(M, q);
    double l = dot(q, w);  // Rayleigh quotient
    double nw = norm2(w);
    if (nw < 1e-300) return {0.0, q};
    for (auto& x : w) x /= nw;
    q = w;
    if (it > 0 && std::abs(l - lambda) <= 1e-14 * std::max(1.0, std::abs(l))) {
      lambda = l;
      break;
    }
    lambda = l;
  }
  return {lambda, q};
}

void canonical_sign(Vec& v) {
  std::size_t arg = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > best) {
      best = std::abs(v[i]);
      arg = i;
    }
  }
  if (v[arg] < 0.0)
    for (auto& x : v) x = -x;
}

}  // namespace

EigenPair reference_top_eigenpair(const Mat& M) {
  if (M.rows() != M.cols()) throw Error(errc::invalid_input, "reference_top_eigenpair: not square");
  if (!M.all_finite()) throw Error(errc::invalid_input, "reference_top_eigenpair: non-finite");
  const double scale = std::max(1.0, max_abs(M));
  for (std::size_t i = 0; i < M.rows(); ++i)
    for (std::size_t j = i + 1; j < M.cols(); ++j)
      if (std::abs(M(i, j) - M(j, i)) > 1e-10 * scale)
        throw Error(errc::invalid_input, "reference_top_eigenpair: asymmetric input");

  PowerOut top = top_eigen_power(M);
  EigenPair out;
  out.value = top.lambda;
  out.vector = top.vec;
  canonical_sign(out.vector);

  // One deflation step for lambda_2.
  Mat M2 = add_scaled(M, outer(out.vector, out.vector), -out.value);
  PowerOut second = top_eigen_power(M2);
  out.second_value = second.lambda;
  out.degenerate = std::abs(out.value - out.second_value) <= 1e-12 * std::max(1.0, out.value);
  return out;
}

Vec power_iterate(const Mat& M, Vec q, std::size_t iters) {
  for (std::size_t i = 0; i < iters; ++i) {
    Vec w = matvec(M, q);
    double nw = norm2(w);
    if (nw < 1e-14) throw Error(errc::power_collapse, "power_iterate: ||Mq|| underflow");
    for (auto& x : w) x /= nw;
    q = std::move(w);
  }
  return q;
}

}  // namespace cksvd

