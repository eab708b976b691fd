#ifndef CLOUDKSVD_LINALG_HPP
#define CLOUDKSVD_LINALG_HPP

#include <cstddef>
#include <vector>

namespace cksvd {

using Vec = std::vector<double>;

// Dense row-major matrix. All reductions over entries run left-to-right in
// index order so that repeated runs produce bit-identical results.
class Mat {
public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, double fill = 0.0);

  static Mat identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return d_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return d_[i * cols_ + j]; }

  double* row_ptr(std::size_t i) { return d_.data() + i * cols_; }
  const double* row_ptr(std::size_t i) const { return d_.data() + i * cols_; }

  const std::vector<double>& data() const { return d_; }
  std::vector<double>& data() { return d_; }

  Vec col(std::size_t j) const;
  void set_col(std::size_t j, const Vec& v);

  bool all_finite() const;

private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> d_;
};

double dot(const Vec& a, const Vec& b);
double norm2(const Vec& v);
double norm1(const Vec& v);
// Normalizes in place and returns the pre-normalization norm; leaves a zero
// vector untouched.
double normalize(Vec& v);

Vec matvec(const Mat& A, const Vec& x);    // A x
Vec matvec_t(const Mat& A, const Vec& x);  // A^T x
Mat matmul(const Mat& A, const Mat& B);
Mat transpose(const Mat& A);
Mat outer(const Vec& u, const Vec& v);  // u v^T
Mat aat(const Mat& A);                  // A A^T
Mat add_scaled(const Mat& A, const Mat& B, double s);  // A + s B

double fro_norm(const Mat& A);
double max_abs(const Mat& A);

// Cholesky solve for a small SPD system G x = b; G is modified in place.
// Throws invalid-input if a pivot collapses (G not SPD at working precision).
Vec solve_spd(Mat G, Vec b);

// sigma_1(A) by power iteration on A^T A, relative change < 1e-12 or 10,000
// iterations. Throws invalid-input on non-finite entries.
double spectral_norm(const Mat& A);

struct EigenPair {
  double value = 0.0;        // lambda_1
  double second_value = 0.0; // lambda_2 from one deflation step
  Vec vector;                // unit-norm eigenvector for lambda_1
  bool degenerate = false;   // lambda_1 ~ lambda_2 within 1e-12
};

// Dominant eigenpair of a symmetric PSD matrix by power iteration (tolerance
// 1e-14, cap 100,000), plus lambda_2 via a single deflation. The returned
// vector's largest-magnitude entry is made positive so the sign is stable.
// Throws invalid-input for asymmetric input.
EigenPair reference_top_eigenpair(const Mat& M);

// q <- normalize(M q), `iters` times. Throws power-collapse if ||M q|| falls
// below 1e-14.
Vec power_iterate(const Mat& M, Vec q, std::size_t iters);

}  // namespace cksvd

#endif
