#ifndef CLOUDKSVD_DICTIONARY_HPP
#define CLOUDKSVD_DICTIONARY_HPP

#include <cstdint>

#include "cloudksvd/linalg.hpp"

namespace cksvd {

// Overcomplete dictionary: n x K matrix whose columns (atoms) have unit l2
// norm. K > n is the normal regime.
struct Dictionary {
  Mat atoms;  // n x K

  Dictionary() = default;
  explicit Dictionary(Mat m) : atoms(std::move(m)) {}

  std::size_t dim() const { return atoms.rows(); }
  std::size_t atom_count() const { return atoms.cols(); }

  Vec atom(std::size_t k) const { return atoms.col(k); }
  void set_atom(std::size_t k, const Vec& v) { atoms.set_col(k, v); }

  // max |1 - ||d_k||| over atoms
  double max_norm_deviation() const;
};

// i.i.d. standard normal entries from the seeded generator, columns
// normalized. Same (n, K, seed) gives a bit-identical dictionary.
Dictionary init_dictionary(std::size_t n, std::size_t K, std::uint64_t seed);

}  // namespace cksvd

#endif
