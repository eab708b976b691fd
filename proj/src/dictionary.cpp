#include "cloudksvd/dictionary.hpp"

#include <cmath>

#include "cloudksvd/errors.hpp"
#include "cloudksvd/rng.hpp"

namespace cksvd {

double Dictionary::max_norm_deviation() const {
  double worst = 0.0;
  for (std::size_t k = 0; k < atom_count(); ++k) {
    Vec d = atom(k);
    worst = std::max(worst, std::abs(1.0 - norm2(d)));
  }
  return worst;
}

Dictionary init_dictionary(std::size_t n, std::size_t K, std::uint64_t seed) {
  if (n < 1 || K < 1) throw Error(errc::invalid_config, "init_dictionary: n, K must be >= 1");
  Rng rng(seed);
  Mat D(n, K);
  for (std::size_t k = 0; k < K; ++k) {
    Vec col = rng.gaussian_vec(n);
    while (normalize(col) == 0.0) col = rng.gaussian_vec(n);
    D.set_col(k, col);
  }
  return Dictionary(std::move(D));
}

}  // namespace cksvd
