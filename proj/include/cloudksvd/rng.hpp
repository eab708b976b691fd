#ifndef CLOUDKSVD_RNG_HPP
#define CLOUDKSVD_RNG_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace cksvd {

// Purpose tags for deriving independent substreams from one master seed.
// Derivation is stateless, so a re-draw in one stream never shifts another;
// centralized and distributed runs see the same q_init at the same (t, k).
enum class stream : std::uint64_t {
  dict_init = 1,
  d_ref = 2,
  q_init = 3,
  atom_reseed = 4,
  graph = 5,
  true_dict = 6,
  site_subdict = 7,
  site_data = 8,
  data_split = 9,
  power_parts = 10,
  misc = 11,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, stream tag, std::uint64_t a = 0,
                                 std::uint64_t b = 0) {
  std::uint64_t s = splitmix64(master ^ 0x6a09e667f3bcc908ULL);
  s = splitmix64(s ^ static_cast<std::uint64_t>(tag));
  s = splitmix64(s ^ a);
  s = splitmix64(s ^ b);
  return s;
}

// Deterministic generator: mt19937_64 is bit-specified by the standard and the
// uniform/gaussian maps below avoid the implementation-defined std distributions.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // in [0, 1)
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller; computes a fresh pair every other call.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  std::vector<double> gaussian_vec(std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = gaussian();
    return v;
  }

  // uniform integer in [0, n)
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
  }

  // k distinct indices from [0, n), ascending
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

inline std::vector<std::size_t> Rng::sample_without_replacement(std::size_t n, std::size_t k) {
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + index(n - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace cksvd

#endif
