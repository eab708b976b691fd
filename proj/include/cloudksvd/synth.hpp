#ifndef CLOUDKSVD_SYNTH_HPP
#define CLOUDKSVD_SYNTH_HPP

#include <cstdint>
#include <vector>

#include "cloudksvd/dictionary.hpp"

namespace cksvd {

struct SynthConfig {
  std::size_t N = 10;    // sites
  std::size_t S_i = 100; // samples per site
  std::size_t n = 20;
  std::size_t K = 50;
  std::size_t T0 = 3;
  double sigma2 = 0.01;
  std::size_t subdict_size = 0;  // 0 -> ceil(0.9 K)
};

struct SynthData {
  Dictionary true_dict;
  std::vector<Mat> sites;                           // per-site n x S_i
  std::vector<std::vector<std::size_t>> subdicts;   // atom indices per site
};

// Ground-truth dictionary with columns uniform on the unit sphere; per site a
// random subdictionary, samples built from T0 atoms with standard normal
// coefficients plus N(0, sigma2) entry noise, then l2-normalized.
SynthData gen_synthetic_sites(const SynthConfig& cfg, std::uint64_t seed);

// Pooled data matrix (site columns concatenated in site order).
Mat pool_sites(const std::vector<Mat>& sites);

}  // namespace cksvd

#endif
