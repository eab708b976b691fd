#include "cloudksvd/synth.hpp"

#include <cmath>

#include "cloudksvd/errors.hpp"
#include "cloudksvd/rng.hpp"

namespace cksvd {

SynthData gen_synthetic_sites(const SynthConfig& cfg, std::uint64_t seed) {
  std::size_t sub = cfg.subdict_size;
  if (sub == 0) sub = static_cast<std::size_t>(std::ceil(0.9 * static_cast<double>(cfg.K)));
  if (sub > cfg.K || cfg.T0 > sub)
    throw Error(errc::invalid_config, "gen_synthetic_sites: subdictionary size out of range");

  SynthData out;
  {
    Rng rng(derive_seed(seed, stream::true_dict));
    Mat D(cfg.n, cfg.K);
    for (std::size_t k = 0; k < cfg.K; ++k) {
      Vec col = rng.gaussian_vec(cfg.n);
      while (normalize(col) == 0.0) col = rng.gaussian_vec(cfg.n);
      D.set_col(k, col);
    }
    out.true_dict = Dictionary(std::move(D));
  }

  const double noise_sd = std::sqrt(cfg.sigma2);
  for (std::size_t i = 0; i < cfg.N; ++i) {
    Rng sub_rng(derive_seed(seed, stream::site_subdict, i));
    std::vector<std::size_t> atoms = sub_rng.sample_without_replacement(cfg.K, sub);
    out.subdicts.push_back(atoms);

    Rng rng(derive_seed(seed, stream::site_data, i));
    Mat Y(cfg.n, cfg.S_i);
    for (std::size_t s = 0; s < cfg.S_i; ++s) {
      std::vector<std::size_t> pick = rng.sample_without_replacement(sub, cfg.T0);
      Vec y(cfg.n, 0.0);
      for (std::size_t t = 0; t < cfg.T0; ++t) {
        const double c = rng.gaussian();
        const std::size_t k = atoms[pick[t]];
        for (std::size_t r = 0; r < cfg.n; ++r) y[r] += c * out.true_dict.atoms(r, k);
      }
      if (noise_sd > 0.0)
        for (std::size_t r = 0; r < cfg.n; ++r) y[r] += noise_sd * rng.gaussian();
      normalize(y);
      Y.set_col(s, y);
    }
    out.sites.push_back(std::move(Y));
  }
  return out;
}

Mat pool_sites(const std::vector<Mat>& sites) {
  if (sites.empty()) throw Error(errc::invalid_input, "pool_sites: no sites");
  const std::size_t n = sites[0].rows();
  std::size_t S = 0;
  for (const Mat& Y : sites) {
    if (Y.rows() != n) throw Error(errc::invalid_input, "pool_sites: ragged dimensions");
    S += Y.cols();
  }
  Mat pooled(n, S);
  std::size_t c0 = 0;
  for (const Mat& Y : sites) {
    for (std::size_t s = 0; s < Y.cols(); ++s)
      for (std::size_t r = 0; r < n; ++r) pooled(r, c0 + s) = Y(r, s);
    c0 += Y.cols();
  }
  return pooled;
}

}  // namespace cksvd
