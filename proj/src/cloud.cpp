#include "cloudksvd/cloud.hpp"

#include <cmath>

#include "cloudksvd/csv.hpp"
#include "cloudksvd/errors.hpp"
#include "cloudksvd/rng.hpp"

namespace cksvd {

namespace {

Vec unit_gaussian(Rng& rng, std::size_t n) {
  Vec v = rng.gaussian_vec(n);
  while (normalize(v) == 0.0) v = rng.gaussian_vec(n);
  return v;
}

}  // namespace

Vec sign_align(const Vec& d_ref, Vec q) {
  if (dot(d_ref, q) < 0.0)
    for (auto& x : q) x = -x;
  return q;
}

DpmResult distributed_power_method(const std::vector<Mat>& m_parts, const WeightMatrix& wm,
                                   std::size_t T_p, std::size_t T_c, const Vec& q_init,
                                   const DpmOptions& opt) {
  const std::size_t N = wm.size();
  if (m_parts.size() != N)
    throw Error(errc::invalid_input, "distributed_power_method: part count != site count");
  if (T_p < 1 || T_c < 1)
    throw Error(errc::invalid_config, "distributed_power_method: T_p, T_c must be >= 1");
  const std::size_t n = q_init.size();
  if (std::abs(norm2(q_init) - 1.0) > 1e-8)
    throw Error(errc::invalid_input, "distributed_power_method: q_init not unit norm");
  for (const Mat& M : m_parts) {
    if (M.rows() != n || M.cols() != n)
      throw Error(errc::invalid_input, "distributed_power_method: part shape mismatch");
    const double scale = std::max(1.0, max_abs(M));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (std::abs(M(i, j) - M(j, i)) > 1e-10 * scale)
          throw Error(errc::invalid_input, "distributed_power_method: asymmetric part");
  }

  DpmResult out;
  out.corrections = consensus_corrections(wm, T_c);
  std::vector<Vec> q(N, q_init);

  for (std::size_t tp = 0; tp < T_p; ++tp) {
    std::vector<Vec> z(N);
    for (std::size_t i = 0; i < N; ++i) z[i] = matvec(m_parts[i], q[i]);
    z = consensus_rounds(std::move(z), wm, T_c, &out.comm_vectors);
    for (std::size_t i = 0; i < N; ++i) {
      Vec v = std::move(z[i]);
      // Positive rescaling cannot change the direction after normalization
      // (the correction is only needed when the sum itself is the output), so
      // a structurally-zero correction just skips the division.
      if (out.corrections[i] > 1e-14)
        for (auto& x : v) x /= out.corrections[i];
      const double nv = norm2(v);
      if (nv < 1e-14)
        throw Error(errc::power_collapse, "distributed_power_method: iterate collapsed");
      for (auto& x : v) x /= nv;
      q[i] = std::move(v);
    }
    if (opt.record_iterates) out.iterates.push_back(q);
  }
  out.finals = std::move(q);
  return out;
}

CloudResult cloud_ksvd_run(const std::vector<Mat>& site_data, const WeightMatrix& wm,
                           const CloudConfig& cfg) {
  const std::size_t N = site_data.size();
  if (N == 0 || N != wm.size())
    throw Error(errc::invalid_config, "cloud_ksvd_run: site count mismatch with network");
  const std::size_t n = site_data[0].rows();
  for (const Mat& Y : site_data)
    if (Y.rows() != n) throw Error(errc::invalid_config, "cloud_ksvd_run: ragged dimensions");
  if (cfg.K < 1 || cfg.T0 < 1 || cfg.T0 > cfg.K || cfg.T_d < 1 || cfg.T_p < 1 || cfg.T_c < 1)
    throw Error(errc::invalid_config, "cloud_ksvd_run: bad config");

  Vec d_ref = cfg.d_ref;
  if (d_ref.empty()) {
    Rng r(derive_seed(cfg.seed, stream::d_ref));
    d_ref = unit_gaussian(r, n);
  } else if (d_ref.size() != n || std::abs(norm2(d_ref) - 1.0) > 1e-8) {
    throw Error(errc::invalid_config, "cloud_ksvd_run: d_ref must be unit length n");
  }

  const Dictionary D_init = init_dictionary(n, cfg.K, cfg.seed);
  std::vector<Dictionary> dicts(N, D_init);

  CloudResult out;
  CloudTrace& trace = out.trace;
  trace.N = N;
  trace.n = n;
  trace.K = cfg.K;
  trace.T0 = cfg.T0;
  trace.T_d = cfg.T_d;
  trace.T_p = cfg.T_p;
  trace.T_c = cfg.T_c;
  trace.seed = cfg.seed;
  trace.edge_count_nonself = wm.topology.edge_count_nonself();
  trace.corrections = consensus_corrections(wm, cfg.T_c);
  std::size_t S_total = 0;
  for (const Mat& Y : site_data) {
    trace.site_sizes.push_back(Y.cols());
    S_total += Y.cols();
  }

  std::vector<CodeMatrix> X(N);
  for (std::size_t t = 1; t <= cfg.T_d; ++t) {
    // Step 3: local sparse coding against each site's own dictionary.
    if (cfg.coding == CodingMode::omp) {
      for (std::size_t i = 0; i < N; ++i) X[i] = omp_encode_all(site_data[i], dicts[i], cfg.T0);
    } else {
      double tau = 0.0;
      for (std::size_t i = 0; i < N; ++i)
        for (std::size_t s = 0; s < site_data[i].cols(); ++s)
          tau = std::max(tau, select_tau_for_sparsity(site_data[i].col(s), dicts[i], cfg.T0,
                                                      cfg.lasso_cfg));
      for (std::size_t i = 0; i < N; ++i)
        X[i] = lasso_encode_all(site_data[i], dicts[i], tau, cfg.lasso_cfg);
    }

    // Supports stay frozen for the whole dictionary-update loop.
    std::vector<std::vector<std::vector<std::size_t>>> omegas(N);
    for (std::size_t i = 0; i < N; ++i) {
      omegas[i].resize(cfg.K);
      for (std::size_t k = 0; k < cfg.K; ++k) omegas[i][k] = X[i].row_support(k);
    }

    for (std::size_t k = 0; k < cfg.K; ++k) {
      CloudTkRecord rec;
      rec.t = t;
      rec.k = k + 1;

      std::vector<Mat> e_parts(N);
      std::vector<Mat> m_parts(N);
      bool any_support = false;
      for (std::size_t i = 0; i < N; ++i) {
        const auto& omega = omegas[i][k];
        rec.omega_sizes.push_back(omega.size());
        if (omega.empty()) {
          m_parts[i] = Mat(n, n, 0.0);
          rec.e_block_fro.push_back(0.0);
          continue;
        }
        any_support = true;
        e_parts[i] = restricted_error_matrix(site_data[i], dicts[i], X[i], k, omega);
        m_parts[i] = aat(e_parts[i]);
        rec.e_block_fro.push_back(fro_norm(e_parts[i]));
      }

      Rng qrng(derive_seed(cfg.seed, stream::q_init, t, k + 1));
      const Vec q_init = unit_gaussian(qrng, n);
      if (cfg.record_power_parts) {
        rec.m_parts = m_parts;
        rec.q_init = q_init;
      }

      try {
        DpmResult dpm = distributed_power_method(m_parts, wm, cfg.T_p, cfg.T_c, q_init);
        rec.comm_vectors = dpm.comm_vectors;
        for (std::size_t i = 0; i < N; ++i) {
          const Vec d = sign_align(d_ref, std::move(dpm.finals[i]));
          dicts[i].set_atom(k, d);
          const auto& omega = omegas[i][k];
          if (!omega.empty()) {
            const Vec x_row = matvec_t(e_parts[i], d);
            for (std::size_t c = 0; c < omega.size(); ++c)
              X[i].set_coeff_on_support(k, omega[c], x_row[c]);
          }
        }
      } catch (const Error& e) {
        if (e.code() != errc::power_collapse || any_support) throw;
        // Atom dead at every site: all parts are zero, so the shared stream
        // re-initializes it identically everywhere; codes stay untouched.
        Rng rrng(derive_seed(cfg.seed, stream::atom_reseed, t, k + 1));
        const Vec d = unit_gaussian(rrng, n);
        for (std::size_t i = 0; i < N; ++i) dicts[i].set_atom(k, d);
        rec.reseeded = true;
      }
      trace.tk.push_back(std::move(rec));
    }

    double err_sum = 0.0;
    for (std::size_t i = 0; i < N; ++i)
      err_sum += residual_norm_sum(site_data[i], dicts[i], X[i]);
    trace.repr_error_per_t.push_back(err_sum /
                                     (static_cast<double>(n) * static_cast<double>(S_total)));
    if (cfg.record_dictionaries) {
      std::vector<Mat> snap;
      snap.reserve(N);
      for (const Dictionary& D : dicts) snap.push_back(D.atoms);
      trace.dicts_per_t.push_back(std::move(snap));
    }
  }

  out.dicts = std::move(dicts);
  out.codes = std::move(X);
  return out;
}

void save_cloud_trace_csv(const CloudTrace& trace, const std::string& path) {
  CsvWriter csv(path, {"t", "k", "site", "omega_size", "e_block_fro", "correction", "reseeded",
                       "comm_vectors"});
  for (const CloudTkRecord& rec : trace.tk) {
    for (std::size_t i = 0; i < trace.N; ++i) {
      csv.row({CsvWriter::num(rec.t), CsvWriter::num(rec.k), CsvWriter::num(i + 1),
               CsvWriter::num(rec.omega_sizes[i]), CsvWriter::num(rec.e_block_fro[i]),
               CsvWriter::num(trace.corrections[i]), rec.reseeded ? "1" : "0",
               CsvWriter::num(rec.comm_vectors)});
    }
  }
}

void save_cloud_manifest(const CloudTrace& trace, const CloudConfig& cfg,
                         const std::string& path) {
  std::vector<std::pair<std::string, std::string>> m;
  m.emplace_back("version", kVersion);
  m.emplace_back("sites", std::to_string(trace.N));
  m.emplace_back("dim", std::to_string(trace.n));
  m.emplace_back("atoms", std::to_string(trace.K));
  m.emplace_back("sparsity", std::to_string(trace.T0));
  m.emplace_back("dictionary_iterations", std::to_string(trace.T_d));
  m.emplace_back("power_iterations", std::to_string(trace.T_p));
  m.emplace_back("consensus_iterations", std::to_string(trace.T_c));
  m.emplace_back("seed", std::to_string(trace.seed));
  m.emplace_back("coding", cfg.coding == CodingMode::omp ? "omp" : "lasso");
  m.emplace_back("edges_nonself", std::to_string(trace.edge_count_nonself));
  std::string sizes;
  for (std::size_t i = 0; i < trace.site_sizes.size(); ++i)
    sizes += (i ? " " : "") + std::to_string(trace.site_sizes[i]);
  m.emplace_back("site_sizes", sizes);
  write_manifest(path, m);
}

}  // namespace cksvd
