#include "cloudksvd/diagnostics.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "cloudksvd/csv.hpp"

namespace cksvd {

namespace {

double binomial_capped(std::size_t n, std::size_t k, double cap) {
  if (k > n) return 0.0;
  double v = 1.0;
  for (std::size_t i = 0; i < k; ++i) {
    v *= static_cast<double>(n - i) / static_cast<double>(i + 1);
    if (v > cap) return cap + 1.0;
  }
  return v;
}

// sigma_T0 of the n x |I| submatrix D_|I, via the Gram spectrum: lambda_min
// of G equals c - lambda_max(c I - G) for any c >= lambda_max(G).
double smallest_singular_value(const Mat& D, const std::vector<std::size_t>& idx) {
  const std::size_t m = idx.size();
  Mat G(m, m);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b <= a; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < D.rows(); ++i) s += D(i, idx[a]) * D(i, idx[b]);
      G(a, b) = s;
      G(b, a) = s;
    }
  }
  const double c = reference_top_eigenpair(G).value;
  Mat shifted(m, m);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) shifted(a, b) = (a == b ? c : 0.0) - G(a, b);
  const double lambda_min = std::max(0.0, c - reference_top_eigenpair(shifted).value);
  return std::sqrt(lambda_min);
}

template <typename Fn>
void for_each_combination(std::size_t K, std::size_t T0, Fn&& fn) {
  std::vector<std::size_t> idx(T0);
  for (std::size_t i = 0; i < T0; ++i) idx[i] = i;
  while (true) {
    fn(idx);
    // next lexicographic combination
    std::size_t i = T0;
    while (i-- > 0) {
      if (idx[i] != i + K - T0) {
        ++idx[i];
        for (std::size_t j = i + 1; j < T0; ++j) idx[j] = idx[j - 1] + 1;
        break;
      }
      if (i == 0) return;
    }
  }
}

}  // namespace

KsvdConstants compute_ksvd_constants(const LearnTrace& trace) {
  if (!trace.has_snapshots || trace.iters.empty() || trace.data.rows() == 0)
    throw Error(errc::insufficient_trace, "compute_ksvd_constants: snapshots required");
  if (trace.site_sizes.empty())
    throw Error(errc::insufficient_trace, "compute_ksvd_constants: site partition required");
  for (const IterRecord& it : trace.iters)
    if (std::isnan(it.tau))
      throw Error(errc::insufficient_trace, "compute_ksvd_constants: lasso coding required");

  const Mat& Y = trace.data;
  const std::size_t n = trace.n, K = trace.K, T0 = trace.T0;
  KsvdConstants out;

  // C1: worst off-support margin of the lasso solutions, and tau/eta extrema.
  double c1 = std::numeric_limits<double>::infinity();
  out.tau_min = std::numeric_limits<double>::infinity();
  out.eta_tau_max = 0.0;
  for (const IterRecord& it : trace.iters) {
    out.tau_min = std::min(out.tau_min, it.tau);
    out.eta_tau_max = std::max(out.eta_tau_max, it.eta_tau);
    const Dictionary D_prev{it.dict_before};
    for (std::size_t s = 0; s < Y.cols(); ++s) {
      const SparseCode& x = it.codes_coding.cols[s];
      const Vec r = residual(Y.col(s), D_prev, x);
      std::size_t tpos = 0;
      for (std::size_t j = 0; j < K; ++j) {
        if (tpos < x.support.size() && x.support[tpos] == j) {
          ++tpos;
          continue;
        }
        double corr = 0.0;
        for (std::size_t i = 0; i < n; ++i) corr += D_prev.atoms(i, j) * r[i];
        c1 = std::min(c1, it.tau - std::abs(corr));
      }
    }
  }
  out.C1 = c1;

  // C2': min sigma_T0 over subsets of the coding dictionaries. Exhaustive
  // only while C(K,T0) stays enumerable; otherwise restricted to supports
  // realized in the trace, flagged via c2_exhaustive.
  out.c2_exhaustive = binomial_capped(K, T0, 1e5) <= 1e5;
  double sigma_min = std::numeric_limits<double>::infinity();
  for (const IterRecord& it : trace.iters) {
    if (out.c2_exhaustive) {
      for_each_combination(K, T0, [&](const std::vector<std::size_t>& idx) {
        sigma_min = std::min(sigma_min, smallest_singular_value(it.dict_before, idx));
      });
    } else {
      std::set<std::vector<std::size_t>> seen;
      for (const SparseCode& x : it.codes_coding.cols)
        if (x.support.size() == T0) seen.insert(x.support);
      for (const auto& idx : seen)
        sigma_min = std::min(sigma_min, smallest_singular_value(it.dict_before, idx));
    }
  }
  out.C2_prime = sigma_min * sigma_min;
  const double base = std::sqrt(out.C2_prime) - out.C1 * out.C1 * out.tau_min / 44.0;
  out.C2 = base > 0.0 ? base * base : 0.0;

  // C3', C3 from the restricted Gram spectra; C4 from per-site block norms.
  double ratio_max = 0.0;
  double lambda1_min = std::numeric_limits<double>::infinity();
  double block_max = 0.0;
  for (const IterRecord& it : trace.iters) {
    for (const Mat& gram : it.ekr_grams) {
      if (gram.rows() == 0) continue;  // dead atom this iteration
      EigenPair e = reference_top_eigenpair(gram);
      if (e.value <= 0.0) continue;
      ratio_max = std::max(ratio_max, std::max(0.0, e.second_value) / e.value);
      lambda1_min = std::min(lambda1_min, e.value);
    }
    for (const auto& per_site : it.site_block_norms)
      for (double b : per_site) block_max = std::max(block_max, b);
  }
  out.C3_prime = ratio_max;
  out.lambda1_min = lambda1_min;
  out.C3 = (out.C3_prime < 1.0 && std::isfinite(lambda1_min))
               ? std::max(1.0, 1.0 / (lambda1_min * (1.0 - out.C3_prime)))
               : std::numeric_limits<double>::infinity();
  out.C4 = std::max(1.0, block_max);
  return out;
}

void merge_constants(AnalysisParams& p, const KsvdConstants& c) {
  p.C1 = c.C1;
  p.C2_prime = c.C2_prime;
  p.C2 = c.C2;
  p.C3_prime = c.C3_prime;
  p.C3 = c.C3;
  p.C4 = c.C4;
  p.tau_min = c.tau_min;
  p.eta_tau_max = c.eta_tau_max;
  p.lambda1_min = c.lambda1_min;
  p.c2_exhaustive = c.c2_exhaustive;
}

void compute_theorem1_params(AnalysisParams& p, const CloudTrace& ctrace,
                             const WeightMatrix& wm, double delta_d_request) {
  if (ctrace.tk.empty()) throw Error(errc::insufficient_trace, "theorem params: empty trace");
  for (const CloudTkRecord& rec : ctrace.tk)
    if (!rec.reseeded && (rec.m_parts.size() != ctrace.N || rec.q_init.empty()))
      throw Error(errc::insufficient_trace, "theorem params: power parts were not recorded");
  if (!(std::isfinite(p.tau_min) && std::isfinite(p.C2) && std::isfinite(p.eta_tau_max)))
    throw Error(errc::insufficient_trace, "theorem params: constants must be computed first");

  double alpha = 0.0, beta = 0.0, gamma = 0.0, mu = 1.0, nu = 0.0;
  std::vector<std::pair<std::size_t, std::size_t>> gap_offenders;
  p.skipped_tk = 0;

  for (const CloudTkRecord& rec : ctrace.tk) {
    if (rec.reseeded) {
      ++p.skipped_tk;
      continue;
    }
    double alpha_tk = 0.0, gamma_sq = 0.0, total_fro = 0.0;
    Mat sum(ctrace.n, ctrace.n, 0.0);
    for (const Mat& M : rec.m_parts) {
      const double f = fro_norm(M);
      total_fro += f;
      gamma_sq += f * f;
      if (f > 0.0) alpha_tk += reference_top_eigenpair(M).value;
      sum = add_scaled(sum, M, 1.0);
    }
    if (total_fro < 1e-300) {
      ++p.skipped_tk;
      continue;
    }
    alpha = std::max(alpha, alpha_tk);
    gamma = std::max(gamma, std::sqrt(gamma_sq));

    EigenPair top = reference_top_eigenpair(sum);
    if (top.value <= 0.0) {
      ++p.skipped_tk;
      continue;
    }
    const double ratio = std::max(0.0, top.second_value) / top.value;
    if (ratio >= 1.0) gap_offenders.emplace_back(rec.t, rec.k);
    nu = std::max(nu, ratio);

    const double cos_theta = std::min(1.0, std::abs(dot(top.vector, rec.q_init)));
    if (cos_theta > 0.0)
      mu = std::max(mu, std::sqrt(std::max(0.0, 1.0 - cos_theta * cos_theta)) / cos_theta);

    // beta: replay the centralized power method on the assembled matrix from
    // the recorded q_init.
    Vec q = rec.q_init;
    for (std::size_t tp = 0; tp < ctrace.T_p; ++tp) {
      Vec w = matvec(sum, q);
      const double nw = norm2(w);
      if (nw < 1e-300) break;
      for (auto& x : w) x /= nw;
      q = std::move(w);
      const double applied = norm2(matvec(sum, q));
      if (applied > 0.0) beta = std::max(beta, 1.0 / applied);
    }
  }
  if (!gap_offenders.empty()) {
    std::string what = "theorem params: no spectral gap at (t,k):";
    for (auto [t, k] : gap_offenders)
      what += " (" + std::to_string(t) + "," + std::to_string(k) + ")";
    throw GapViolationError(std::move(gap_offenders), what);
  }

  p.alpha = alpha;
  p.beta = beta;
  p.gamma = gamma;
  p.mu = mu;
  p.nu = nu;
  p.T_mix = estimate_mixing_time(wm);

  const std::size_t K = ctrace.K, T0 = ctrace.T0, T_d = ctrace.T_d, Tp = ctrace.T_p;
  const std::size_t N = ctrace.N, n = ctrace.n;
  std::size_t S_max = 0;
  for (std::size_t s : ctrace.site_sizes) S_max = std::max(S_max, s);

  p.zeta = static_cast<double>(K) * std::sqrt(2.0 * static_cast<double>(S_max)) *
           (6.0 * std::sqrt(static_cast<double>(K * T0)) / (p.tau_min * p.C2) + p.eta_tau_max);

  const double delta_upper =
      std::min(1.0 / std::sqrt(2.0),
               p.C1 * p.C1 * p.tau_min / (44.0 * std::sqrt(2.0 * static_cast<double>(K))));
  if (delta_d_request > 0.0 && delta_d_request < delta_upper) {
    p.delta_d = delta_d_request;
    p.delta_d_clamped = false;
  } else {
    p.delta_d = delta_upper / 2.0;
    p.delta_d_clamped = true;
  }

  const double eps_cap1 =
      std::pow(10.0 * alpha * alpha * beta * beta, -1.0 / (3.0 * static_cast<double>(Tp)));
  const double eps_cap2 = std::cbrt((1.0 - nu) / 4.0);
  p.epsilon_free = 0.5 * std::min(eps_cap1, eps_cap2);
  p.epsilon_param = mu * std::pow(nu, static_cast<double>(Tp)) +
                    4.0 * std::pow(p.epsilon_free, 3.0 * static_cast<double>(Tp));

  const double log_gap = -std::log(nu + 4.0 * std::pow(p.epsilon_free, 3.0));
  const double numerator =
      2.0 * (static_cast<double>(T_d * K) - 2.0) *
          std::log(8.0 * p.C3 * p.C4 * p.C4 * static_cast<double>(N) + 5.0) +
      (static_cast<double>(T_d) - 1.0) * std::log(1.0 + p.zeta) +
      std::log(8.0 * p.C3 * p.C4 * p.mu * static_cast<double>(N) *
               std::sqrt(static_cast<double>(n)) / p.delta_d);
  const double required = numerator / log_gap;
  p.required_Tp =
      std::isfinite(required) ? static_cast<std::size_t>(std::max(1.0, std::ceil(required))) : 0;
  if (!std::isfinite(required))
    throw Error(errc::gap_violation, "theorem params: required_Tp is not finite");
}

double projector_distance(const Vec& u, const Vec& v) {
  if (u.size() != v.size()) throw Error(errc::invalid_input, "projector_distance: size mismatch");
  if (std::abs(norm2(u) - 1.0) > 1e-8 || std::abs(norm2(v) - 1.0) > 1e-8)
    throw Error(errc::invalid_input, "projector_distance: non-unit input");
  return spectral_norm(add_scaled(outer(u, u), outer(v, v), -1.0));
}

double avg_atom_error(const Dictionary& D_central, const std::vector<Dictionary>& site_dicts) {
  const std::size_t K = D_central.atom_count();
  const std::size_t N = site_dicts.size();
  if (N == 0) throw Error(errc::invalid_input, "avg_atom_error: no site dictionaries");
  for (const Dictionary& d : site_dicts)
    if (d.atom_count() != K || d.dim() != D_central.dim())
      throw Error(errc::invalid_input, "avg_atom_error: shape mismatch");
  double sum = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    const Vec dk = D_central.atom(k);
    for (std::size_t i = 0; i < N; ++i) sum += projector_distance(dk, site_dicts[i].atom(k));
  }
  return sum / (static_cast<double>(N) * static_cast<double>(K));
}

namespace {

struct ReportLine {
  const char* name;
  double value;
  const char* formula;
};

}  // namespace

void save_params_report(const AnalysisParams& p, const std::string& text_path,
                        const std::string& csv_path) {
  const ReportLine lines[] = {
      {"C1", p.C1, "min_{t,i,s,j!in supp} tau_t - |<d_j, y_is - D_{t-1} x_is>|"},
      {"C2_prime", p.C2_prime, "(min_{t,I} sigma_T0(D_{t-1}|I))^2"},
      {"C2", p.C2, "(sqrt(C2') - C1^2 tau_min / 44)^2"},
      {"C3_prime", p.C3_prime, "max_{t,k} lambda2/lambda1 of E_kR E_kR^T"},
      {"C3", p.C3, "max{1, 1/(min lambda1 (1 - C3'))}"},
      {"C4", p.C4, "max{1, max_{t,i,k} ||E_ik||_2}"},
      {"tau_min", p.tau_min, "min_t tau_t"},
      {"eta_tau_max", p.eta_tau_max, "max_t max_s ||x_s||_1"},
      {"lambda1_min", p.lambda1_min, "min_{t,k} lambda1 of E_kR E_kR^T"},
      {"alpha", p.alpha, "max_{t,k} sum_i ||E_i E_i^T||_2"},
      {"beta", p.beta, "max_{t,tp,k} 1/||(sum_i E_i E_i^T) q_c^(tp)||_2"},
      {"gamma", p.gamma, "max_{t,k} sqrt(sum_i ||E_i E_i^T||_F^2)"},
      {"mu", p.mu, "max{1, max_{t,k} tan(angle(u1, q_init))}"},
      {"nu", p.nu, "max_{t,k} lambda2/lambda1 of sum_i E_i E_i^T"},
      {"zeta", p.zeta, "K sqrt(2 S_max) (6 sqrt(K T0)/(tau_min C2) + eta_tau_max)"},
      {"epsilon_free", p.epsilon_free,
       "0.5 min{(10 a^2 b^2)^(-1/3Tp), ((1-nu)/4)^(1/3)}"},
      {"epsilon_param", p.epsilon_param, "mu nu^Tp + 4 epsilon_free^(3 Tp)"},
      {"delta_d", p.delta_d, "target atom deviation, inside (0, min{1/sqrt(2), C1^2 tau_min/(44 sqrt(2K))})"},
      {"T_mix", static_cast<double>(p.T_mix), "min t: max_i ||e_i^T W^t - (1/N)1^T||_2 <= 1/2"},
      {"required_Tp", static_cast<double>(p.required_Tp),
       "ceil[(2(Td K - 2) log(8 C3 C4^2 N + 5) + (Td-1) log(1+zeta) + log(8 C3 C4 mu N "
       "sqrt(n)/delta_d)) / log((nu + 4 eps^3)^-1)]"},
  };

  std::ofstream txt(text_path);
  if (!txt) throw Error(errc::io_error, "cannot open for writing: " + text_path);
  txt << "analysis parameters (version " << kVersion << ")\n";
  txt << "c2_mode = " << (p.c2_exhaustive ? "exhaustive" : "realized-supports") << "\n";
  txt << "delta_d_clamped = " << (p.delta_d_clamped ? "yes" : "no") << "\n";
  txt << "skipped_tk = " << p.skipped_tk << "\n";
  char buf[64];
  for (const auto& l : lines) {
    std::snprintf(buf, sizeof buf, "%-14s = %.17g", l.name, l.value);
    txt << buf << "    [" << l.formula << "]\n";
  }
  if (!txt) throw Error(errc::io_error, "write failed: " + text_path);

  CsvWriter csv(csv_path, {"name", "value", "formula"});
  for (const auto& l : lines) csv.row({l.name, CsvWriter::num(l.value), l.formula});
}

}  // namespace cksvd
