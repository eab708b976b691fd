#ifndef CLOUDKSVD_DIAGNOSTICS_HPP
#define CLOUDKSVD_DIAGNOSTICS_HPP

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "cloudksvd/cloud.hpp"
#include "cloudksvd/ksvd.hpp"
#include "cloudksvd/network.hpp"

namespace cksvd {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Constants measured from a lasso-coded centralized run with snapshots.
struct KsvdConstants {
  double C1 = kNaN;        // min margin tau - |<d_j, residual>| off support
  double C2_prime = kNaN;  // squared min sigma_T0 over column subsets
  double C2 = kNaN;        // (sqrt(C2') - C1^2 tau_min / 44)^2
  double C3_prime = kNaN;  // max lambda_2 / lambda_1 of E_kR E_kR^T
  double C3 = kNaN;        // max{1, 1/(min lambda_1 (1 - C3'))}
  double C4 = kNaN;        // max{1, max ||E_{i,k}||_2}
  double tau_min = kNaN;
  double eta_tau_max = kNaN;  // max_t max_s ||x_s||_1
  double lambda1_min = kNaN;
  bool c2_exhaustive = false;  // exhaustive over all C(K,T0) subsets vs realized supports
};

struct AnalysisParams {
  double C1 = kNaN, C2_prime = kNaN, C2 = kNaN, C3_prime = kNaN, C3 = kNaN, C4 = kNaN;
  double tau_min = kNaN, eta_tau_max = kNaN, lambda1_min = kNaN;
  bool c2_exhaustive = false;
  double alpha = kNaN, beta = kNaN, gamma = kNaN, mu = kNaN, nu = kNaN, zeta = kNaN;
  double epsilon_free = kNaN;   // chosen inside the admissible interval
  double epsilon_param = kNaN;  // mu nu^T_p + 4 epsilon_free^{3 T_p}
  double delta_d = kNaN;
  bool delta_d_clamped = false;
  std::size_t T_mix = 0;
  std::size_t required_Tp = 0;
  std::size_t skipped_tk = 0;  // (t,k) records with no usable spectrum
};

class GapViolationError : public Error {
public:
  GapViolationError(std::vector<std::pair<std::size_t, std::size_t>> offenders,
                    const std::string& what)
      : Error(errc::gap_violation, what), offending_tk(std::move(offenders)) {}
  std::vector<std::pair<std::size_t, std::size_t>> offending_tk;
};

// Requires a lasso-coded trace with snapshots and a site partition; throws
// insufficient-trace otherwise.
KsvdConstants compute_ksvd_constants(const LearnTrace& trace);

void merge_constants(AnalysisParams& params, const KsvdConstants& c);

// Fills alpha..required_Tp from a cloud trace recorded with power parts.
// delta_d_request is clamped into its admissible interval when needed.
void compute_theorem1_params(AnalysisParams& params, const CloudTrace& ctrace,
                             const WeightMatrix& wm, double delta_d_request = 0.01);

// ||u u^T - v v^T||_2 for unit vectors (equals sin of their angle).
double projector_distance(const Vec& u, const Vec& v);

// (1/(N K)) sum_k sum_i ||d_k d_k^T - d_ik d_ik^T||_2
double avg_atom_error(const Dictionary& D_central, const std::vector<Dictionary>& site_dicts);

// Structured-text and CSV report; each value carries its defining formula.
void save_params_report(const AnalysisParams& p, const std::string& text_path,
                        const std::string& csv_path);

}  // namespace cksvd

#endif
