#ifndef CLOUDKSVD_ERRORS_HPP
#define CLOUDKSVD_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cksvd {

enum class errc {
  invalid_input,
  invalid_config,
  invalid_dictionary,
  convergence_failure,
  empty_energy,
  topology_generation_failure,
  correction_underflow,
  mixing_time_overflow,
  power_collapse,
  insufficient_trace,
  gap_violation,
  io_error,
  format_error,
  consistency_error,
};

class Error : public std::runtime_error {
public:
  Error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  errc code() const { return code_; }

private:
  errc code_;
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::invalid_input: return "invalid-input";
    case errc::invalid_config: return "invalid-config";
    case errc::invalid_dictionary: return "invalid-dictionary";
    case errc::convergence_failure: return "convergence-failure";
    case errc::empty_energy: return "empty-energy";
    case errc::topology_generation_failure: return "topology-generation-failure";
    case errc::correction_underflow: return "correction-underflow";
    case errc::mixing_time_overflow: return "mixing-time-overflow";
    case errc::power_collapse: return "power-collapse";
    case errc::insufficient_trace: return "insufficient-trace";
    case errc::gap_violation: return "gap-violation";
    case errc::io_error: return "io-error";
    case errc::format_error: return "format-error";
    case errc::consistency_error: return "consistency-error";
  }
  return "unknown";
}

}  // namespace cksvd

#endif
