#pragma once

#include <stdexcept>
#include <string>

namespace comi {

// Failure categories surfaced by the library. The CLI maps these onto its
// exit codes: validation failures -> 2, file/parse problems -> 3, anything
// labelled internal -> 4.
enum class errc {
  empty_support,
  negative_mass,
  mass_too_far,
  length_mismatch,
  support_mismatch,
  zero_samples,
  domain_error,
  bad_parameter,
  unsupported,
  phi_domain,
  model_mismatch,
  no_convergence,
  io_error,
  internal,
};

inline const char* errc_name(errc code) noexcept {
  switch (code) {
    case errc::empty_support: return "empty support";
    case errc::negative_mass: return "negative mass";
    case errc::mass_too_far: return "mass too far from one";
    case errc::length_mismatch: return "length mismatch";
    case errc::support_mismatch: return "support mismatch";
    case errc::zero_samples: return "zero samples";
    case errc::domain_error: return "domain error";
    case errc::bad_parameter: return "bad parameter";
    case errc::unsupported: return "unsupported";
    case errc::phi_domain: return "phi outside admissible domain";
    case errc::model_mismatch: return "model mismatch";
    case errc::no_convergence: return "no convergence";
    case errc::io_error: return "i/o error";
    case errc::internal: return "internal error";
  }
  return "unknown error";
}

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& detail)
      : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& detail) { throw Error(code, detail); }

inline void require(bool condition, errc code, const std::string& detail) {
  if (!condition) raise(code, detail);
}

}  // namespace comi
