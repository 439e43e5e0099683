#pragma once

#include <stdexcept>
#include <string>

namespace rarebase {

enum class errc {
  invalid_argument,
  not_dyadic,
  insufficient_exponents,
  count_mismatch,
  average_mismatch,
  witness_not_in_basis,
  overlap_detected,
  empty_candidate_set,
  resolution_mismatch,
  resource_cap,
  parse_error,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::invalid_argument: return "InvalidArgument";
    case errc::not_dyadic: return "NotDyadic";
    case errc::insufficient_exponents: return "InsufficientExponents";
    case errc::count_mismatch: return "CountMismatch";
    case errc::average_mismatch: return "AverageMismatch";
    case errc::witness_not_in_basis: return "WitnessNotInBasis";
    case errc::overlap_detected: return "OverlapDetected";
    case errc::empty_candidate_set: return "EmptyCandidateSet";
    case errc::resolution_mismatch: return "ResolutionMismatch";
    case errc::resource_cap: return "ResourceCapExceeded";
    case errc::parse_error: return "ParseError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  errc code() const noexcept { return code_; }
  const char* name() const noexcept { return errc_name(code_); }

 private:
  errc code_;
};

}  // namespace rarebase
