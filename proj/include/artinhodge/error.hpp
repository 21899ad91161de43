#pragma once

#include <stdexcept>
#include <string>

namespace ah {

// Error conditions surfaced by the library. Each value corresponds to a
// named precondition or validation failure; the message carries the detail.
enum class Errc {
  nilpotency_bound_violated,
  not_local,
  dimension_mismatch,
  not_free_witnessed,
  internal_inconsistency,
  ambient_mismatch,
  not_local_homomorphism,
  precondition_unmet,
  not_a_complex,
  algebra_mismatch,
  non_local_result,
  not_pure,
  decomposition_failure,
  not_classical_mhs,
  purity_violation,
  verify_failure,
  not_cocycle,
  semi_simplicial_violation,
  parse_error,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::nilpotency_bound_violated: return "NilpotencyBoundViolated";
    case Errc::not_local: return "NotLocal";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::not_free_witnessed: return "NotFreeWitnessed";
    case Errc::internal_inconsistency: return "InternalInconsistency";
    case Errc::ambient_mismatch: return "AmbientMismatch";
    case Errc::not_local_homomorphism: return "NotLocalHomomorphism";
    case Errc::precondition_unmet: return "PreconditionUnmet";
    case Errc::not_a_complex: return "NotAComplex";
    case Errc::algebra_mismatch: return "AlgebraMismatch";
    case Errc::non_local_result: return "NonLocalResult";
    case Errc::not_pure: return "NotPure";
    case Errc::decomposition_failure: return "DecompositionFailure";
    case Errc::not_classical_mhs: return "NotClassicalMHS";
    case Errc::purity_violation: return "PurityViolation";
    case Errc::verify_failure: return "VerifyFailure";
    case Errc::not_cocycle: return "NotCocycle";
    case Errc::semi_simplicial_violation: return "SemiSimplicialViolation";
    case Errc::parse_error: return "ParseError";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool cond, Errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace ah
