#pragma once

#include <stdexcept>
#include <string>

namespace densegen {

enum class ErrKind {
  SingularMatrix,
  NoConvergence,
  BadPairing,
  DegenerateExtension,
  DimensionTooSmall,
  FiberMismatch,
  PoleAtZ,
  PositivityViolated,
  NoRealRoot,
  SingularF,
  MissingCanonicalForm,
  NotInClassR,
  DegenerateTarget,
  GuardViolation,
  NoAdmissibleC,
  NotFoundWithinBound,
  Overflow,
  BudgetExhausted,
  FieldMismatch,
  BadInput,
};

const char* to_string(ErrKind k);

/// Typed error carrying one of the kinds above; callers dispatch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrKind kind() const noexcept { return kind_; }

 private:
  ErrKind kind_;
};

[[noreturn]] inline void fail(ErrKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace densegen
