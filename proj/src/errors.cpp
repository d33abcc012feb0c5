#include "densegen/errors.hpp"

namespace densegen {

const char* to_string(ErrKind k) {
  switch (k) {
    case ErrKind::SingularMatrix: return "SingularMatrix";
    case ErrKind::NoConvergence: return "NoConvergence";
    case ErrKind::BadPairing: return "BadPairing";
    case ErrKind::DegenerateExtension: return "DegenerateExtension";
    case ErrKind::DimensionTooSmall: return "DimensionTooSmall";
    case ErrKind::FiberMismatch: return "FiberMismatch";
    case ErrKind::PoleAtZ: return "PoleAtZ";
    case ErrKind::PositivityViolated: return "PositivityViolated";
    case ErrKind::NoRealRoot: return "NoRealRoot";
    case ErrKind::SingularF: return "SingularF";
    case ErrKind::MissingCanonicalForm: return "MissingCanonicalForm";
    case ErrKind::NotInClassR: return "NotInClassR";
    case ErrKind::DegenerateTarget: return "DegenerateTarget";
    case ErrKind::GuardViolation: return "GuardViolation";
    case ErrKind::NoAdmissibleC: return "NoAdmissibleC";
    case ErrKind::NotFoundWithinBound: return "NotFoundWithinBound";
    case ErrKind::Overflow: return "Overflow";
    case ErrKind::BudgetExhausted: return "BudgetExhausted";
    case ErrKind::FieldMismatch: return "FieldMismatch";
    case ErrKind::BadInput: return "BadInput";
  }
  return "UnknownError";
}

}  // namespace densegen
