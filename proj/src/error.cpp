#include "error.hpp"

namespace polycrit {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::Syntax: return "SyntaxError";
    case Errc::UnknownVariable: return "UnknownVariable";
    case Errc::NonIntegerExponent: return "NonIntegerExponent";
    case Errc::Domain: return "DomainError";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::NotOnGraph: return "NotOnGraph";
    case Errc::NotInSet: return "BaseNotInSet";
    case Errc::Unsupported: return "Unsupported";
    case Errc::NotStationary: return "NotStationary";
    case Errc::NotAMultiplier: return "NotAMultiplier";
    case Errc::NotInDomain: return "NotInDomain";
    case Errc::BranchLimitExceeded: return "BranchLimitExceeded";
    case Errc::SingularSystem: return "SingularSystem";
    case Errc::NotEqualityOnly: return "NotEqualityOnly";
    case Errc::UnknownExperiment: return "UnknownExperiment";
    case Errc::Schema: return "SchemaError";
    case Errc::Io: return "IoError";
    case Errc::Internal: return "InternalError";
  }
  return "Unknown";
}

}  // namespace polycrit
