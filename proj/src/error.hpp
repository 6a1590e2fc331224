#pragma once

#include <stdexcept>
#include <string>

namespace polycrit {

enum class Errc {
  InvalidArgument = 1,
  Syntax,
  UnknownVariable,
  NonIntegerExponent,
  Domain,
  DimensionMismatch,
  NotOnGraph,
  NotInSet,
  Unsupported,
  NotStationary,
  NotAMultiplier,
  NotInDomain,
  BranchLimitExceeded,
  SingularSystem,
  NotEqualityOnly,
  UnknownExperiment,
  Schema,
  Io,
  Internal,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace polycrit
