#pragma once

#include <stdexcept>
#include <string>

namespace scanmix {

// Domain error codes. The CLI maps any Error to exit code 1; malformed
// command lines exit 2 before any of these can be raised.
enum class Errc {
  IndexOutOfRange,
  SelfLoop,
  DuplicateEdge,
  StateSpaceTooLarge,
  EmptyBlock,
  DuplicateSite,
  EmptySupport,
  DomainMismatch,
  DegenerateFunctional,
  MarginalMismatch,
  Infeasible,
  NotAnEdgeBlock,
  NotInDiscrepancyClass,
  StrategyShapeMismatch,
  NotATree,
  NotATreeBlock,
  EmptyTree,
  ParamOutOfRange,
  UnknownDelta,
  UncolourableGraph,
  IoError,
  ParseError,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace scanmix
