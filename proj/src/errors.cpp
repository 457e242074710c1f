#include "scanmix/errors.hpp"

namespace scanmix {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::SelfLoop: return "SelfLoop";
    case Errc::DuplicateEdge: return "DuplicateEdge";
    case Errc::StateSpaceTooLarge: return "StateSpaceTooLarge";
    case Errc::EmptyBlock: return "EmptyBlock";
    case Errc::DuplicateSite: return "DuplicateSite";
    case Errc::EmptySupport: return "EmptySupport";
    case Errc::DomainMismatch: return "DomainMismatch";
    case Errc::DegenerateFunctional: return "DegenerateFunctional";
    case Errc::MarginalMismatch: return "MarginalMismatch";
    case Errc::Infeasible: return "Infeasible";
    case Errc::NotAnEdgeBlock: return "NotAnEdgeBlock";
    case Errc::NotInDiscrepancyClass: return "NotInDiscrepancyClass";
    case Errc::StrategyShapeMismatch: return "StrategyShapeMismatch";
    case Errc::NotATree: return "NotATree";
    case Errc::NotATreeBlock: return "NotATreeBlock";
    case Errc::EmptyTree: return "EmptyTree";
    case Errc::ParamOutOfRange: return "ParamOutOfRange";
    case Errc::UnknownDelta: return "UnknownDelta";
    case Errc::UncolourableGraph: return "UncolourableGraph";
    case Errc::IoError: return "IoError";
    case Errc::ParseError: return "ParseError";
  }
  return "Error";
}

}  // namespace scanmix
