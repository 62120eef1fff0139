#include "agapia/error.hpp"

namespace agapia {

const char* kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::Type: return "TypeError";
    case ErrorKind::Macro: return "MacroError";
    case ErrorKind::Border: return "BorderMismatch";
    case ErrorKind::Runtime: return "RuntimeError";
    case ErrorKind::LoopBound: return "LoopBoundExceeded";
    case ErrorKind::Formula: return "FormulaError";
    case ErrorKind::Contour: return "ContourError";
    case ErrorKind::Proof: return "ProofError";
    case ErrorKind::SearchSpace: return "SearchSpaceTooLarge";
    case ErrorKind::Usage: return "UsageError";
    case ErrorKind::Internal: return "InternalError";
  }
  return "Error";
}

void fail(ErrorKind k, const std::string& msg) { throw Error(k, msg); }

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::Usage: return 1;
    case ErrorKind::Parse:
    case ErrorKind::Type:
    case ErrorKind::Macro: return 2;
    case ErrorKind::Border:
    case ErrorKind::Runtime:
    case ErrorKind::LoopBound:
    case ErrorKind::Internal: return 3;
    default: return 4;
  }
}

}  // namespace agapia
