#pragma once

#include <stdexcept>
#include <string>

namespace agapia {

enum class ErrorKind {
  Parse,
  Type,
  Macro,
  Border,
  Runtime,
  LoopBound,
  Formula,
  Contour,
  Proof,
  SearchSpace,
  Usage,
  Internal,
};

const char* kind_name(ErrorKind k);

struct Error : std::runtime_error {
  ErrorKind kind;
  Error(ErrorKind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

[[noreturn]] void fail(ErrorKind k, const std::string& msg);

// CLI exit code for an error kind: 2 parse/type, 3 runtime, 4 verification.
int exit_code_for(ErrorKind k);

}  // namespace agapia
