#pragma once

#include <set>
#include <string>
#include <vector>

#include "agapia/ast.hpp"
#include "agapia/types.hpp"

namespace agapia {

// Border types of a program: w, e temporal; n, s spatial.
struct ProgramType {
  Type w, n, e, s;
};

std::string to_text(const ProgramType& t, bool with_names = false);

// Declaration checks plus ⟨listen | read | speak | write⟩.
ProgramType module_type(const Module& m);

// Outputs that are neither inputs nor assigned (they are emitted with default values).
std::vector<std::string> module_warnings(const Module& m);

// Expects a for_s-free program (see expand_for_s). Throws Error(Type) on the first failure.
ProgramType infer_type(const ProgP& p);

// Free variables of a condition (roots of field/index chains; bound and builtin names excluded).
std::set<std::string> condition_vars(const ExprP& cond);

// Throws Error(Type) naming every variable of cond outside allowed.
void check_condition_scope(const ExprP& cond, const std::set<std::string>& allowed);

// Variable names carried by a border type (field names of its module tuples).
std::set<std::string> border_names(const Type& t);

}  // namespace agapia
