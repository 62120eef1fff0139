#pragma once

#include <string>
#include <string_view>

#include "agapia/ast.hpp"

namespace agapia {

// Whole source file: optional vars block, definitions NAME = program, or a bare program.
SourceFile parse_source(std::string_view text, const std::string& path = "<input>");

// Entry program of a source, with references inlined and declaration types filled from vars.
ProgP resolve(const SourceFile& src, const std::string& entry = "");

// parse_source + resolve.
ProgP parse_program(std::string_view text, const std::string& path = "<input>");

ExprP parse_expr(std::string_view text);  // guard/formula syntax, including quantifiers and [mod m]

// for_s(i=a;i<b;i++){R}  ->  i=a ## while_s(i<b){R ## i++}, innermost first.
ProgP expand_for_s(const ProgP& p);

std::string pretty(const ProgP& p);
std::string pretty(const ExprP& e);
const char* op_symbol(Op op);
std::string pretty(const Module& m);
std::string pretty_stmts(const std::vector<StmtP>& body);
std::string pretty_decls(const std::vector<Decl>& ds);

// One-line shape of a program: modules by label, guards in full.
std::string outline(const ProgP& p);

// Structural equality ignoring spans, module labels and whether a type was written explicitly.
bool prog_equal(const ProgP& a, const ProgP& b);
bool expr_equal(const ExprP& a, const ExprP& b);
bool stmts_equal(const std::vector<StmtP>& a, const std::vector<StmtP>& b);

nlohmann::json to_json(const ProgP& p);
nlohmann::json to_json(const ExprP& e);

// Names of the listen declarations of the leftmost module (the temporal interface of a body).
std::vector<Decl> west_decls(const ProgP& p);

}  // namespace agapia
