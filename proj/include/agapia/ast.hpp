#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "agapia/types.hpp"

namespace agapia {

struct Span {
  uint32_t line = 0, col = 0, end_line = 0, end_col = 0;
};

// ---------- expressions (shared by W-code, guards and assertion formulas) ----------

enum class EK : uint8_t { Int, Bool, Color, Null, SetLit, Var, Field, Index, Unary, Binary, Mod, Call, TupleLit, Interval, Quant };
enum class Op : uint8_t {
  Add, Sub, Mul, Div, Rem,
  Lt, Le, Gt, Ge, Eq, Ne,
  And, Or, Implies, Iff,
  Union, Inter, In, Contains, Subset,
  Not, Neg
};

struct Expr;
using ExprP = std::shared_ptr<Expr>;

struct Expr {
  EK kind = EK::Int;
  int64_t num = 0;     // Int; Bool/Color value (black = 1); Interval: bit0 lo open, bit1 hi closed
  bool forall = true;  // Quant
  Op op = Op::Add;
  std::string name;    // Var, Field (field name), Call (function), Quant (bound variable)
  std::vector<ExprP> kids;
  Span span;
};

ExprP e_int(int64_t v);
ExprP e_bool(bool b);
ExprP e_var(const std::string& n);
ExprP e_un(Op op, ExprP a);
ExprP e_bin(Op op, ExprP a, ExprP b);
ExprP e_call(const std::string& f, std::vector<ExprP> args);
ExprP e_field(ExprP base, const std::string& f);
ExprP e_index(ExprP base, ExprP idx);

// ---------- W-code ----------

enum class SK : uint8_t { Nil, New, Assign, Incr, If, While, For, Delay, Block };

struct Stmt;
using StmtP = std::shared_ptr<Stmt>;

enum class Leaf : uint8_t { Int, Bool, Set, Color };
struct LeafType {
  Leaf leaf = Leaf::Int;
  Axis axis = Axis::Spatial;
  bool array = false;  // only used in vars blocks and new-declarations
  bool operator==(const LeafType&) const = default;
};

struct Stmt {
  SK kind = SK::Nil;
  ExprP target;  // Assign/Incr lvalue; Delay argument
  ExprP value;   // Assign rhs; If/While/For condition
  std::string name;                  // New
  std::optional<LeafType> new_type;  // New
  std::vector<StmtP> body, els;      // If/While/For/Block
  StmtP init, step;                  // For
  Span span;
};

// ---------- modules and programs ----------

enum class Shape : uint8_t { Scalar, Array, Record };

struct Decl {
  std::string name;
  Shape shape = Shape::Scalar;
  std::vector<std::string> fields;               // Record
  std::vector<std::optional<LeafType>> types;    // one per field for records, else one
  bool explicit_type = false;
  Span span;
};

struct Module {
  std::vector<Decl> listen, read, speak, write;
  std::vector<StmtP> body;
  std::string label = "M";
  Span span;
};
using ModuleP = std::shared_ptr<Module>;

enum class PK : uint8_t { Nil, Module, Ref, If, VComp, HComp, DComp, WhileT, WhileS, WhileST, ForS };

struct Prog;
using ProgP = std::shared_ptr<Prog>;

struct Prog {
  PK kind = PK::Nil;
  ModuleP module;
  std::string name;  // Ref target; ForS loop variable
  ExprP cond;        // If/While guards; ForS condition (i<b)
  ExprP init;        // ForS start value
  ProgP a, b;        // children (ForS/While body in a)
  Span span;
};

struct VarsEntry {
  std::string name;  // "x" or "rec.field"
  LeafType type;
};

struct SourceFile {
  std::vector<VarsEntry> vars;
  std::vector<std::pair<std::string, ProgP>> defs;
  ProgP main;  // entry program (definition P, else the first definition, else the bare program)
  std::string path;
};

Type decl_type(const Decl& d);  // Never when any component is untyped
Type item_type(const std::vector<Decl>& decls);  // Nil for no declarations
std::string leaf_text(const LeafType& t);

}  // namespace agapia
