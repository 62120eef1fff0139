#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "agapia/ast.hpp"
#include "agapia/eval.hpp"
#include "agapia/scenario.hpp"

namespace agapia {

// ---------- contours ----------

// A contour pair tau (fn fe) sigma / tau (fe fn) sigma spelled as words over N, E (lines that carry data)
// and n, e (padding lines that must stay nil). Both orientations index lines the same way: horizontal
// lines from the left, vertical lines from the top.
struct ContourShape {
  std::string tau, fn, fe, sigma;

  std::string pre_word() const { return tau + fn + fe + sigma; }
  std::string post_word() const { return tau + fe + fn + sigma; }
  size_t h_count() const;
  size_t v_count() const;
  // Indices of the focus lines: vertical top-down, horizontal left to right.
  std::vector<size_t> focus_v() const;
  std::vector<size_t> focus_h() const;
  // Letter (N/n/E/e) of a line by index.
  char v_letter(size_t i) const;
  char h_letter(size_t i) const;
  bool in_focus_v(size_t i) const;
  bool in_focus_h(size_t i) const;
  std::string text() const;  // run-length form, e.g. "E^2 (N E) E"
  bool operator==(const ContourShape&) const = default;
};

// Text: segments L or L^x with L in {N,E,n,e}; x is an integer, a parameter name or a parenthesised
// expression over params. Exactly one parenthesised focus group: N-letters then E-letters (pre), or
// E-letters then N-letters (post, reported through *post).
ContourShape parse_contour(std::string_view text, const std::map<std::string, int64_t>& params = {},
                           bool* post = nullptr);

// Drop padding lines.
ContourShape strip_padding(const ContourShape& c);

// ---------- bindings ----------

struct ContourBinding {
  std::vector<Value> h, v;               // line values (module tuples or nil) by index
  std::map<std::string, Value> ghosts;   // parameters and snapshots
};

bool binding_equal(const ContourBinding& a, const ContourBinding& b);
nlohmann::json to_json(const ContourBinding& b);
std::string to_text(const ContourBinding& b);

// Lines of a contour drawn on a scenario whose focus starts at cell (row, col): the focus south-west
// corner is the boundary point (col, row + |fn|); tau is walked back from there. Raises
// ContourOutOfBounds when a step leaves the scenario.
ContourBinding bind_contour(const ContourShape& c, const Scenario& s, size_t row, size_t col, bool post);

// Binding of a program's borders: the focus vertical lines take the temporal items (west for pre,
// east for post) and the focus horizontal lines the spatial ones, in order, on uppercase lines;
// the remaining focus lines are nil. Frame lines come from `frame` (missing ones are nil).
ContourBinding bind_borders(const ContourShape& c, const std::vector<Value>& temporal,
                            const std::vector<Value>& spatial, const ContourBinding& frame);

// ---------- formulas ----------

// Names resolve as: quantifier variables, ghosts, then fields of the bound lines. A bare name must
// be carried by exactly one line. x[k] indexes x when one line carries an array x; otherwise it is the
// k-th line carrying x (horizontal lines first, then vertical). old(e) evaluates e in the pre binding.
class BindingEnv : public Env {
 public:
  explicit BindingEnv(const ContourBinding& b, const ContourBinding* old = nullptr);
  Value var(const std::string& name, const Span& where) const override;
  bool call(const Expr& e, const Env& scope, Value& out) const override;
  bool family(const std::string& n, int64_t k, Value& out) const override;
  bool carries(const std::string& name) const;

 private:
  struct Entry {
    std::string name;
    std::vector<Value> values;  // one per carrying line, horizontal first
  };
  const Entry* find(const std::string& name) const;
  const ContourBinding& b_;
  const ContourBinding* old_;
  std::vector<Entry> names_;
};

// Evaluation errors are raised as FormulaError.
bool eval_formula(const ExprP& f, const ContourBinding& b, const ContourBinding* old = nullptr);

// Parse formula text (guard syntax plus old(...)).
ExprP parse_formula(std::string_view text);

std::set<std::string> free_names(const ExprP& e);
bool mentions_old(const ExprP& e);

// Capture-avoiding substitution of free variables.
ExprP substitute(const ExprP& e, const std::map<std::string, ExprP>& sub);

// Definitions usable as Name or Name(args) inside formulas.
struct FormulaDef {
  std::vector<std::string> params;
  ExprP body;
};
ExprP expand_defines(const ExprP& e, const std::map<std::string, FormulaDef>& defs);

// Canonical form for rule matching: bound variables renamed by position, constants folded, double
// negations removed, nested conjunctions/disjunctions flattened, sorted and deduplicated.
ExprP normalize_formula(const ExprP& e);
std::string formula_key(const ExprP& e);  // of the normalized form
bool formula_equal(const ExprP& a, const ExprP& b);

// Top-level conjuncts; a universal quantifier over a conjunction is split per conjunct.
std::vector<ExprP> conjuncts(const ExprP& e);
ExprP conjoin(const std::vector<ExprP>& parts);  // true for none

// ---------- triples ----------

struct HoareTriple {
  ContourShape contour;
  ExprP pre, post;
  ProgP prog;
};

// Pre on the west/north borders of s, post on its east/south, frame lines shared.
bool holds(const HoareTriple& t, const Scenario& s, const ContourBinding& frame = {});
// Same, given the border items directly.
bool holds(const HoareTriple& t, const std::vector<Value>& west, const std::vector<Value>& north,
           const std::vector<Value>& east, const std::vector<Value>& south, const ContourBinding& frame = {});

}  // namespace agapia
