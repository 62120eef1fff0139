#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "agapia/assertions.hpp"

namespace agapia {

// ---------- search domain ----------

struct FieldDomain {
  std::optional<std::vector<int64_t>> values;           // integer field values
  bool line = false;                                     // value = index of the line among those carrying the field
  std::optional<std::pair<int64_t, int64_t>> star;       // array lengths, inclusive
  std::optional<std::vector<int64_t>> universe;          // elements of set fields
};

struct Domain {
  int64_t int_lo = 0, int_hi = 4;  // integers in [int_lo, int_hi)
  int64_t set_hi = 4;              // sets are subsets of [0, set_hi)
  int64_t star_max = 4;            // array lengths 0..star_max
  std::optional<int64_t> n_max;    // upper bound for the script parameter
  int64_t cap = 50'000'000;        // enumerated bindings / explored states before SearchSpaceTooLarge
  std::map<std::string, FieldDomain> fields;  // by field path ("msg", "token.pos")
};

// Defaults, adjusted by the AGAPIA_DOMAIN environment variable (same syntax as the overrides, comma separated).
Domain default_domain();
// "n=3", "int=0:5", "set=3", "star=2", "cap=1000000".
void apply_domain_override(Domain& d, std::string_view kv);

// ---------- scripts ----------

struct SExpr {
  enum Kind { Atom, String, List } kind = Atom;
  std::string text;
  std::vector<SExpr> list;
  int line = 0;
  bool is_list(std::string_view head) const;
};

std::vector<SExpr> parse_sexprs(std::string_view text);

struct ProofScript {
  std::string name;
  std::string source_path, source_text;  // AGAPIA definitions referenced by (prog NAME)
  std::string param = "N";
  int64_t param_lo = 1, param_hi = 1;
  bool has_param = false;
  std::vector<std::pair<std::string, std::string>> aliases;
  std::vector<std::pair<std::string, SExpr>> fields;
  struct Define {
    std::string name;
    std::vector<std::string> params;
    std::string text;
  };
  std::vector<Define> defines;
  std::vector<SExpr> proofs, lemmas;
};

// (source ...) paths are read relative to base_dir, or through read_source.
ProofScript parse_script(std::string_view text, const std::string& base_dir = ".");
ProofScript parse_script(std::string_view text, const std::function<std::string(const std::string&)>& read_source);
ProofScript load_script(const std::string& path);

// A formula over the script's defines and aliases, with the parameter fixed.
ExprP script_formula(const ProofScript& s, std::string_view text, int64_t param);

// ---------- checking ----------

enum class Rule { Basic, HComp, VComp, DComp, If, AutoWhileT, AutoWhileS, STWhile, SimpleFor, Implication };
const char* rule_name(Rule r);

// Item types of every contour line (nil for lines that carry nothing).
struct LineTypes {
  std::vector<Type> h, v;
};

// A triple with everything needed to enumerate its pre-states.
struct Obligation {
  std::string path;
  int64_t param = 0;
  HoareTriple triple;
  LineTypes frame;  // frame lines only; focus entries are unused
  Domain domain;    // with the script's field overrides evaluated
};

enum class Verdict { Valid, Counterexample, Rejected };
const char* verdict_name(Verdict v);

struct NodeReport {
  std::string path;
  int64_t param = 0;
  Rule rule = Rule::Basic;
  std::string contour, program;
  Verdict verdict = Verdict::Valid;
  std::string message;            // rule failure or counterexample description
  nlohmann::json witness;         // pre/post bindings of a counterexample
  int64_t enumerated = 0;         // bindings visited by the enumerator
  int64_t satisfying = 0;         // bindings satisfying the enumerated antecedent
  int64_t outcomes = 0;           // program outcomes evaluated
  double seconds = 0;
  std::shared_ptr<Obligation> obligation;
};

struct Report {
  std::string script;
  std::vector<NodeReport> nodes;  // post-order per root, roots in script order, per parameter value
  bool ok() const;
  size_t count(Verdict v) const;
  std::string table(bool timings = true) const;  // without timings the table is deterministic
  nlohmann::json to_json() const;
};

// Checks every proof and lemma of the script for each parameter value.
Report check_proof(const ProofScript& s, const Domain& d);

// Runs the program of an obligation on every pre-state of its domain (all random branches) and checks
// the post-condition on each resulting scenario.
struct HarnessReport {
  std::string path;
  int64_t param = 0;
  int64_t initial = 0;     // pre-states satisfying the pre-condition
  int64_t scenarios = 0;   // (pre-state, outcome) pairs checked
  int64_t skipped = 0;     // pre-states that are not inputs of the program (border mismatch)
  int64_t violations = 0;
  std::string first;       // description of the first violation
  nlohmann::json witness;
  double seconds = 0;
};

HarnessReport soundness_harness(const Obligation& ob);
// Over every Valid node of a report.
std::vector<HarnessReport> soundness_harness(const Report& r);

}  // namespace agapia
