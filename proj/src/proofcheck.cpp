#include "agapia/proofcheck.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "agapia/error.hpp"
#include "agapia/interp.hpp"
#include "agapia/syntax.hpp"
#include "agapia/typecheck.hpp"

namespace agapia {

namespace {

[[noreturn]] void proof_error(const std::string& m) { fail(ErrorKind::Proof, m); }
[[noreturn]] void script_error(int line, const std::string& m) {
  fail(ErrorKind::Parse, "proof script line " + std::to_string(line) + ": " + m);
}

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

// ---------- domain ----------

void apply_domain_override(Domain& d, std::string_view kv) {
  auto eq = kv.find('=');
  if (eq == std::string_view::npos) fail(ErrorKind::Usage, "domain override '" + std::string(kv) + "' is not key=value");
  std::string k(kv.substr(0, eq)), v(kv.substr(eq + 1));
  auto num = [&](const std::string& t) {
    try {
      size_t used = 0;
      int64_t x = std::stoll(t, &used);
      if (used != t.size()) throw std::invalid_argument(t);
      return x;
    } catch (const std::exception&) {
      fail(ErrorKind::Usage, "domain override '" + std::string(kv) + "': '" + t + "' is not an integer");
    }
  };
  if (k == "n" || k == "N") d.n_max = num(v);
  else if (k == "int") {
    auto c = v.find(':');
    if (c == std::string::npos) d.int_lo = 0, d.int_hi = num(v);
    else d.int_lo = num(v.substr(0, c)), d.int_hi = num(v.substr(c + 1));
  } else if (k == "set") d.set_hi = num(v);
  else if (k == "star") d.star_max = num(v);
  else if (k == "cap") d.cap = num(v);
  else fail(ErrorKind::Usage, "unknown domain key '" + k + "' (expected n, int, set, star or cap)");
}

Domain default_domain() {
  Domain d;
  if (const char* env = std::getenv("AGAPIA_DOMAIN")) {
    std::string s(env);
    size_t start = 0;
    while (start <= s.size()) {
      size_t c = s.find(',', start);
      std::string part = s.substr(start, c == std::string::npos ? std::string::npos : c - start);
      if (!part.empty()) apply_domain_override(d, part);
      if (c == std::string::npos) break;
      start = c + 1;
    }
  }
  return d;
}

// ---------- s-expressions ----------

bool SExpr::is_list(std::string_view head) const {
  return kind == List && !list.empty() && list[0].kind == Atom && list[0].text == head;
}

std::vector<SExpr> parse_sexprs(std::string_view text) {
  size_t i = 0;
  int line = 1;
  std::function<bool(SExpr&)> read = [&](SExpr& out) -> bool {
    while (i < text.size()) {
      char c = text[i];
      if (c == '\n') ++line, ++i;
      else if (std::isspace(static_cast<unsigned char>(c))) ++i;
      else if (c == ';') {
        while (i < text.size() && text[i] != '\n') ++i;
      } else break;
    }
    if (i >= text.size()) return false;
    out = SExpr{};
    out.line = line;
    char c = text[i];
    if (c == ')') script_error(line, "unexpected ')'");
    if (c == '(') {
      ++i;
      out.kind = SExpr::List;
      while (true) {
        while (i < text.size() && (std::isspace(static_cast<unsigned char>(text[i])) || text[i] == ';')) {
          if (text[i] == ';')
            while (i < text.size() && text[i] != '\n') ++i;
          else {
            if (text[i] == '\n') ++line;
            ++i;
          }
        }
        if (i >= text.size()) script_error(out.line, "unclosed '('");
        if (text[i] == ')') {
          ++i;
          return true;
        }
        SExpr kid;
        read(kid);
        out.list.push_back(std::move(kid));
      }
    }
    if (c == '"') {
      ++i;
      out.kind = SExpr::String;
      while (i < text.size() && text[i] != '"') {
        if (text[i] == '\\' && i + 1 < text.size()) {
          char e = text[++i];
          out.text += e == 'n' ? '\n' : e;
        } else {
          if (text[i] == '\n') ++line;
          out.text += text[i];
        }
        ++i;
      }
      if (i >= text.size()) script_error(out.line, "unterminated string");
      ++i;
      return true;
    }
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) && text[i] != '(' && text[i] != ')' &&
           text[i] != ';')
      out.text += text[i++];
    return true;
  };
  std::vector<SExpr> out;
  SExpr e;
  while (read(e)) out.push_back(e);
  return out;
}

// ---------- scripts ----------

namespace {

const std::string& atom(const SExpr& e, const char* what) {
  if (e.kind == SExpr::List) script_error(e.line, std::string("expected ") + what);
  return e.text;
}

std::string dir_of(const std::string& path) {
  auto p = path.find_last_of('/');
  return p == std::string::npos ? "." : path.substr(0, p);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Usage, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

ProofScript parse_script(std::string_view text, const std::string& base_dir) {
  return parse_script(text, [&](const std::string& path) {
    return read_file(path.rfind('/', 0) == 0 ? path : base_dir + "/" + path);
  });
}

ProofScript parse_script(std::string_view text, const std::function<std::string(const std::string&)>& read_source) {
  auto top = parse_sexprs(text);
  ProofScript s;
  if (top.empty()) return s;  // empty script
  if (top.size() != 1 || !top[0].is_list("script")) script_error(top[0].line, "expected a single (script NAME ...) form");
  const auto& items = top[0].list;
  if (items.size() < 2) script_error(top[0].line, "script needs a name");
  s.name = atom(items[1], "a script name");
  for (size_t k = 2; k < items.size(); ++k) {
    const SExpr& it = items[k];
    if (it.kind != SExpr::List || it.list.empty()) script_error(it.line, "expected a (keyword ...) form");
    const std::string& head = atom(it.list[0], "a keyword");
    auto need = [&](size_t n) {
      if (it.list.size() != n) script_error(it.line, "(" + head + " ...) expects " + std::to_string(n - 1) + " arguments");
    };
    if (head == "source") {
      need(2);
      s.source_path = atom(it.list[1], "a path");
      s.source_text = read_source(s.source_path);
    } else if (head == "param") {
      need(4);
      s.param = atom(it.list[1], "a parameter name");
      s.param_lo = std::stoll(atom(it.list[2], "an integer"));
      s.param_hi = std::stoll(atom(it.list[3], "an integer"));
      s.has_param = true;
    } else if (head == "alias") {
      need(3);
      s.aliases.push_back({atom(it.list[1], "a name"), atom(it.list[2], "a formula")});
    } else if (head == "field") {
      need(3);
      s.fields.push_back({atom(it.list[1], "a field name"), it.list[2]});
    } else if (head == "define") {
      need(4);
      ProofScript::Define d;
      d.name = atom(it.list[1], "a name");
      if (it.list[2].kind != SExpr::List) script_error(it.line, "define needs a parameter list");
      for (auto& p : it.list[2].list) d.params.push_back(atom(p, "a parameter"));
      d.text = atom(it.list[3], "a formula");
      s.defines.push_back(d);
    } else if (head == "proof") {
      need(2);
      s.proofs.push_back(it.list[1]);
    } else if (head == "lemma") {
      need(2);
      s.lemmas.push_back(it.list[1]);
    } else {
      script_error(it.line, "unknown script item '" + head + "'");
    }
  }
  return s;
}

ProofScript load_script(const std::string& path) { return parse_script(read_file(path), dir_of(path)); }

const char* rule_name(Rule r) {
  switch (r) {
    case Rule::Basic: return "basic";
    case Rule::HComp: return "hcomp";
    case Rule::VComp: return "vcomp";
    case Rule::DComp: return "dcomp";
    case Rule::If: return "if";
    case Rule::AutoWhileT: return "auto-while-t";
    case Rule::AutoWhileS: return "auto-while-s";
    case Rule::STWhile: return "stwhile";
    case Rule::SimpleFor: return "simple-for";
    case Rule::Implication: return "implication";
  }
  return "?";
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Valid: return "Valid";
    case Verdict::Counterexample: return "Counterexample";
    case Verdict::Rejected: return "Rejected";
  }
  return "?";
}

// ---------- elaboration ----------

namespace {

std::map<std::string, FormulaDef> script_defs(const ProofScript& s, int64_t param) {
  std::map<std::string, FormulaDef> defs;
  defs[s.param] = {{}, e_int(param)};
  for (auto& [name, text] : s.aliases) defs[name] = {{}, parse_formula(text)};
  for (auto& d : s.defines) defs[d.name] = {d.params, parse_formula(d.text)};
  return defs;
}

}  // namespace

ExprP script_formula(const ProofScript& s, std::string_view text, int64_t param) {
  return expand_defines(parse_formula(text), script_defs(s, param));
}

namespace {

struct Node {
  Rule rule = Rule::Basic;
  bool auto_while = false;  // tag "auto-while": orientation taken from the program
  std::string path, contour_text;
  ContourShape contour;
  ExprP pre, post;
  ProgP prog;
  std::vector<Node> kids;
  std::string error;  // elaboration failure
};

std::optional<Rule> rule_of(const std::string& tag, bool& auto_while) {
  auto_while = false;
  if (tag == "basic") return Rule::Basic;
  if (tag == "hcomp") return Rule::HComp;
  if (tag == "vcomp") return Rule::VComp;
  if (tag == "dcomp") return Rule::DComp;
  if (tag == "if") return Rule::If;
  if (tag == "auto-while") {
    auto_while = true;
    return Rule::AutoWhileT;
  }
  if (tag == "auto-while-t") return Rule::AutoWhileT;
  if (tag == "auto-while-s") return Rule::AutoWhileS;
  if (tag == "stwhile") return Rule::STWhile;
  if (tag == "simple-for") return Rule::SimpleFor;
  if (tag == "implication") return Rule::Implication;
  return std::nullopt;
}

class Elaborator {
 public:
  Elaborator(const ProofScript& s, int64_t param) : s_(s), param_(param) {
    if (!s.source_text.empty()) src_ = parse_source(s.source_text, s.source_path);
    defs_ = script_defs(s, param);
  }

  ExprP formula(const std::string& text, const std::map<std::string, int64_t>& locals) const {
    auto defs = defs_;
    for (auto& [k, v] : locals) defs[k] = {{}, e_int(v)};
    return normalize_formula(expand_defines(parse_formula(text), defs));
  }

  Value value(const std::string& text) const {
    ContourBinding empty;
    BindingEnv env(empty);
    try {
      return eval_expr(formula(text, {}), env, nullptr);
    } catch (const Error& e) {
      fail(ErrorKind::Formula, "cannot evaluate '" + text + "': " + e.what());
    }
  }

  int64_t integer(const SExpr& e, const std::map<std::string, int64_t>& locals) const {
    std::string t = atom(e, "an integer expression");
    ContourBinding empty;
    BindingEnv env(empty);
    Value v = eval_expr(formula(t, locals), env, nullptr);
    if (!v || v->kind != VKind::Int) script_error(e.line, "'" + t + "' is not an integer");
    return v->num;
  }

  ProgP program(const std::string& name) {
    auto it = progs_.find(name);
    if (it != progs_.end()) return it->second;
    if (s_.source_text.empty()) proof_error("(prog " + name + ") needs a (source ...) in the script");
    return progs_[name] = resolve(src_, name);
  }

  ProgP inline_program(const std::string& text) {
    auto it = progs_.find("\x01" + text);
    if (it != progs_.end()) return it->second;
    ProgP p;
    if (s_.source_text.empty()) p = parse_program(text);
    else p = resolve(parse_source(s_.source_text + "\n__inline__ = " + text + ";\n", s_.source_path), "__inline__");
    return progs_["\x01" + text] = p;
  }

  void fields(Domain& d) const {
    for (auto& [name, spec] : s_.fields) {
      FieldDomain& f = d.fields[name];
      if (spec.kind == SExpr::String) {
        Value v = value(spec.text);
        if (!v || v->kind != VKind::Set) script_error(spec.line, "field " + name + ": expected a set or interval");
        f.values = v->set;
      } else if (spec.is_list("line")) {
        f.line = true;
      } else if (spec.is_list("star") && spec.list.size() == 3) {
        f.star = {integer(spec.list[1], {}), integer(spec.list[2], {})};
      } else if (spec.is_list("universe") && spec.list.size() == 2) {
        Value v = value(atom(spec.list[1], "a set"));
        if (!v || v->kind != VKind::Set) script_error(spec.line, "field " + name + ": universe must be a set");
        f.universe = v->set;
      } else {
        script_error(spec.line, "field " + name + ": expected \"SET\", (line), (star LO HI) or (universe SET)");
      }
    }
  }

  static ProgP inherited(const Node& parent, size_t i) {
    const ProgP& p = parent.prog;
    if (!p) return nullptr;
    switch (parent.rule) {
      case Rule::HComp:
      case Rule::VComp:
      case Rule::DComp:
      case Rule::If: return i == 0 ? p->a : p->b;
      case Rule::AutoWhileT:
      case Rule::AutoWhileS:
      case Rule::STWhile:
      case Rule::SimpleFor: return p->a;
      case Rule::Implication: return p;
      case Rule::Basic: return nullptr;
    }
    return nullptr;
  }

  // A root node, or (for VAR LO HI NODE) for one root per value.
  std::vector<Node> roots(const SExpr& e, const std::string& path) {
    if (!e.is_list("for")) return {node(e, path, {}, nullptr, 0)};
    if (e.list.size() != 5) script_error(e.line, "(for VAR LO HI TEMPLATE) expected");
    std::string var = atom(e.list[1], "a variable");
    std::vector<Node> out;
    for (int64_t j = integer(e.list[2], {}), hi = integer(e.list[3], {}); j < hi; ++j)
      out.push_back(node(e.list[4], path + "." + std::to_string(j), {{var, j}}, nullptr, 0));
    return out;
  }

  Node node(const SExpr& e, const std::string& path, const std::map<std::string, int64_t>& locals, const Node* parent,
            size_t index) {
    Node n;
    n.path = path;
    try {
      if (e.kind != SExpr::List || e.list.empty()) script_error(e.line, "expected a proof node");
      const std::string& tag = atom(e.list[0], "a rule name");
      auto r = rule_of(tag, n.auto_while);
      if (!r) script_error(e.line, "unknown rule '" + tag + "'");
      n.rule = *r;
      std::map<std::string, int64_t> params = locals;
      params[s_.param] = param_;
      std::vector<const SExpr*> kids;
      bool has_prog = false;
      for (size_t k = 1; k < e.list.size(); ++k) {
        const SExpr& it = e.list[k];
        if (it.kind != SExpr::List || it.list.empty()) script_error(it.line, "expected (option ...) or a premise");
        const std::string& head = atom(it.list[0], "a keyword");
        bool dummy;
        if (head == "for" || rule_of(head, dummy)) {
          kids.push_back(&it);
          continue;
        }
        if (it.list.size() != 2) script_error(it.line, "(" + head + " ...) takes one argument");
        const std::string& arg = atom(it.list[1], "an argument");
        if (head == "contour") {
          n.contour_text = arg;
          n.contour = parse_contour(arg, params);
        } else if (head == "pre") {
          n.pre = formula(arg, locals);
        } else if (head == "post") {
          n.post = formula(arg, locals);
        } else if (head == "prog") {
          n.prog = program(arg), has_prog = true;
        } else if (head == "prog-src") {
          n.prog = inline_program(arg), has_prog = true;
        } else {
          script_error(it.line, "unknown node option '" + head + "'");
        }
      }
      if (!n.pre || !n.post || n.contour_text.empty()) script_error(e.line, "a node needs (contour ...), (pre ...) and (post ...)");
      if (!has_prog) {
        if (!parent) script_error(e.line, "a root node needs (prog ...)");
        n.prog = inherited(*parent, index);
        if (!n.prog) proof_error("cannot infer the program of premise " + std::to_string(index) + " of " + parent->path);
      }
      if (n.auto_while) n.rule = n.prog->kind == PK::WhileS ? Rule::AutoWhileS : Rule::AutoWhileT;
      size_t idx = 0;
      for (const SExpr* k : kids) {
        if (k->is_list("for")) {
          if (k->list.size() != 5) script_error(k->line, "(for VAR LO HI TEMPLATE) expected");
          std::string var = atom(k->list[1], "a variable");
          int64_t lo = integer(k->list[2], locals), hi = integer(k->list[3], locals);
          for (int64_t j = lo; j < hi; ++j) {
            auto inner = locals;
            inner[var] = j;
            n.kids.push_back(node(k->list[4], path + "." + std::to_string(idx), inner, &n, idx));
            ++idx;
          }
        } else {
          n.kids.push_back(node(*k, path + "." + std::to_string(idx), locals, &n, idx));
          ++idx;
        }
      }
    } catch (const Error& err) {
      n.error = err.what();
    }
    return n;
  }

 private:
  const ProofScript& s_;
  int64_t param_;
  SourceFile src_;
  std::map<std::string, FormulaDef> defs_;
  std::map<std::string, ProgP> progs_;
};

// ---------- line types ----------

struct Expect {
  char letter;
  Type type;
  bool focus;
};
using Seq = std::vector<Expect>;

Type nil_or(const Type& t) { return t ? t : t_nil(); }
bool upper(char c) { return c == 'N' || c == 'E'; }

Seq frame_h(const ContourShape& c, const LineTypes& f) {
  Seq out;
  for (size_t i = 0; i < c.h_count(); ++i)
    out.push_back({c.h_letter(i), i < f.h.size() ? f.h[i] : nullptr, c.in_focus_h(i)});
  return out;
}

Seq frame_v(const ContourShape& c, const LineTypes& f) {
  Seq out;
  for (size_t i = 0; i < c.v_count(); ++i)
    out.push_back({c.v_letter(i), i < f.v.size() ? f.v[i] : nullptr, c.in_focus_v(i)});
  return out;
}

// Letters typed from a border list type, uppercase lines first-come.
Seq block(const std::string& letters, const Type& list_type) {
  size_t up = std::count_if(letters.begin(), letters.end(), upper);
  std::vector<Type> ts = line_types(list_type ? list_type : t_nil(), up);
  Seq out;
  size_t k = 0;
  for (char c : letters) out.push_back({c, upper(c) ? ts[k++] : t_nil(), false});
  return out;
}

Seq focus_block(const std::string& letters) {
  Seq out;
  for (char c : letters) out.push_back({c, nullptr, true});
  return out;
}

Seq cat(std::initializer_list<Seq> parts) {
  Seq out;
  for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

Seq slice(const Seq& s, size_t from, size_t to) { return Seq(s.begin() + from, s.begin() + std::min(to, s.size())); }

std::vector<Type> assign(const Seq& expect, const std::string& child_letters) {
  std::vector<Type> out(child_letters.size(), t_nil());
  if (expect.size() == child_letters.size()) {
    for (size_t i = 0; i < out.size(); ++i)
      if (upper(child_letters[i])) out[i] = nil_or(expect[i].type);
    return out;
  }
  std::vector<Type> ups;
  for (auto& e : expect)
    if (upper(e.letter)) ups.push_back(nil_or(e.type));
  size_t k = 0;
  for (size_t i = 0; i < out.size(); ++i)
    if (upper(child_letters[i])) {
      if (k >= ups.size()) proof_error("ShapeMismatch: premise contour has more data lines than its conclusion");
      out[i] = ups[k++];
    }
  return out;
}

// Letters of a contour's lines by index.
std::string h_letters(const ContourShape& c) {
  std::string s;
  for (size_t i = 0; i < c.h_count(); ++i) s += c.h_letter(i);
  return s;
}
std::string v_letters(const ContourShape& c) {
  std::string s;
  for (size_t i = 0; i < c.v_count(); ++i) s += c.v_letter(i);
  return s;
}

LineTypes child_types(const ContourShape& child, const Seq& eh, const Seq& ev) {
  return {assign(eh, h_letters(child)), assign(ev, v_letters(child))};
}

// Frame types plus focus types from a program's borders.
LineTypes side_types(const ContourShape& c, const LineTypes& frame, const Type& temporal, const Type& spatial) {
  LineTypes t;
  t.h.assign(c.h_count(), t_nil());
  t.v.assign(c.v_count(), t_nil());
  for (size_t i = 0; i < t.h.size(); ++i)
    if (!c.in_focus_h(i) && i < frame.h.size() && upper(c.h_letter(i))) t.h[i] = nil_or(frame.h[i]);
  for (size_t i = 0; i < t.v.size(); ++i)
    if (!c.in_focus_v(i) && i < frame.v.size() && upper(c.v_letter(i))) t.v[i] = nil_or(frame.v[i]);
  auto fill = [&](const std::vector<size_t>& idx, std::vector<Type>& dst, const Type& list, bool vertical) {
    size_t up = 0;
    for (size_t i : idx) up += upper(vertical ? c.v_letter(i) : c.h_letter(i));
    std::vector<Type> ts = line_types(list ? list : t_nil(), up);
    size_t k = 0;
    for (size_t i : idx)
      if (upper(vertical ? c.v_letter(i) : c.h_letter(i))) dst[i] = ts[k++];
  };
  fill(c.focus_v(), t.v, temporal, true);
  fill(c.focus_h(), t.h, spatial, false);
  return t;
}

bool frame_is_nil(const ContourShape& c, const LineTypes& frame) {
  for (size_t i = 0; i < frame.h.size(); ++i)
    if (!c.in_focus_h(i) && frame.h[i] && frame.h[i]->kind != TKind::Nil) return false;
  for (size_t i = 0; i < frame.v.size(); ++i)
    if (!c.in_focus_v(i) && frame.v[i] && frame.v[i]->kind != TKind::Nil) return false;
  return true;
}

// ---------- program types ----------

ProgramType program_type(const ProgP& p) {
  static std::unordered_map<const Prog*, std::pair<ProgP, ProgramType>> cache;
  auto it = cache.find(p.get());
  if (it != cache.end()) return it->second.second;
  ProgramType t = infer_type(expand_for_s(p));
  cache.emplace(p.get(), std::make_pair(p, t));
  return t;
}

// ---------- enumeration ----------

std::vector<int64_t> range(int64_t lo, int64_t hi) {
  std::vector<int64_t> v;
  for (int64_t x = lo; x < hi; ++x) v.push_back(x);
  return v;
}

class Values {
 public:
  explicit Values(const Domain& d) : d_(d) {}

  std::vector<Value> of(const Type& t, const std::string& path, int64_t occ) const {
    const FieldDomain* f = nullptr;
    auto it = d_.fields.find(path);
    if (it != d_.fields.end()) f = &it->second;
    switch (t->kind) {
      case TKind::Nil: return {nullptr};
      case TKind::Int: {
        if (f && f->line) return {make_int(occ)};
        std::vector<Value> out;
        for (int64_t x : f && f->values ? *f->values : range(d_.int_lo, d_.int_hi)) out.push_back(make_int(x));
        return out;
      }
      case TKind::Bool: {
        if (f && f->values) {
          std::vector<Value> out;
          for (int64_t x : *f->values) out.push_back(make_bool(x != 0));
          return out;
        }
        return {make_bool(false), make_bool(true)};
      }
      case TKind::Set: {
        std::vector<int64_t> u = f && f->universe ? *f->universe : range(0, d_.set_hi);
        if (u.size() > 16) proof_error("SearchSpaceTooLarge: set universe of " + path + " has more than 16 elements");
        std::vector<Value> out;
        for (uint64_t mask = 0; mask < (uint64_t{1} << u.size()); ++mask) {
          std::vector<int64_t> s;
          for (size_t b = 0; b < u.size(); ++b)
            if (mask >> b & 1) s.push_back(u[b]);
          out.push_back(make_set(std::move(s)));
        }
        return out;
      }
      case TKind::Star: {
        std::pair<int64_t, int64_t> len = f && f->star ? *f->star : std::make_pair(int64_t{0}, d_.star_max);
        std::vector<Value> elems = of(t->kids[0], path, occ), out;
        std::vector<std::vector<Value>> cur{{}};
        for (int64_t n = 0; n <= len.second; ++n) {
          if (n >= len.first)
            for (auto& c : cur) out.push_back(make_seq(c));
          if (n == len.second) break;
          std::vector<std::vector<Value>> next;
          if (static_cast<double>(cur.size()) * elems.size() > 5e6)
            proof_error("SearchSpaceTooLarge: too many arrays for " + path);
          for (auto& c : cur)
            for (auto& e : elems) {
              next.push_back(c);
              next.back().push_back(e);
            }
          cur = std::move(next);
        }
        return out;
      }
      case TKind::Tuple: {
        std::vector<std::vector<Value>> parts;
        for (size_t k = 0; k < t->kids.size(); ++k) {
          std::string sub = k < t->names.size() ? (path.empty() ? t->names[k] : path + "." + t->names[k]) : path;
          parts.push_back(of(t->kids[k], sub, occ));
        }
        std::vector<Value> out;
        std::vector<Value> cur(parts.size());
        std::function<void(size_t)> rec = [&](size_t k) {
          if (k == parts.size()) {
            out.push_back(make_tuple(cur, t->names));
            if (out.size() > 20'000'000) proof_error("SearchSpaceTooLarge: too many values for one line");
            return;
          }
          for (auto& v : parts[k]) {
            cur[k] = v;
            rec(k + 1);
          }
        };
        rec(0);
        return out;
      }
      case TKind::Union: {
        std::vector<Value> out;
        for (auto& arm : t->kids)
          for (auto& v : of(arm, path, occ))
            if (std::none_of(out.begin(), out.end(), [&](const Value& x) { return value_equal(x, v); })) out.push_back(v);
        return out;
      }
      default: proof_error("cannot enumerate values of type " + to_text(t, Axis::Spatial, true));
    }
  }

 private:
  const Domain& d_;
};

std::vector<std::string> top_names(const Type& t) {
  if (t && t->kind == TKind::Tuple) return t->names;
  return {};
}

// Line values are materialised; this bounds the memory of one line.
constexpr int64_t kLineValueCap = 4'000'000;

struct EnumStats {
  int64_t visited = 0, satisfying = 0;
};

// Every binding of the typed lines satisfying cond, lines assigned top-down then left to right; each
// conjunct is checked as soon as the lines carrying its names are assigned.
void enumerate(const ContourShape& c, const LineTypes& types, const Domain& d, const ExprP& cond, EnumStats& st,
               const std::function<bool(const ContourBinding&)>& visit) {
  struct Slot {
    bool h;
    size_t idx;
    std::vector<Value> values;
    std::vector<std::string> names;
  };
  Values vals(d);
  ContourBinding b;
  b.h.assign(c.h_count(), nullptr);
  b.v.assign(c.v_count(), nullptr);
  // occurrence index per field, in family order (horizontal lines first)
  std::map<std::string, int64_t> occ;
  auto line_values = [&](const Type& t) {
    int64_t o = 0;
    for (auto& n : top_names(t)) o = std::max(o, occ[n]);
    // a (line) field takes the occurrence index of its own name
    std::vector<Value> out;
    if (!t || t->kind != TKind::Tuple) return vals.of(t ? t : t_nil(), "", o);
    std::vector<std::vector<Value>> parts;
    for (size_t k = 0; k < t->kids.size(); ++k) parts.push_back(vals.of(t->kids[k], t->names[k], occ[t->names[k]]));
    double size = 1;
    for (auto& p : parts) size *= static_cast<double>(p.size());
    if (size > kLineValueCap)
      fail(ErrorKind::SearchSpace, "SearchSpaceTooLarge: " + std::to_string(static_cast<int64_t>(size)) +
                                       " values for one line (limit " + std::to_string(kLineValueCap) + ")");
    std::vector<Value> cur(parts.size());
    std::function<void(size_t)> rec = [&](size_t k) {
      if (k == parts.size()) {
        out.push_back(make_tuple(cur, t->names));
        return;
      }
      for (auto& v : parts[k]) {
        cur[k] = v;
        rec(k + 1);
      }
    };
    rec(0);
    for (auto& n : top_names(t)) ++occ[n];
    return out;
  };
  std::vector<Slot> hs, vs;
  for (size_t i = 0; i < b.h.size(); ++i) hs.push_back({true, i, line_values(types.h[i]), top_names(types.h[i])});
  for (size_t i = 0; i < b.v.size(); ++i) vs.push_back({false, i, line_values(types.v[i]), top_names(types.v[i])});
  std::vector<Slot> slots;
  for (auto* group : {&vs, &hs})
    for (auto& s : *group) {
      if (s.values.size() == 1) {
        (s.h ? b.h : b.v)[s.idx] = s.values[0];  // fixed line
        continue;
      }
      if (s.values.empty()) return;  // nothing inhabits this line
      slots.push_back(std::move(s));
    }
  // stage of each conjunct: the last slot carrying one of its names
  std::vector<std::vector<ExprP>> at(slots.size() + 1);
  for (auto& conj : conjuncts(cond)) {
    std::set<std::string> names = free_names(conj);
    size_t stage = 0;
    for (size_t k = 0; k < slots.size(); ++k)
      for (auto& n : slots[k].names)
        if (names.count(n)) stage = std::max(stage, k + 1);
    at[stage].push_back(conj);
  }
  // Conjunction in any order: a false conjunct wins over one that cannot be evaluated (say msg[k] with
  // len(msg) == N not yet established), since normalization sorts conjuncts.
  auto ok = [&](size_t stage) {
    std::optional<Error> err;
    for (auto& conj : at[stage]) {
      try {
        if (!eval_formula(conj, b)) return false;
      } catch (const Error& e) {
        if (!err) err = e;
      }
    }
    if (err) throw *err;
    return true;
  };
  if (!ok(0)) return;
  bool stop = false;
  std::function<void(size_t)> rec = [&](size_t k) {
    if (k == slots.size()) {
      ++st.satisfying;
      if (!visit(b)) stop = true;
      return;
    }
    Slot& s = slots[k];
    Value& dst = (s.h ? b.h : b.v)[s.idx];
    for (auto& v : s.values) {
      if (++st.visited > d.cap)
        fail(ErrorKind::SearchSpace, "SearchSpaceTooLarge: more than " + std::to_string(d.cap) + " bindings enumerated");
      dst = v;
      if (ok(k + 1)) rec(k + 1);
      if (stop) break;
    }
    dst = nullptr;
  };
  rec(0);
}

// Items of the uppercase focus lines of a binding: (temporal, spatial).
std::pair<std::vector<Value>, std::vector<Value>> focus_items(const ContourShape& c, const ContourBinding& b) {
  std::vector<Value> t, s;
  for (size_t i : c.focus_v())
    if (b.v[i]) t.push_back(b.v[i]);
  for (size_t i : c.focus_h())
    if (b.h[i]) s.push_back(b.h[i]);
  return {t, s};
}

// ---------- rule checks ----------

bool ci_eq(const std::string& a, const std::string& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (std::toupper(static_cast<unsigned char>(a[i])) != std::toupper(static_cast<unsigned char>(b[i]))) return false;
  return true;
}

void shape_mismatch(const std::string& what, const ContourShape& got, const std::string& want) {
  proof_error("ShapeMismatch: " + what + " has contour " + got.text() + ", expected " + want);
}

void same_formula(const ExprP& a, const ExprP& b, const std::string& what) {
  if (!formula_equal(a, b))
    proof_error("FormulaMismatch: " + what + ": '" + pretty(a) + "' vs '" + pretty(b) + "'");
}

std::string uppers(const std::string& w) {
  std::string o;
  for (char c : w)
    if (upper(c)) o += c;
  return o;
}

struct Expected {
  std::string tau, fn, fe, sigma;
  bool matches(const ContourShape& s, bool stripped) const {
    if (!stripped) return ci_eq(s.tau, tau) && ci_eq(s.fn, fn) && ci_eq(s.fe, fe) && ci_eq(s.sigma, sigma);
    ContourShape t = strip_padding(s);
    return t.tau == uppers(tau) && t.fn == uppers(fn) && t.fe == uppers(fe) && t.sigma == uppers(sigma);
  }
  std::string text() const { return ContourShape{tau, fn, fe, sigma}.text(); }
};

void expect_shape(const ContourShape& got, const Expected& want, const std::string& what) {
  if (!want.matches(got, false) && !want.matches(got, true)) shape_mismatch(what, got, want.text());
}

void expect_same_shape(const ContourShape& got, const ContourShape& want, const std::string& what) {
  if (!(strip_padding(got) == strip_padding(want))) shape_mismatch(what, got, want.text() + " (up to padding lines)");
}

void expect_prog(const ProgP& got, const ProgP& want, const std::string& what) {
  if (!prog_equal(got, want))
    proof_error("ProgramMismatch: " + what + " is " + outline(got) + ", expected " + outline(want));
}

bool assigns(const std::vector<StmtP>& body, const std::string& v) {
  for (auto& s : body) {
    if (!s) continue;
    if ((s->kind == SK::Assign || s->kind == SK::Incr) && s->target) {
      ExprP t = s->target;
      while (t->kind == EK::Field || t->kind == EK::Index) t = t->kids[0];
      if (t->kind == EK::Var && t->name == v) return true;
    }
    if (s->kind == SK::New && s->name == v) return true;
    if (assigns(s->body, v) || assigns(s->els, v)) return true;
    if ((s->init && assigns({s->init}, v)) || (s->step && assigns({s->step}, v))) return true;
  }
  return false;
}

bool prog_assigns(const ProgP& p, const std::string& v) {
  if (!p) return false;
  if (p->kind == PK::Module) return assigns(p->module->body, v);
  if (p->kind == PK::ForS && p->name == v) return true;
  return prog_assigns(p->a, v) || prog_assigns(p->b, v);
}

class Checker {
 public:
  Checker(const Domain& d, int64_t param, std::vector<NodeReport>& out) : d_(d), param_(param), out_(out), explorer_(d.cap) {}

  void check(const Node& n, const LineTypes& frame) {
    auto t0 = std::chrono::steady_clock::now();
    NodeReport r;
    r.path = n.path;
    r.param = param_;
    r.rule = n.rule;
    r.contour = n.contour_text;
    r.program = n.prog ? outline(n.prog) : "";
    std::vector<LineTypes> kid_frames(n.kids.size(), LineTypes{});
    bool static_ok = true;
    try {
      if (!n.error.empty()) proof_error(n.error);
      static_check(n);
      kid_frames = frames(n, frame);
    } catch (const Error& e) {
      static_ok = false;
      r.verdict = Verdict::Rejected;
      r.message = e.what();
    }
    for (size_t k = 0; k < n.kids.size(); ++k) check(n.kids[k], kid_frames[k]);
    if (static_ok) {
      try {
        dynamic_check(n, frame, r);
      } catch (const Error& e) {
        r.verdict = Verdict::Rejected;
        r.message = e.what();
      }
      auto ob = std::make_shared<Obligation>();
      ob->path = n.path;
      ob->param = param_;
      ob->triple = {n.contour, n.pre, n.post, n.prog};
      ob->frame = frame;
      ob->domain = d_;
      r.obligation = ob;
    }
    r.seconds = since(t0);
    out_.push_back(std::move(r));
  }

 private:
  void arity(const Node& n, size_t want) {
    if (n.kids.size() != want)
      proof_error(std::string("ArityError: ") + rule_name(n.rule) + " takes " + std::to_string(want) + " premises, got " +
                  std::to_string(n.kids.size()));
  }

  void static_check(const Node& n) {
    const ContourShape& c = n.contour;
    const ProgP& p = n.prog;
    for (auto& k : n.kids)
      if (!k.error.empty() && !k.prog) return;  // reported at the premise
    switch (n.rule) {
      case Rule::Basic:
        arity(n, 0);
        if (p->kind != PK::Module) proof_error("BasicNotModule: the basic rule applies to a single module, got " + outline(p));
        return;
      case Rule::HComp:
      case Rule::VComp:
      case Rule::DComp: {
        arity(n, 2);
        PK want = n.rule == Rule::HComp ? PK::HComp : n.rule == Rule::VComp ? PK::VComp : PK::DComp;
        if (p->kind != want) proof_error(std::string("ProgramMismatch: ") + rule_name(n.rule) + " over " + outline(p));
        const Node &a = n.kids[0], &b = n.kids[1];
        expect_prog(a.prog, p->a, "first premise");
        expect_prog(b.prog, p->b, "second premise");
        if (n.rule == Rule::HComp) {
          size_t l = a.contour.fe.size(), m = b.contour.fe.size();
          if (l + m != c.fe.size() && uppers(a.contour.fe).size() + uppers(b.contour.fe).size() != uppers(c.fe).size())
            shape_mismatch("second premise", b.contour, "a focus splitting " + c.text());
          if (l <= c.fe.size()) {
            expect_shape(a.contour, {c.tau, c.fn, c.fe.substr(0, l), c.fe.substr(l) + c.sigma}, "first premise");
            expect_shape(b.contour, {c.tau + c.fe.substr(0, l), c.fn, c.fe.substr(l), c.sigma}, "second premise");
          } else {
            shape_mismatch("first premise", a.contour, "a focus inside " + c.text());
          }
        } else if (n.rule == Rule::VComp) {
          // a is on top; the conclusion's west runs bottom-up: b's lines, then a's
          size_t k = a.contour.fn.size();
          if (k > c.fn.size()) shape_mismatch("first premise", a.contour, "a focus inside " + c.text());
          size_t m = c.fn.size() - k;
          expect_shape(a.contour, {c.tau + c.fn.substr(0, m), c.fn.substr(m), c.fe, c.sigma}, "first premise");
          expect_shape(b.contour, {c.tau, c.fn.substr(0, m), c.fe, c.fn.substr(m) + c.sigma}, "second premise");
        } else {
          expect_same_shape(a.contour, c, "first premise");
          expect_same_shape(b.contour, c, "second premise");
        }
        same_formula(a.pre, n.pre, "pre of the first premise");
        same_formula(a.post, b.pre, "middle condition");
        same_formula(b.post, n.post, "post of the second premise");
        return;
      }
      case Rule::If: {
        arity(n, 2);
        if (p->kind != PK::If) proof_error("ProgramMismatch: if over " + outline(p));
        expect_prog(n.kids[0].prog, p->a, "then premise");
        expect_prog(n.kids[1].prog, p->b, "else premise");
        for (auto& k : n.kids) expect_same_shape(k.contour, c, "premise");
        same_formula(n.kids[0].pre, e_bin(Op::And, n.pre, p->cond), "then premise pre");
        same_formula(n.kids[1].pre, e_bin(Op::And, n.pre, e_un(Op::Not, p->cond)), "else premise pre");
        same_formula(n.kids[0].post, n.post, "then premise post");
        same_formula(n.kids[1].post, n.post, "else premise post");
        return;
      }
      case Rule::AutoWhileT:
      case Rule::AutoWhileS: {
        arity(n, 1);
        PK want = n.rule == Rule::AutoWhileT ? PK::WhileT : PK::WhileS;
        if (p->kind != want) proof_error(std::string("ProgramMismatch: ") + rule_name(n.rule) + " over " + outline(p));
        expect_prog(n.kids[0].prog, p->a, "premise");
        ProgramType bt = program_type(p->a);
        bool dummy = n.rule == Rule::AutoWhileT
                         ? nil_normalize(bt.w)->kind == TKind::Nil && nil_normalize(bt.e)->kind == TKind::Nil
                         : nil_normalize(bt.n)->kind == TKind::Nil && nil_normalize(bt.s)->kind == TKind::Nil;
        if (!dummy)
          proof_error(std::string("NonDummyInterface: the body of ") + (n.rule == Rule::AutoWhileT ? "while_t" : "while_s") +
                      " has interface " + to_text(bt) + "; the classical rule needs nil " +
                      (n.rule == Rule::AutoWhileT ? "west/east" : "north/south"));
        const Node& k = n.kids[0];
        expect_same_shape(k.contour, c, "premise");
        same_formula(k.pre, e_bin(Op::And, n.pre, p->cond), "premise pre (Inv && Cond)");
        same_formula(k.post, n.pre, "premise post (Inv)");
        same_formula(n.post, e_bin(Op::And, n.pre, e_un(Op::Not, p->cond)), "conclusion post (Inv && !Cond)");
        return;
      }
      case Rule::STWhile: {
        arity(n, 1);
        if (p->kind != PK::WhileST) proof_error("ProgramMismatch: stwhile over " + outline(p));
        const Node& k = n.kids[0];
        expect_prog(k.prog, p->a, "premise");
        expect_same_shape(k.contour, c, "premise");
        same_formula(k.pre, e_bin(Op::And, n.pre, p->cond), "premise pre (Inv && Cond)");
        same_formula(n.post, e_bin(Op::And, n.pre, e_un(Op::Not, p->cond)), "conclusion post (Inv && !Cond)");
        return;
      }
      case Rule::SimpleFor: {
        if (p->kind != PK::ForS) proof_error("ProgramMismatch: simple-for over " + outline(p));
        if (!p->init || p->init->kind != EK::Int || p->init->num != 0)
          proof_error("ProgramMismatch: simple-for needs a loop starting at 0");
        const std::string& i = p->name;
        if (prog_assigns(p->a, i)) proof_error("VariableMutated(" + i + "): the loop body assigns the loop variable");
        size_t a = n.kids.size();
        if (a == 0) proof_error("ArityError: simple-for needs at least one premise");
        if (c.fe.size() % a) shape_mismatch("conclusion", c, "a focus of a multiple of " + std::to_string(a) + " lines");
        size_t l = c.fe.size() / a;
        std::vector<ExprP> chain;  // C_0 .. C_{a-1}
        for (size_t j = 0; j < a; ++j) {
          const Node& k = n.kids[j];
          expect_prog(k.prog, p->a, "premise " + std::to_string(j));
          expect_shape(k.contour,
                       {c.tau + c.fe.substr(0, l * j), c.fn, c.fe.substr(l * j, l), c.fe.substr(l * (j + 1)) + c.sigma},
                       "premise " + std::to_string(j));
          // C_j is the premise pre without the conjunct i == j
          std::string k1 = formula_key(e_bin(Op::Eq, e_var(i), e_int(static_cast<int64_t>(j))));
          std::string k2 = formula_key(e_bin(Op::Eq, e_int(static_cast<int64_t>(j)), e_var(i)));
          std::vector<ExprP> rest;
          for (auto& conj : conjuncts(normalize_formula(k.pre))) {
            std::string kk = formula_key(conj);
            if (kk != k1 && kk != k2) rest.push_back(conj);
          }
          ExprP cj = conjoin(rest);
          if (free_names(cj).count(i))
            proof_error("ChainBroken(" + std::to_string(j) + "): the loop variable " + i + " occurs in C_" + std::to_string(j) +
                        " beyond the conjunct " + i + " == " + std::to_string(j));
          chain.push_back(cj);
        }
        same_formula(chain[0], n.pre, "ChainBroken(0): conclusion pre vs C_0");
        for (size_t j = 0; j + 1 < a; ++j)
          if (!formula_equal(n.kids[j].post, chain[j + 1]))
            proof_error("ChainBroken(" + std::to_string(j) + "): post of premise " + std::to_string(j) + " is not C_" +
                        std::to_string(j + 1));
        same_formula(n.kids[a - 1].post, n.post, "ChainBroken(" + std::to_string(a - 1) + "): last post vs conclusion post");
        if (mentions_old(n.pre) || mentions_old(n.post)) proof_error("old(...) is not allowed in a simple-for conclusion");
        return;
      }
      case Rule::Implication: {
        arity(n, 1);
        const Node& k = n.kids[0];
        expect_prog(k.prog, p, "premise");
        expect_same_shape(k.contour, c, "premise");
        for (const ExprP& f : {n.pre, n.post, k.pre, k.post})
          if (mentions_old(f)) proof_error("old(...) is not allowed around an implication node");
        return;
      }
    }
  }

  std::vector<LineTypes> frames(const Node& n, const LineTypes& frame) {
    const ContourShape& c = n.contour;
    Seq fh = frame_h(c, frame), fv = frame_v(c, frame);
    size_t tau_h = std::count_if(c.tau.begin(), c.tau.end(), [](char x) { return x == 'E' || x == 'e'; });
    size_t sig_v = std::count_if(c.sigma.begin(), c.sigma.end(), [](char x) { return x == 'N' || x == 'n'; });
    std::vector<LineTypes> out;
    switch (n.rule) {
      case Rule::HComp: {
        size_t l = n.kids[0].contour.fe.size();
        if (l > c.fe.size()) l = c.fe.size();
        Seq tau = slice(fh, 0, tau_h), sig = slice(fh, tau_h + c.fe.size(), fh.size());
        ProgramType ta = program_type(n.prog->a), tb = program_type(n.prog->b);
        Seq h1 = cat({tau, focus_block(c.fe.substr(0, l)), block(c.fe.substr(l), tb.n), sig});
        Seq h2 = cat({tau, block(c.fe.substr(0, l), ta.s), focus_block(c.fe.substr(l)), sig});
        out.push_back(child_types(n.kids[0].contour, h1, fv));
        out.push_back(child_types(n.kids[1].contour, h2, fv));
        return out;
      }
      case Rule::VComp: {
        size_t k = std::min(n.kids[0].contour.fn.size(), c.fn.size());
        std::string down(c.fn.rbegin(), c.fn.rend());  // top-down
        Seq sig = slice(fv, 0, sig_v), tau = slice(fv, sig_v + c.fn.size(), fv.size());
        ProgramType ta = program_type(n.prog->a), tb = program_type(n.prog->b);
        Seq v1 = cat({sig, focus_block(down.substr(0, k)), block(down.substr(k), tb.w), tau});
        Seq v2 = cat({sig, block(down.substr(0, k), ta.e), focus_block(down.substr(k)), tau});
        out.push_back(child_types(n.kids[0].contour, fh, v1));
        out.push_back(child_types(n.kids[1].contour, fh, v2));
        return out;
      }
      case Rule::SimpleFor: {
        size_t a = n.kids.size(), l = c.fe.size() / a;
        ProgramType body = program_type(n.prog->a);
        Seq tau = slice(fh, 0, tau_h), sig = slice(fh, tau_h + c.fe.size(), fh.size());
        for (size_t j = 0; j < a; ++j) {
          Seq h = tau;
          for (size_t b = 0; b < a; ++b) {
            std::string letters = c.fe.substr(b * l, l);
            Seq part = b < j ? block(letters, body.s) : b == j ? focus_block(letters) : block(letters, body.n);
            h.insert(h.end(), part.begin(), part.end());
          }
          h.insert(h.end(), sig.begin(), sig.end());
          out.push_back(child_types(n.kids[j].contour, h, fv));
        }
        return out;
      }
      default:
        for (auto& k : n.kids) out.push_back(child_types(k.contour, fh, fv));
        return out;
    }
  }

  LineTypes pre_side(const Node& n, const LineTypes& frame) {
    ProgramType t = program_type(n.prog);
    return side_types(n.contour, frame, t.w, t.n);
  }
  LineTypes post_side(const Node& n, const LineTypes& frame) {
    ProgramType t = program_type(n.prog);
    return side_types(n.contour, frame, t.e, t.s);
  }

  // Enumerates `from` and checks `to` on each binding; false with a witness on the first failure.
  bool implies(const ExprP& from, const ExprP& to, const ContourShape& c, const LineTypes& types, NodeReport& r,
               const std::string& what) {
    if (formula_equal(from, to)) return true;
    EnumStats st;
    bool good = true;
    enumerate(c, types, d_, from, st, [&](const ContourBinding& b) {
      if (eval_formula(to, b)) return true;
      good = false;
      r.verdict = Verdict::Counterexample;
      r.message = "SideConditionFailed: " + what + " fails at " + to_text(b);
      r.witness = {{"binding", to_json(b)}};
      return false;
    });
    r.enumerated += st.visited;
    r.satisfying += st.satisfying;
    return good;
  }

  void dynamic_check(const Node& n, const LineTypes& frame, NodeReport& r) {
    const ContourShape& c = n.contour;
    switch (n.rule) {
      case Rule::Basic: {
        const Module& m = *n.prog->module;
        if (mentions_old(n.pre)) proof_error("old(...) is not allowed in a pre-condition");
        EnumStats st;
        enumerate(c, pre_side(n, frame), d_, n.pre, st, [&](const ContourBinding& pre) {
          auto [t, s] = focus_items(c, pre);
          if (t.size() != (m.listen.empty() ? 0u : 1u) || s.size() != (m.read.empty() ? 0u : 1u)) return true;
          for (auto& io : explorer_.module_outcomes(m, t.empty() ? nullptr : t[0], s.empty() ? nullptr : s[0])) {
            ++r.outcomes;
            std::vector<Value> e, so;
            if (io.east) e.push_back(io.east);
            if (io.south) so.push_back(io.south);
            ContourBinding post = bind_borders(c, e, so, pre);
            if (!eval_formula(n.post, post, &pre)) {
              r.verdict = Verdict::Counterexample;
              r.message = "Counterexample: pre " + to_text(pre) + " gives post " + to_text(post);
              r.witness = {{"pre", to_json(pre)}, {"post", to_json(post)}};
              return false;
            }
          }
          return true;
        });
        r.enumerated = st.visited;
        r.satisfying = st.satisfying;
        return;
      }
      case Rule::STWhile: {
        const Node& k = n.kids[0];
        implies(k.post, n.pre, c, post_side(k, frame), r, "C' -> Inv");
        return;
      }
      case Rule::SimpleFor: {
        // the loop runs exactly as many times as there are premises
        const ExprP& bound = n.prog->cond->kids[1];
        int64_t a = static_cast<int64_t>(n.kids.size());
        std::string k1 = formula_key(e_bin(Op::Eq, bound, e_int(a))), k2 = formula_key(e_bin(Op::Eq, e_int(a), bound));
        bool syntactic = false;
        for (auto& conj : conjuncts(normalize_formula(n.pre))) {
          std::string kk = formula_key(conj);
          syntactic = syntactic || kk == k1 || kk == k2;
        }
        if (!syntactic) implies(n.pre, e_bin(Op::Eq, bound, e_int(a)), c, pre_side(n, frame), r, "pre -> loop bound");
        return;
      }
      case Rule::Implication: {
        const Node& k = n.kids[0];
        if (implies(n.pre, k.pre, c, pre_side(n, frame), r, "D -> C"))
          implies(k.post, n.post, c, post_side(n, frame), r, "C' -> D'");
        return;
      }
      default: return;
    }
  }

  const Domain& d_;
  int64_t param_;
  std::vector<NodeReport>& out_;
  Explorer explorer_;
};

// A root node has no enclosing rule to type its frame lines; they are taken to carry what the program
// itself reads (horizontal) or listens to (vertical), one line each.
LineTypes root_frame(const Node& n) {
  LineTypes f;
  if (!n.prog || !n.error.empty()) return f;
  ProgramType t;
  try {
    t = program_type(n.prog);
  } catch (const Error&) {
    return f;
  }
  auto first = [](const Type& a, const Type& b) {
    Type x = nil_normalize(a ? a : t_nil());
    if (x->kind == TKind::Nil) x = nil_normalize(b ? b : t_nil());
    return line_types(x, 1)[0];
  };
  f.h.assign(n.contour.h_count(), first(t.n, t.s));
  f.v.assign(n.contour.v_count(), first(t.w, t.e));
  return f;
}

}  // namespace

// ---------- reports ----------

bool Report::ok() const {
  return std::all_of(nodes.begin(), nodes.end(), [](const NodeReport& n) { return n.verdict == Verdict::Valid; });
}

size_t Report::count(Verdict v) const {
  return std::count_if(nodes.begin(), nodes.end(), [&](const NodeReport& n) { return n.verdict == v; });
}

std::string Report::table(bool timings) const {
  std::string out;
  char buf[512];
  std::snprintf(buf, sizeof buf, "%-3s %-14s %-13s %-15s %11s %11s %10s%s\n", "N", "node", "rule", "verdict", "enumerated",
                "satisfying", "outcomes", timings ? "  seconds" : "");
  out += buf;
  for (auto& n : nodes) {
    std::snprintf(buf, sizeof buf, "%-3lld %-14s %-13s %-15s %11lld %11lld %10lld", static_cast<long long>(n.param),
                  n.path.c_str(), rule_name(n.rule), verdict_name(n.verdict), static_cast<long long>(n.enumerated),
                  static_cast<long long>(n.satisfying), static_cast<long long>(n.outcomes));
    out += buf;
    if (timings) {
      std::snprintf(buf, sizeof buf, " %8.2f", n.seconds);
      out += buf;
    }
    out += "\n";
    if (!n.message.empty()) out += "    " + n.message + "\n";
  }
  std::snprintf(buf, sizeof buf, "%zu nodes: %zu valid, %zu counterexamples, %zu rejected\n", nodes.size(),
                count(Verdict::Valid), count(Verdict::Counterexample), count(Verdict::Rejected));
  out += buf;
  return out;
}

nlohmann::json Report::to_json() const {
  nlohmann::json j;
  j["schema"] = "agapia.verify/1";
  j["script"] = script;
  j["ok"] = ok();
  j["nodes"] = nlohmann::json::array();
  for (auto& n : nodes) {
    nlohmann::json x = {{"path", n.path},           {"param", n.param},
                        {"rule", rule_name(n.rule)}, {"contour", n.contour},
                        {"program", n.program},     {"verdict", verdict_name(n.verdict)},
                        {"message", n.message},     {"enumerated", n.enumerated},
                        {"satisfying", n.satisfying}, {"outcomes", n.outcomes}};
    if (!n.witness.is_null()) x["witness"] = n.witness;
    j["nodes"].push_back(x);
  }
  return j;
}

Report check_proof(const ProofScript& s, const Domain& d) {
  Report r;
  r.script = s.name;
  if (s.proofs.empty() && s.lemmas.empty()) return r;
  int64_t lo = s.has_param ? s.param_lo : 0, hi = s.has_param ? s.param_hi : 0;
  if (s.has_param && d.n_max) hi = *d.n_max, lo = std::min(lo, hi);
  for (int64_t p = lo; p <= hi; ++p) {
    Elaborator el(s, p);
    Domain dp = d;
    el.fields(dp);
    Checker ck(dp, p, r.nodes);
    size_t k = 0;
    for (auto& e : s.proofs) {
      Node n = el.node(e, s.proofs.size() == 1 ? "proof" : "proof" + std::to_string(k++), {}, nullptr, 0);
      ck.check(n, root_frame(n));
    }
    k = 0;
    for (auto& e : s.lemmas)
      for (auto& n : el.roots(e, "lemma" + std::to_string(k++))) ck.check(n, root_frame(n));
  }
  return r;
}

// ---------- soundness harness ----------

HarnessReport soundness_harness(const Obligation& ob) {
  auto t0 = std::chrono::steady_clock::now();
  HarnessReport r;
  r.path = ob.path;
  r.param = ob.param;
  const HoareTriple& t = ob.triple;
  const ContourShape& c = t.contour;
  ProgramType pt = program_type(t.prog);
  LineTypes types = side_types(c, ob.frame, pt.w, pt.n);
  Explorer ex(ob.domain.cap);
  EnumStats st;
  auto violation = [&](const std::string& what, const nlohmann::json& w) {
    if (r.violations++ == 0) {
      r.first = what;
      r.witness = w;
    }
  };
  auto check_post = [&](const ContourBinding& post, const ContourBinding* pre) {
    ++r.scenarios;
    try {
      if (!eval_formula(t.post, post, pre))
        violation("post fails at " + to_text(post) + (pre ? " from " + to_text(*pre) : ""),
                  {{"post", to_json(post)}, {"pre", pre ? to_json(*pre) : nlohmann::json()}});
    } catch (const Error& e) {
      violation(std::string("post cannot be evaluated: ") + e.what(), {{"post", to_json(post)}});
    }
  };
  bool shared = !mentions_old(t.post) && frame_is_nil(c, ob.frame);
  if (shared) {
    std::vector<Explorer::Borders> inits;
    std::unordered_set<Value, ValueHash, ValueEq> seen;
    enumerate(c, types, ob.domain, t.pre, st, [&](const ContourBinding& b) {
      auto [w, n] = focus_items(c, b);
      Value key = make_tuple({make_list(w), make_list(n)});
      if (seen.insert(key).second) inits.push_back({w, n});
      return true;
    });
    r.initial = static_cast<int64_t>(inits.size());
    if (!inits.empty()) {
      size_t wn = inits[0].first.size(), nn = inits[0].second.size();
      for (auto& o : ex.explore_union(t.prog, inits)) {
        if (o.west_used != wn || o.north_used != nn) {
          ++r.skipped;
          continue;
        }
        check_post(bind_borders(c, o.east, o.south, {}), nullptr);
      }
    }
  } else {
    enumerate(c, types, ob.domain, t.pre, st, [&](const ContourBinding& b) {
      ++r.initial;
      auto [w, n] = focus_items(c, b);
      std::vector<Outcome> outs;
      try {
        outs = ex.explore(t.prog, w, n);
      } catch (const Error& e) {
        if (e.kind != ErrorKind::Border) throw;
        ++r.skipped;
        return true;
      }
      for (auto& o : outs) {
        if (o.west_used != w.size() || o.north_used != n.size()) {
          ++r.skipped;
          continue;
        }
        check_post(bind_borders(c, o.east, o.south, b), &b);
      }
      return true;
    });
  }
  r.seconds = since(t0);
  return r;
}

std::vector<HarnessReport> soundness_harness(const Report& rep) {
  std::vector<HarnessReport> out;
  for (auto& n : rep.nodes)
    if (n.verdict == Verdict::Valid && n.obligation) out.push_back(soundness_harness(*n.obligation));
  return out;
}

}  // namespace agapia
