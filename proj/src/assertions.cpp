#include "agapia/assertions.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <memory>

#include "agapia/error.hpp"
#include "agapia/syntax.hpp"

namespace agapia {

namespace {

[[noreturn]] void contour_error(const std::string& m) { fail(ErrorKind::Contour, "ContourError: " + m); }
[[noreturn]] void formula_error(const std::string& m) { fail(ErrorKind::Formula, "FormulaError: " + m); }

bool is_v(char c) { return c == 'N' || c == 'n'; }
bool is_h(char c) { return c == 'E' || c == 'e'; }

size_t count_v(const std::string& w) { return std::count_if(w.begin(), w.end(), is_v); }
size_t count_h(const std::string& w) { return std::count_if(w.begin(), w.end(), is_h); }

// Letters of one kind in path order.
std::string letters(const std::string& w, bool (*pred)(char)) {
  std::string out;
  for (char c : w)
    if (pred(c)) out += c;
  return out;
}

class MapEnv : public Env {
 public:
  explicit MapEnv(const std::map<std::string, int64_t>& m) : m_(m) {}
  Value var(const std::string& name, const Span&) const override {
    auto it = m_.find(name);
    if (it == m_.end()) contour_error("unknown exponent parameter '" + name + "'");
    return make_int(it->second);
  }

 private:
  const std::map<std::string, int64_t>& m_;
};

void run_length(std::string& out, const std::string& w) {
  for (size_t i = 0; i < w.size();) {
    size_t j = i;
    while (j < w.size() && w[j] == w[i]) ++j;
    if (!out.empty() && out.back() != '(') out += ' ';
    out += w[i];
    if (j - i > 1) out += "^" + std::to_string(j - i);
    i = j;
  }
}

}  // namespace

// ---------- contours ----------

size_t ContourShape::h_count() const { return count_h(pre_word()); }
size_t ContourShape::v_count() const { return count_v(pre_word()); }

std::vector<size_t> ContourShape::focus_h() const {
  std::vector<size_t> out;
  size_t base = count_h(tau);
  for (size_t i = 0; i < count_h(fe); ++i) out.push_back(base + i);
  return out;
}

std::vector<size_t> ContourShape::focus_v() const {
  // Path order runs bottom-up; index 0 is the topmost line.
  size_t total = v_count(), base = count_v(tau), k = count_v(fn);
  std::vector<size_t> out;
  for (size_t p = base + k; p-- > base;) out.push_back(total - 1 - p);
  return out;
}

char ContourShape::h_letter(size_t i) const {
  std::string hs = letters(pre_word(), is_h);
  if (i >= hs.size()) contour_error("horizontal line " + std::to_string(i) + " out of range");
  return hs[i];
}

char ContourShape::v_letter(size_t i) const {
  std::string vs = letters(pre_word(), is_v);
  if (i >= vs.size()) contour_error("vertical line " + std::to_string(i) + " out of range");
  return vs[vs.size() - 1 - i];
}

bool ContourShape::in_focus_h(size_t i) const { return i >= count_h(tau) && i < count_h(tau) + count_h(fe); }

bool ContourShape::in_focus_v(size_t i) const {
  size_t p = v_count() - 1 - i, base = count_v(tau);
  return p >= base && p < base + count_v(fn);
}

std::string ContourShape::text() const {
  std::string out;
  run_length(out, tau);
  if (!out.empty()) out += ' ';
  out += '(';
  run_length(out, fn + fe);
  out += ')';
  run_length(out, sigma);
  return out;
}

ContourShape parse_contour(std::string_view text, const std::map<std::string, int64_t>& params, bool* post) {
  std::string before, focus, after;
  int stage = 0;  // 0 before the group, 1 inside, 2 after
  bool had_group = false;
  size_t i = 0;
  auto skip = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  MapEnv env(params);
  while (true) {
    skip();
    if (i >= text.size()) break;
    char c = text[i];
    if (c == '(') {
      if (stage != 0) contour_error("only one focus group is allowed in '" + std::string(text) + "'");
      stage = 1, had_group = true, ++i;
      continue;
    }
    if (c == ')') {
      if (stage != 1) contour_error("unbalanced ')' in '" + std::string(text) + "'");
      stage = 2, ++i;
      continue;
    }
    if (!is_v(c) && !is_h(c)) contour_error("unexpected '" + std::string(1, c) + "' in contour '" + std::string(text) + "'");
    ++i;
    int64_t count = 1;
    skip();
    if (i < text.size() && text[i] == '^') {
      ++i;
      skip();
      std::string ex;
      if (i < text.size() && text[i] == '(') {
        int depth = 0;
        size_t start = i;
        for (; i < text.size(); ++i) {
          if (text[i] == '(') ++depth;
          if (text[i] == ')' && --depth == 0) break;
        }
        if (i >= text.size()) contour_error("unbalanced exponent in '" + std::string(text) + "'");
        ex = std::string(text.substr(start, ++i - start));
      } else {
        size_t start = i;
        while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) ++i;
        ex = std::string(text.substr(start, i - start));
      }
      if (ex.empty()) contour_error("missing exponent in '" + std::string(text) + "'");
      Value v;
      try {
        v = eval_expr(parse_expr(ex), env, nullptr);
      } catch (const Error& e) {
        if (e.kind == ErrorKind::Contour) throw;
        contour_error("bad exponent '" + ex + "': " + e.what());
      }
      if (!v || v->kind != VKind::Int || v->num < 0 || v->num > 4096)
        contour_error("exponent '" + ex + "' must be a small nonnegative integer");
      count = v->num;
    }
    std::string& dst = stage == 0 ? before : stage == 1 ? focus : after;
    dst.append(static_cast<size_t>(count), c);
  }
  if (stage == 1) contour_error("unclosed focus group in '" + std::string(text) + "'");
  if (!had_group) std::swap(focus, before);

  ContourShape s;
  s.tau = before, s.sigma = after;
  // N..E (pre) or E..N (post)
  size_t first_h = focus.find_first_of("Ee"), last_v = focus.find_last_of("Nn");
  size_t first_v = focus.find_first_of("Nn"), last_h = focus.find_last_of("Ee");
  bool pre_form = first_h == std::string::npos || last_v == std::string::npos || last_v < first_h;
  bool post_form = first_v == std::string::npos || last_h == std::string::npos || last_h < first_v;
  if (!pre_form && !post_form) contour_error("focus group '" + focus + "' must be N..E or E..N");
  bool is_post = !pre_form;
  s.fn = letters(focus, is_v);
  s.fe = letters(focus, is_h);
  if (post) *post = is_post;
  return s;
}

ContourShape strip_padding(const ContourShape& c) {
  auto strip = [](const std::string& w) {
    std::string out;
    for (char ch : w)
      if (ch == 'N' || ch == 'E') out += ch;
    return out;
  };
  return {strip(c.tau), strip(c.fn), strip(c.fe), strip(c.sigma)};
}

// ---------- bindings ----------

bool binding_equal(const ContourBinding& a, const ContourBinding& b) {
  if (!items_equal(a.h, b.h) || !items_equal(a.v, b.v) || a.ghosts.size() != b.ghosts.size()) return false;
  for (auto& [k, v] : a.ghosts) {
    auto it = b.ghosts.find(k);
    if (it == b.ghosts.end() || !value_equal(v, it->second)) return false;
  }
  return true;
}

nlohmann::json to_json(const ContourBinding& b) {
  nlohmann::json j;
  j["h"] = nlohmann::json::array();
  j["v"] = nlohmann::json::array();
  for (auto& x : b.h) j["h"].push_back(to_json(x));
  for (auto& x : b.v) j["v"].push_back(to_json(x));
  j["ghosts"] = nlohmann::json::object();
  for (auto& [k, v] : b.ghosts) j["ghosts"][k] = to_json(v);
  return j;
}

std::string to_text(const ContourBinding& b) {
  std::string out;
  auto add = [&](const std::string& s) { out += (out.empty() ? "" : "; ") + s; };
  for (size_t i = 0; i < b.v.size(); ++i) add("v" + std::to_string(i) + " = " + to_text(b.v[i]));
  for (size_t i = 0; i < b.h.size(); ++i) add("h" + std::to_string(i) + " = " + to_text(b.h[i]));
  for (auto& [k, v] : b.ghosts) add(k + " = " + to_text(v));
  return out;
}

ContourBinding bind_contour(const ContourShape& c, const Scenario& s, size_t row, size_t col, bool post) {
  std::string word = post ? c.post_word() : c.pre_word();
  int64_t x = static_cast<int64_t>(col), y = static_cast<int64_t>(row + count_v(c.fn));
  for (size_t k = c.tau.size(); k-- > 0;) {  // walk tau backwards
    if (is_v(c.tau[k])) ++y;
    else --x;
  }
  const int64_t rows = static_cast<int64_t>(s.rows()), cols = static_cast<int64_t>(s.cols());
  auto out_of_bounds = [&] {
    contour_error("ContourOutOfBounds: contour " + c.text() + " at (" + std::to_string(row) + "," + std::to_string(col) +
                  ") leaves the " + std::to_string(rows) + "x" + std::to_string(cols) + " scenario");
  };
  ContourBinding b;
  std::vector<Value> vs;
  for (char ch : word) {
    if (is_v(ch)) {
      int64_t r = y - 1;
      if (r < 0 || r >= rows || x < 0 || x > cols) out_of_bounds();
      vs.push_back(x < cols ? s.at(r, x).w : s.at(r, cols - 1).e);
      --y;
    } else {
      if (x < 0 || x >= cols || y < 0 || y > rows) out_of_bounds();
      b.h.push_back(y < rows ? s.at(y, x).n : s.at(rows - 1, x).s);
      ++x;
    }
  }
  b.v.assign(vs.rbegin(), vs.rend());
  return b;
}

ContourBinding bind_borders(const ContourShape& c, const std::vector<Value>& temporal,
                            const std::vector<Value>& spatial, const ContourBinding& frame) {
  ContourBinding b;
  b.ghosts = frame.ghosts;
  b.h.assign(c.h_count(), nullptr);
  b.v.assign(c.v_count(), nullptr);
  for (size_t i = 0; i < b.h.size(); ++i)
    if (!c.in_focus_h(i) && i < frame.h.size()) b.h[i] = frame.h[i];
  for (size_t i = 0; i < b.v.size(); ++i)
    if (!c.in_focus_v(i) && i < frame.v.size()) b.v[i] = frame.v[i];
  auto place = [&](const std::vector<Value>& items, const std::vector<size_t>& lines, std::vector<Value>& dst,
                   bool vertical) {
    std::vector<Value> its = normalize_items(items);
    size_t next = 0;
    for (size_t idx : lines) {
      char letter = vertical ? c.v_letter(idx) : c.h_letter(idx);
      if (letter == 'n' || letter == 'e' || next >= its.size()) continue;
      dst[idx] = its[next++];
    }
    if (next < its.size())
      contour_error("ContourOutOfBounds: " + std::to_string(its.size()) + (vertical ? " temporal" : " spatial") +
                    " items do not fit the focus of " + c.text());
  };
  place(temporal, c.focus_v(), b.v, true);
  place(spatial, c.focus_h(), b.h, false);
  return b;
}

// ---------- formula evaluation ----------

namespace {

// old(...) body: quantifier variables of the enclosing formula stay visible.
class OldScope : public Env {
 public:
  OldScope(const Env& scope, const Env& old) : scope_(scope), old_(old) {}
  Value var(const std::string& name, const Span& w) const override {
    Value v;
    if (scope_.bound(name, v)) return v;
    return old_.var(name, w);
  }
  bool bound(const std::string& name, Value& out) const override { return scope_.bound(name, out); }
  bool call(const Expr& e, const Env& scope, Value& out) const override { return old_.call(e, scope, out); }
  bool family(const std::string& n, int64_t k, Value& out) const override {
    Value tmp;
    if (scope_.bound(n, tmp)) return false;
    return old_.family(n, k, out);
  }

 private:
  const Env& scope_;
  const Env& old_;
};

}  // namespace

BindingEnv::BindingEnv(const ContourBinding& b, const ContourBinding* old) : b_(b), old_(old) {
  auto scan = [&](const std::vector<Value>& lines) {
    for (auto& v : lines) {
      if (!v || v->kind != VKind::Tuple) continue;
      for (size_t i = 0; i < v->names.size() && i < v->kids.size(); ++i) {
        auto it = std::find_if(names_.begin(), names_.end(), [&](const Entry& e) { return e.name == v->names[i]; });
        if (it == names_.end()) names_.push_back({v->names[i], {v->kids[i]}});
        else it->values.push_back(v->kids[i]);
      }
    }
  };
  scan(b.h);
  scan(b.v);
}

const BindingEnv::Entry* BindingEnv::find(const std::string& name) const {
  for (auto& e : names_)
    if (e.name == name) return &e;
  return nullptr;
}

bool BindingEnv::carries(const std::string& name) const { return b_.ghosts.count(name) || find(name); }

Value BindingEnv::var(const std::string& name, const Span&) const {
  auto g = b_.ghosts.find(name);
  if (g != b_.ghosts.end()) return g->second;
  const Entry* e = find(name);
  if (!e) formula_error("UnboundVariable: '" + name + "' is not carried by any contour line");
  if (e->values.size() != 1)
    formula_error("'" + name + "' is carried by " + std::to_string(e->values.size()) + " lines; index it as " + name + "[k]");
  return e->values[0];
}

bool BindingEnv::family(const std::string& n, int64_t k, Value& out) const {
  if (b_.ghosts.count(n)) return false;
  const Entry* e = find(n);
  if (!e) return false;
  if (e->values.size() == 1 && e->values[0] && e->values[0]->kind == VKind::Seq) return false;
  if (k < 0 || static_cast<size_t>(k) >= e->values.size())
    formula_error(n + "[" + std::to_string(k) + "]: only " + std::to_string(e->values.size()) + " lines carry " + n);
  out = e->values[k];
  return true;
}

bool BindingEnv::call(const Expr& e, const Env& scope, Value& out) const {
  if (e.name != "old") return false;
  if (e.kids.size() != 1) formula_error("old takes one argument");
  if (!old_) formula_error("old(...) is only meaningful in a post-condition");
  BindingEnv pre(*old_);
  OldScope s(scope, pre);
  out = eval_expr(e.kids[0], s, nullptr);
  return true;
}

bool eval_formula(const ExprP& f, const ContourBinding& b, const ContourBinding* old) {
  BindingEnv env(b, old);
  try {
    return eval_bool(f, env, nullptr);
  } catch (const Error& e) {
    if (e.kind == ErrorKind::Runtime) formula_error(e.what());
    throw;
  }
}

ExprP parse_formula(std::string_view text) {
  try {
    return parse_expr(text);
  } catch (const Error& e) {
    formula_error("cannot parse '" + std::string(text) + "': " + e.what());
  }
}

// ---------- syntactic operations ----------

namespace {

void collect_free(const ExprP& e, std::vector<std::string>& bound, std::set<std::string>& out) {
  if (!e) return;
  if (e->kind == EK::Var) {
    if (std::find(bound.begin(), bound.end(), e->name) == bound.end()) out.insert(e->name);
    return;
  }
  if (e->kind == EK::Quant) {
    collect_free(e->kids[0], bound, out);
    bound.push_back(e->name);
    collect_free(e->kids[1], bound, out);
    bound.pop_back();
    return;
  }
  for (auto& k : e->kids) collect_free(k, bound, out);
}

ExprP with_kids(const ExprP& e, std::vector<ExprP> kids) {
  auto c = std::make_shared<Expr>(*e);
  c->kids = std::move(kids);
  return c;
}

int fresh_counter = 0;

ExprP subst(const ExprP& e, const std::map<std::string, ExprP>& sub) {
  if (!e || sub.empty()) return e;
  if (e->kind == EK::Var) {
    auto it = sub.find(e->name);
    return it == sub.end() ? e : it->second;
  }
  if (e->kind == EK::Quant) {
    ExprP dom = subst(e->kids[0], sub);
    std::map<std::string, ExprP> inner = sub;
    inner.erase(e->name);
    std::string name = e->name;
    ExprP body = e->kids[1];
    bool capture = false;
    std::set<std::string> body_free = free_names(body);
    for (auto& [k, r] : inner)
      if (body_free.count(k) && free_names(r).count(name)) capture = true;
    if (capture) {
      std::string fresh;
      std::set<std::string> avoid = body_free;
      for (auto& [k, r] : inner)
        for (auto& n : free_names(r)) avoid.insert(n);
      do fresh = name + "_" + std::to_string(++fresh_counter);
      while (avoid.count(fresh));
      body = subst(body, {{name, e_var(fresh)}});
      name = fresh;
    }
    auto c = with_kids(e, {dom, subst(body, inner)});
    c->name = name;
    return c;
  }
  std::vector<ExprP> kids;
  bool changed = false;
  for (auto& k : e->kids) {
    kids.push_back(subst(k, sub));
    changed |= kids.back() != k;
  }
  return changed ? with_kids(e, std::move(kids)) : e;
}

ExprP expand(const ExprP& e, const std::map<std::string, FormulaDef>& defs, int depth, std::vector<std::string>& bound) {
  if (!e) return e;
  if (depth > 64) formula_error("definitions nest too deeply (recursive define?)");
  if (e->kind == EK::Var) {
    auto it = defs.find(e->name);
    if (it == defs.end() || std::find(bound.begin(), bound.end(), e->name) != bound.end()) return e;
    if (!it->second.params.empty()) formula_error(e->name + " needs " + std::to_string(it->second.params.size()) + " arguments");
    std::vector<std::string> none;
    return expand(it->second.body, defs, depth + 1, none);
  }
  if (e->kind == EK::Quant) {
    ExprP dom = expand(e->kids[0], defs, depth, bound);
    bound.push_back(e->name);
    ExprP body = expand(e->kids[1], defs, depth, bound);
    bound.pop_back();
    return with_kids(e, {dom, body});
  }
  std::vector<ExprP> kids;
  for (auto& k : e->kids) kids.push_back(expand(k, defs, depth, bound));
  if (e->kind == EK::Call) {
    auto it = defs.find(e->name);
    if (it != defs.end()) {
      if (it->second.params.size() != kids.size())
        formula_error(e->name + " expects " + std::to_string(it->second.params.size()) + " arguments, got " +
                      std::to_string(kids.size()));
      std::map<std::string, ExprP> sub;
      for (size_t i = 0; i < kids.size(); ++i) sub[it->second.params[i]] = kids[i];
      // the body is expanded first so that names inside it are not confused with the arguments
      std::vector<std::string> none;
      std::map<std::string, FormulaDef> rest = defs;
      for (auto& p : it->second.params) rest.erase(p);
      ExprP body = expand(it->second.body, rest, depth + 1, none);
      return subst(body, sub);
    }
  }
  return with_kids(e, std::move(kids));
}

void key(const ExprP& e, std::string& out) {
  auto list = [&](const std::vector<ExprP>& ks) {
    out += '(';
    for (size_t i = 0; i < ks.size(); ++i) {
      if (i) out += ',';
      key(ks[i], out);
    }
    out += ')';
  };
  switch (e->kind) {
    case EK::Int: out += std::to_string(e->num); return;
    case EK::Bool:
    case EK::Color: out += e->num ? "#t" : "#f"; return;
    case EK::Null: out += "{}"; return;
    case EK::SetLit: out += '{'; list(e->kids); out += '}'; return;
    case EK::Var: out += e->name; return;
    case EK::Field: key(e->kids[0], out); out += "." + e->name; return;
    case EK::Index: out += "ix"; list(e->kids); return;
    case EK::Unary: out += e->op == Op::Not ? "not" : "neg"; list(e->kids); return;
    case EK::Binary: out += op_symbol(e->op); list(e->kids); return;
    case EK::Mod: out += "mod"; list(e->kids); return;
    case EK::Call: out += "call:" + e->name; list(e->kids); return;
    case EK::TupleLit: out += "tup"; list(e->kids); return;
    case EK::Interval: out += "iv" + std::to_string(e->num); list(e->kids); return;
    case EK::Quant: out += (e->forall ? "A:" : "E:") + e->name; list(e->kids); return;
  }
}

bool is_lit_bool(const ExprP& e, bool v) { return (e->kind == EK::Bool || e->kind == EK::Color) && (e->num != 0) == v; }

ExprP norm(const ExprP& e, int depth) {
  if (e->kind == EK::Quant) {
    std::string name = "$" + std::to_string(depth);
    ExprP dom = norm(e->kids[0], depth);
    ExprP body = norm(subst(e->kids[1], {{e->name, e_var(name)}}), depth + 1);
    auto quant = [&](const ExprP& b) {
      auto c = with_kids(e, {dom, b});
      c->name = name;
      return c;
    };
    if (e->forall && body->kind == EK::Binary && body->op == Op::And) {
      // forall x: A && B  ==  (forall x: A) && (forall x: B)
      std::vector<ExprP> parts;
      std::function<void(const ExprP&)> flat = [&](const ExprP& x) {
        if (x->kind == EK::Binary && x->op == Op::And) {
          for (auto& k : x->kids) flat(k);
          return;
        }
        parts.push_back(quant(x));
      };
      flat(body);
      ExprP acc = parts[0];
      for (size_t i = 1; i < parts.size(); ++i) acc = e_bin(Op::And, acc, parts[i]);
      return acc;
    }
    return quant(body);
  }
  std::vector<ExprP> kids;
  for (auto& k : e->kids) kids.push_back(norm(k, depth));
  if (e->kind == EK::Unary && e->op == Op::Not) {
    const ExprP& a = kids[0];
    if (a->kind == EK::Unary && a->op == Op::Not) return a->kids[0];
    if (a->kind == EK::Bool || a->kind == EK::Color) return e_bool(a->num == 0);
  }
  if (e->kind == EK::Unary && e->op == Op::Neg && kids[0]->kind == EK::Int && kids[0]->num != INT64_MIN)
    return e_int(-kids[0]->num);
  if (e->kind == EK::Binary && (e->op == Op::And || e->op == Op::Or)) {
    bool conj = e->op == Op::And;
    std::vector<std::pair<std::string, ExprP>> ops;
    std::function<void(const ExprP&)> flat = [&](const ExprP& x) {
      if (x->kind == EK::Binary && x->op == e->op) {
        for (auto& k : x->kids) flat(k);
        return;
      }
      std::string k;
      key(x, k);
      ops.push_back({k, x});
    };
    for (auto& k : kids) flat(k);
    std::vector<ExprP> keep;
    std::sort(ops.begin(), ops.end(), [](auto& a, auto& b) { return a.first < b.first; });
    std::string last = "\x01";
    for (auto& [k, x] : ops) {
      if (is_lit_bool(x, !conj)) return e_bool(!conj);  // absorbing element
      if (is_lit_bool(x, conj) || k == last) continue;  // unit or duplicate
      keep.push_back(x);
      last = k;
    }
    if (keep.empty()) return e_bool(conj);
    ExprP acc = keep[0];  // rebuilt as a left-nested chain so the result stays evaluable
    for (size_t i = 1; i < keep.size(); ++i) acc = e_bin(e->op, acc, keep[i]);
    return acc;
  }
  if (e->kind == EK::Binary && e->op == Op::Implies) {
    if (is_lit_bool(kids[0], true)) return kids[1];
    if (is_lit_bool(kids[0], false) || is_lit_bool(kids[1], true)) return e_bool(true);
  }
  if (e->kind == EK::Binary && kids[0]->kind == EK::Int && kids[1]->kind == EK::Int) {
    int64_t a = kids[0]->num, b = kids[1]->num, r = 0;
    switch (e->op) {
      case Op::Add: if (!__builtin_add_overflow(a, b, &r)) return e_int(r); break;
      case Op::Sub: if (!__builtin_sub_overflow(a, b, &r)) return e_int(r); break;
      case Op::Mul: if (!__builtin_mul_overflow(a, b, &r)) return e_int(r); break;
      case Op::Lt: return e_bool(a < b);
      case Op::Le: return e_bool(a <= b);
      case Op::Gt: return e_bool(a > b);
      case Op::Ge: return e_bool(a >= b);
      case Op::Eq: return e_bool(a == b);
      case Op::Ne: return e_bool(a != b);
      default: break;
    }
  }
  if (e->kind == EK::Call && kids.size() == 2 && kids[0]->kind == EK::Int && kids[1]->kind == EK::Int) {
    int64_t a = kids[0]->num, b = kids[1]->num;
    if (e->name == "max") return e_int(std::max(a, b));
    if (e->name == "min") return e_int(std::min(a, b));
    if (e->name == "wrap" && b > 0) return e_int(((a % b) + b) % b);
  }
  if (e->kind == EK::Null) {
    auto c = std::make_shared<Expr>();
    c->kind = EK::SetLit;
    return c;
  }
  return with_kids(e, std::move(kids));
}

}  // namespace

std::set<std::string> free_names(const ExprP& e) {
  std::vector<std::string> bound;
  std::set<std::string> out;
  collect_free(e, bound, out);
  return out;
}

bool mentions_old(const ExprP& e) {
  if (!e) return false;
  if (e->kind == EK::Call && e->name == "old") return true;
  for (auto& k : e->kids)
    if (mentions_old(k)) return true;
  return false;
}

ExprP substitute(const ExprP& e, const std::map<std::string, ExprP>& sub) { return subst(e, sub); }

ExprP expand_defines(const ExprP& e, const std::map<std::string, FormulaDef>& defs) {
  std::vector<std::string> bound;
  return expand(e, defs, 0, bound);
}

ExprP normalize_formula(const ExprP& e) { return norm(e, 0); }

std::string formula_key(const ExprP& e) {
  std::string out;
  key(normalize_formula(e), out);
  return out;
}

bool formula_equal(const ExprP& a, const ExprP& b) { return formula_key(a) == formula_key(b); }

std::vector<ExprP> conjuncts(const ExprP& e) {
  std::vector<ExprP> out;
  if (e->kind == EK::Binary && e->op == Op::And) {
    for (auto& k : e->kids)
      for (auto& c : conjuncts(k)) out.push_back(c);
    return out;
  }
  if (e->kind == EK::Quant && e->forall) {
    auto parts = conjuncts(e->kids[1]);
    if (parts.size() > 1) {
      for (auto& p : parts) out.push_back(with_kids(e, {e->kids[0], p}));
      return out;
    }
  }
  if (is_lit_bool(e, true)) return out;
  return {e};
}

ExprP conjoin(const std::vector<ExprP>& parts) {
  if (parts.empty()) return e_bool(true);
  ExprP acc = parts[0];
  for (size_t i = 1; i < parts.size(); ++i) acc = e_bin(Op::And, acc, parts[i]);
  return acc;
}

// ---------- triples ----------

bool holds(const HoareTriple& t, const std::vector<Value>& west, const std::vector<Value>& north,
           const std::vector<Value>& east, const std::vector<Value>& south, const ContourBinding& frame) {
  ContourBinding pre = bind_borders(t.contour, west, north, frame);
  if (!eval_formula(t.pre, pre)) return true;
  ContourBinding post = bind_borders(t.contour, east, south, frame);
  return eval_formula(t.post, post, &pre);
}

bool holds(const HoareTriple& t, const Scenario& s, const ContourBinding& frame) {
  return holds(t, s.west(), s.north(), s.east(), s.south(), frame);
}

}  // namespace agapia
