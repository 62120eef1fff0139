#include <cctype>
#include <map>
#include <set>

#include "agapia/error.hpp"
#include "agapia/syntax.hpp"

namespace agapia {

ExprP e_int(int64_t v) {
  auto e = std::make_shared<Expr>();
  e->kind = EK::Int;
  e->num = v;
  return e;
}
ExprP e_bool(bool b) {
  auto e = std::make_shared<Expr>();
  e->kind = EK::Bool;
  e->num = b;
  return e;
}
ExprP e_var(const std::string& n) {
  auto e = std::make_shared<Expr>();
  e->kind = EK::Var;
  e->name = n;
  return e;
}
ExprP e_un(Op op, ExprP a) {
  auto e = std::make_shared<Expr>();
  e->kind = EK::Unary;
  e->op = op;
  e->kids = {std::move(a)};
  return e;
}
ExprP e_bin(Op op, ExprP a, ExprP b) {
  auto e = std::make_shared<Expr>();
  e->kind = EK::Binary;
  e->op = op;
  e->kids = {std::move(a), std::move(b)};
  return e;
}
ExprP e_call(const std::string& f, std::vector<ExprP> args) {
  auto e = std::make_shared<Expr>();
  e->kind = EK::Call;
  e->name = f;
  e->kids = std::move(args);
  return e;
}
ExprP e_field(ExprP base, const std::string& f) {
  auto e = std::make_shared<Expr>();
  e->kind = EK::Field;
  e->name = f;
  e->kids = {std::move(base)};
  return e;
}
ExprP e_index(ExprP base, ExprP idx) {
  auto e = std::make_shared<Expr>();
  e->kind = EK::Index;
  e->kids = {std::move(base), std::move(idx)};
  return e;
}

std::string leaf_text(const LeafType& t) {
  std::string s;
  switch (t.leaf) {
    case Leaf::Color: s = "{white,black}"; break;
    case Leaf::Int: s = t.axis == Axis::Spatial ? "sInt" : "tInt"; break;
    case Leaf::Bool: s = t.axis == Axis::Spatial ? "sBool" : "tBool"; break;
    case Leaf::Set: s = t.axis == Axis::Spatial ? "sIntSet" : "tIntSet"; break;
  }
  if (t.array) s += "[~]";
  return s;
}

static Type leaf_to_type(const LeafType& t) {
  switch (t.leaf) {
    case Leaf::Int: return t_int();
    case Leaf::Set: return t_set();
    default: return t_bool();
  }
}

Type decl_type(const Decl& d) {
  for (auto& t : d.types)
    if (!t) return t_never();
  switch (d.shape) {
    case Shape::Scalar: return leaf_to_type(*d.types[0]);
    case Shape::Array: return t_star(leaf_to_type(*d.types[0]));
    case Shape::Record: {
      std::vector<Type> kids;
      for (auto& t : d.types) kids.push_back(leaf_to_type(*t));
      return t_tuple(std::move(kids), d.fields);
    }
  }
  return t_never();
}

Type item_type(const std::vector<Decl>& decls) {
  if (decls.empty()) return t_nil();
  std::vector<Type> kids;
  std::vector<std::string> names;
  for (auto& d : decls) {
    kids.push_back(decl_type(d));
    names.push_back(d.name);
  }
  return t_tuple(std::move(kids), std::move(names));
}

namespace {

enum class TK : uint8_t { Ident, Int, Punct, Hash, End };

struct Tok {
  TK kind;
  std::string text;
  int64_t num = 0;
  Span span;
};

std::vector<Tok> lex(std::string_view s) {
  std::vector<Tok> out;
  uint32_t line = 1, col = 1;
  size_t i = 0;
  auto adv = [&](size_t n) {
    for (size_t k = 0; k < n; ++k) {
      if (s[i] == '\n') {
        ++line;
        col = 1;
      } else if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) {
        ++col;
      }
      ++i;
    }
  };
  auto err = [&](const std::string& m) {
    fail(ErrorKind::Parse, std::to_string(line) + ":" + std::to_string(col) + ": " + m);
  };
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      adv(1);
      continue;
    }
    if (c == '/' && i + 1 < s.size() && s[i + 1] == '/') {
      while (i < s.size() && s[i] != '\n') adv(1);
      continue;
    }
    Tok t;
    t.span.line = line;
    t.span.col = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t b = i;
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) adv(1);
      t.kind = TK::Ident;
      t.text = std::string(s.substr(b, i - b));
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t b = i;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) adv(1);
      t.kind = TK::Int;
      t.text = std::string(s.substr(b, i - b));
      try {
        t.num = std::stoll(t.text);
      } catch (...) {
        err("integer literal out of range");
      }
    } else if (c == '#') {
      size_t b = i;
      while (i < s.size() && s[i] == '#') adv(1);
      size_t n = i - b;
      if (n != 1 && n != 2 && n != 4) err("composition operator must be #, ## or ####");
      t.kind = TK::Hash;
      t.text = std::string(n, '#');
    } else if (s.substr(i, 3) == "\xe2\x88\xaa") {  // ∪
      adv(3);
      t.kind = TK::Ident;
      t.text = "union";
    } else if (s.substr(i, 3) == "\xe2\x88\xa9") {  // ∩
      adv(3);
      t.kind = TK::Ident;
      t.text = "inter";
    } else {
      static const char* puncts[] = {"<->", "==", "!=", "<=", ">=", "&&", "||", "->", "++", ":=", "(", ")", "{", "}", "[",
                                     "]", ",", ";", ":", ".", "=", "<", ">", "+", "-", "*", "/", "%", "!", "~", "'"};
      bool ok = false;
      for (const char* p : puncts) {
        std::string_view pv(p);
        if (s.substr(i, pv.size()) == pv) {
          t.kind = TK::Punct;
          t.text = std::string(pv);
          adv(pv.size());
          ok = true;
          break;
        }
      }
      if (!ok) err(std::string("unexpected character '") + c + "'");
    }
    t.span.end_line = line;
    t.span.end_col = col;
    out.push_back(std::move(t));
  }
  Tok e;
  e.kind = TK::End;
  e.span = {line, col, line, col};
  out.push_back(e);
  return out;
}

const std::set<std::string> kReserved = {"module", "listen", "read",   "speak",  "write",  "nil",   "new",    "if",
                                          "else",   "while",  "for",    "while_t", "while_s", "while_st", "for_s", "true",
                                          "false",  "white",  "black",  "null",   "delay",  "contains", "union", "minus",
                                          "inter",  "in",     "subset", "forall", "exists", "vars",  "mod"};

struct ParseAbort {};

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(lex(text)) {}

  std::vector<std::string> errors;

  const Tok& cur() const { return toks_[pos_]; }
  const Tok& ahead(size_t k) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool is(const char* p) const { return (cur().kind == TK::Punct || cur().kind == TK::Ident) && cur().text == p; }
  bool is_kw(const char* k) const { return cur().kind == TK::Ident && cur().text == k; }
  bool at_end() const { return cur().kind == TK::End; }
  void next() {
    if (!at_end()) ++pos_;
  }
  bool accept(const char* p) {
    if (is(p)) {
      next();
      return true;
    }
    return false;
  }
  [[noreturn]] void error(const std::string& m) {
    errors.push_back(std::to_string(cur().span.line) + ":" + std::to_string(cur().span.col) + ": " + m +
                     (at_end() ? " (at end of input)" : " near '" + cur().text + "'"));
    throw ParseAbort{};
  }
  void expect(const char* p) {
    if (!accept(p)) error(std::string("expected '") + p + "'");
  }
  std::string ident() {
    if (cur().kind != TK::Ident || kReserved.count(cur().text)) error("expected an identifier");
    std::string s = cur().text;
    next();
    return s;
  }
  Span here() const { return cur().span; }
  void close(Span& s) const {
    const Tok& prev = toks_[pos_ == 0 ? 0 : pos_ - 1];
    s.end_line = prev.span.end_line;
    s.end_col = prev.span.end_col;
  }

  // ----- types -----
  LeafType leaf_spec() {
    LeafType t;
    if (accept("{")) {
      if (!accept("white")) error("expected 'white'");
      expect(",");
      if (!accept("black")) error("expected 'black'");
      expect("}");
      t.leaf = Leaf::Color;
    } else {
      if (cur().kind != TK::Ident) error("expected a type");
      static const std::map<std::string, std::pair<Leaf, Axis>> names = {
          {"sInt", {Leaf::Int, Axis::Spatial}},      {"sn", {Leaf::Int, Axis::Spatial}},
          {"tInt", {Leaf::Int, Axis::Temporal}},     {"tn", {Leaf::Int, Axis::Temporal}},
          {"sBool", {Leaf::Bool, Axis::Spatial}},    {"sb", {Leaf::Bool, Axis::Spatial}},
          {"tBool", {Leaf::Bool, Axis::Temporal}},   {"tb", {Leaf::Bool, Axis::Temporal}},
          {"sIntSet", {Leaf::Set, Axis::Spatial}},   {"sset", {Leaf::Set, Axis::Spatial}},
          {"tIntSet", {Leaf::Set, Axis::Temporal}},  {"tset", {Leaf::Set, Axis::Temporal}}};
      auto it = names.find(cur().text);
      if (it == names.end()) error("unknown type name");
      t.leaf = it->second.first;
      t.axis = it->second.second;
      next();
    }
    if (is("[") && ahead(1).text == "~") {
      next();
      next();
      expect("]");
      t.array = true;
    }
    return t;
  }

  // ----- expressions -----
  ExprP expr_top() {
    ExprP e = expr();
    if (is("[") && ahead(1).text == "mod") {
      Span sp = e->span;
      next();
      next();
      ExprP m = expr();
      expect("]");
      auto r = std::make_shared<Expr>();
      r->kind = EK::Mod;
      r->kids = {e, m};
      r->span = sp;
      close(r->span);
      return r;
    }
    return e;
  }

  ExprP expr() { return iff(); }

  ExprP mkbin(Op op, ExprP a, ExprP b, Span sp) {
    ExprP e = e_bin(op, std::move(a), std::move(b));
    e->span = sp;
    close(e->span);
    return e;
  }

  ExprP iff() {
    Span sp = here();
    ExprP a = implies();
    while (accept("<->")) a = mkbin(Op::Iff, a, implies(), sp);
    return a;
  }
  ExprP implies() {
    Span sp = here();
    ExprP a = orr();
    if (accept("->")) return mkbin(Op::Implies, a, implies(), sp);
    return a;
  }
  ExprP orr() {
    Span sp = here();
    ExprP a = andd();
    while (accept("||")) a = mkbin(Op::Or, a, andd(), sp);
    return a;
  }
  ExprP andd() {
    Span sp = here();
    ExprP a = cmp();
    while (accept("&&")) a = mkbin(Op::And, a, cmp(), sp);
    return a;
  }
  ExprP cmp() {
    Span sp = here();
    ExprP a = add();
    static const std::pair<const char*, Op> ops[] = {{"==", Op::Eq},        {"!=", Op::Ne},    {"<=", Op::Le},
                                                     {">=", Op::Ge},        {"<", Op::Lt},     {">", Op::Gt},
                                                     {"in", Op::In},        {"contains", Op::Contains},
                                                     {"subset", Op::Subset}};
    for (auto& [t, op] : ops) {
      if (is(t)) {
        next();
        return mkbin(op, a, add(), sp);
      }
    }
    return a;
  }
  ExprP add() {
    Span sp = here();
    ExprP a = mul();
    while (true) {
      if (accept("+")) a = mkbin(Op::Add, a, mul(), sp);
      else if (accept("-") || accept("minus")) a = mkbin(Op::Sub, a, mul(), sp);
      else if (accept("union")) a = mkbin(Op::Union, a, mul(), sp);
      else return a;
    }
  }
  ExprP mul() {
    Span sp = here();
    ExprP a = unary();
    while (true) {
      if (accept("*")) a = mkbin(Op::Mul, a, unary(), sp);
      else if (accept("/")) a = mkbin(Op::Div, a, unary(), sp);
      else if (accept("%")) a = mkbin(Op::Rem, a, unary(), sp);
      else if (accept("inter")) a = mkbin(Op::Inter, a, unary(), sp);
      else return a;
    }
  }
  ExprP unary() {
    Span sp = here();
    if (accept("!")) {
      ExprP e = e_un(Op::Not, unary());
      e->span = sp;
      close(e->span);
      return e;
    }
    if (accept("-")) {
      bool literal = cur().kind == TK::Int;
      ExprP a = unary();
      if (literal && a->kind == EK::Int) {
        a->num = -a->num;
        a->span = sp;
        close(a->span);
        return a;
      }
      ExprP e = e_un(Op::Neg, a);
      e->span = sp;
      close(e->span);
      return e;
    }
    return postfix();
  }
  ExprP postfix() {
    Span sp = here();
    ExprP a = primary();
    while (true) {
      if (is(".") && ahead(1).kind == TK::Ident) {
        next();
        std::string f = cur().text;
        next();
        a = e_field(a, f);
      } else if (is("[") && ahead(1).text != "mod" && ahead(1).text != "~") {
        next();
        ExprP i = expr();
        expect("]");
        a = e_index(a, i);
      } else {
        return a;
      }
      a->span = sp;
      close(a->span);
    }
  }
  ExprP primary() {
    Span sp = here();
    auto fin = [&](ExprP e) {
      e->span = sp;
      close(e->span);
      return e;
    };
    if (cur().kind == TK::Int) {
      int64_t v = cur().num;
      next();
      return fin(e_int(v));
    }
    if (accept("true")) return fin(e_bool(true));
    if (accept("false")) return fin(e_bool(false));
    if (is("white") || is("black")) {
      auto e = std::make_shared<Expr>();
      e->kind = EK::Color;
      e->num = is("black");
      next();
      return fin(e);
    }
    if (accept("null")) {
      auto e = std::make_shared<Expr>();
      e->kind = EK::Null;
      return fin(e);
    }
    if (is("forall") || is("exists")) {
      auto e = std::make_shared<Expr>();
      e->kind = EK::Quant;
      e->forall = is("forall");
      next();
      e->name = ident();
      if (!accept("in")) error("expected 'in'");
      ExprP dom = add();
      expect(":");
      ExprP body = expr();
      e->kids = {dom, body};
      return fin(e);
    }
    if (accept("{")) {
      auto e = std::make_shared<Expr>();
      e->kind = EK::SetLit;
      if (!accept("}")) {
        do e->kids.push_back(expr());
        while (accept(","));
        expect("}");
      }
      return fin(e);
    }
    if (accept("[")) {
      ExprP lo = expr();
      expect(",");
      ExprP hi = expr();
      auto e = std::make_shared<Expr>();
      e->kind = EK::Interval;
      if (accept("]")) e->num = 2;
      else expect(")");
      e->kids = {lo, hi};
      return fin(e);
    }
    if (accept("(")) {
      std::vector<ExprP> items{expr_top()};
      while (accept(",")) items.push_back(expr_top());
      if (items.size() == 2 && accept("]")) {
        auto e = std::make_shared<Expr>();
        e->kind = EK::Interval;
        e->num = 1 | 2;
        e->kids = items;
        return fin(e);
      }
      expect(")");
      if (items.size() == 1) return items[0];
      auto e = std::make_shared<Expr>();
      e->kind = EK::TupleLit;
      e->kids = items;
      return fin(e);
    }
    if (cur().kind == TK::Ident && !kReserved.count(cur().text)) {
      std::string n = cur().text;
      next();
      if (accept("(")) {
        std::vector<ExprP> args;
        if (!accept(")")) {
          do args.push_back(expr_top());
          while (accept(","));
          expect(")");
        }
        return fin(e_call(n, std::move(args)));
      }
      return fin(e_var(n));
    }
    error("expected an expression");
  }

  // ----- W-code -----
  StmtP mk(SK k, Span sp) {
    auto s = std::make_shared<Stmt>();
    s->kind = k;
    s->span = sp;
    return s;
  }

  std::vector<StmtP> block() {
    expect("{");
    auto b = stmts("}");
    expect("}");
    return b;
  }

  std::vector<StmtP> block_or_stmt() {
    if (is("{")) return block();
    std::vector<StmtP> one;
    one.push_back(stmt());
    return one;
  }

  // Statement list up to a closing token; one error per statement, then resynchronise.
  std::vector<StmtP> stmts(const char* closer) {
    std::vector<StmtP> out;
    while (!at_end() && !is(closer)) {
      if (accept(";")) continue;
      size_t start = pos_;
      try {
        out.push_back(stmt());
        bool after_block = pos_ > 0 && toks_[pos_ - 1].text == "}";
        if (!is(closer) && !is(";") && !after_block) error("expected ';'");
      } catch (ParseAbort&) {
        if (pos_ == start) next();
        int depth = 0;
        while (!at_end()) {
          if (is("{")) ++depth;
          if (is("}")) {
            if (depth == 0) break;
            --depth;
          }
          if (is(";") && depth == 0) break;
          next();
        }
      }
    }
    return out;
  }

  ExprP lvalue() {
    Span sp = here();
    ExprP a = e_var(ident());
    a->span = sp;
    while (true) {
      if (is(".") && ahead(1).kind == TK::Ident) {
        next();
        std::string f = cur().text;
        next();
        a = e_field(a, f);
      } else if (is("[")) {
        next();
        ExprP i = expr();
        expect("]");
        a = e_index(a, i);
      } else {
        break;
      }
      a->span = sp;
      close(a->span);
    }
    return a;
  }

  StmtP simple() {
    Span sp = here();
    ExprP lv = lvalue();
    if (accept("++")) {
      auto s = mk(SK::Incr, sp);
      s->target = lv;
      close(s->span);
      return s;
    }
    if (!accept("=") && !accept(":=")) error("expected '=' or '++'");
    auto s = mk(SK::Assign, sp);
    s->target = lv;
    s->value = expr_top();
    close(s->span);
    return s;
  }

  StmtP stmt() {
    Span sp = here();
    StmtP s;
    if (accept("nil")) {
      s = mk(SK::Nil, sp);
    } else if (accept("new")) {
      s = mk(SK::New, sp);
      s->name = ident();
      expect(":");
      s->new_type = leaf_spec();
    } else if (accept("if")) {
      s = mk(SK::If, sp);
      expect("(");
      s->value = expr();
      expect(")");
      s->body = block_or_stmt();
      if (accept("else")) s->els = block_or_stmt();
    } else if (accept("while")) {
      s = mk(SK::While, sp);
      expect("(");
      s->value = expr();
      expect(")");
      s->body = block();
    } else if (accept("for")) {
      s = mk(SK::For, sp);
      expect("(");
      s->init = simple();
      expect(";");
      s->value = expr();
      expect(";");
      s->step = simple();
      expect(")");
      s->body = block();
    } else if (accept("delay")) {
      s = mk(SK::Delay, sp);
      expect("(");
      s->target = expr();
      expect(")");
    } else if (is("{")) {
      s = mk(SK::Block, sp);
      s->body = block();
    } else {
      return simple();
    }
    close(s->span);
    return s;
  }

  // ----- modules and programs -----
  std::vector<Decl> decls(Axis axis, const char* closer) {
    std::vector<Decl> out;
    if (accept("nil")) return out;
    if (is(closer)) return out;
    do {
      if (is(closer)) break;  // trailing comma tolerated
      Decl d;
      d.span = here();
      d.name = ident();
      auto typed = [&](std::optional<LeafType>& slot) {
        if (accept(":")) {
          LeafType t = leaf_spec();
          if (t.array) error("array suffix belongs on the variable, not the type");
          if (t.leaf == Leaf::Color) t.axis = axis;
          slot = t;
          d.explicit_type = true;
        }
      };
      if (is("[") && ahead(1).text == "~") {
        next();
        next();
        expect("]");
        d.shape = Shape::Array;
        d.types.resize(1);
        typed(d.types[0]);
      } else if (accept("(")) {
        d.shape = Shape::Record;
        do {
          d.fields.push_back(ident());
          d.types.emplace_back();
          typed(d.types.back());
        } while (accept(","));
        expect(")");
      } else {
        d.types.resize(1);
        typed(d.types[0]);
      }
      close(d.span);
      out.push_back(std::move(d));
    } while (accept(","));
    accept(";");
    return out;
  }

  ModuleP module() {
    auto m = std::make_shared<Module>();
    m->span = here();
    if (!accept("module")) error("expected 'module'");
    expect("{");
    if (!accept("listen")) error("expected 'listen'");
    m->listen = decls(Axis::Temporal, "}");
    expect("}");
    expect("{");
    if (!accept("read")) error("expected 'read'");
    m->read = decls(Axis::Spatial, "}");
    expect("}");
    expect("{");
    m->body = stmts("}");
    expect("}");
    expect("{");
    if (!accept("speak")) error("expected 'speak'");
    m->speak = decls(Axis::Temporal, "}");
    expect("}");
    expect("{");
    if (!accept("write")) error("expected 'write'");
    m->write = decls(Axis::Spatial, "}");
    expect("}");
    close(m->span);
    return m;
  }

  ProgP mkp(PK k, Span sp) {
    auto p = std::make_shared<Prog>();
    p->kind = k;
    p->span = sp;
    return p;
  }

  ProgP prog() {
    Span sp = here();
    ProgP a = unit();
    while (cur().kind == TK::Hash) {
      size_t n = cur().text.size();
      next();
      ProgP b = unit();
      ProgP c = mkp(n == 1 ? PK::VComp : n == 2 ? PK::HComp : PK::DComp, sp);
      c->a = a;
      c->b = b;
      close(c->span);
      a = c;
    }
    return a;
  }

  ProgP braced() {
    expect("{");
    ProgP p = prog();
    expect("}");
    return p;
  }

  ProgP unit() {
    Span sp = here();
    ProgP p;
    if (accept("nil")) {
      p = mkp(PK::Nil, sp);
    } else if (is("module")) {
      p = mkp(PK::Module, sp);
      p->module = module();
    } else if (accept("if")) {
      p = mkp(PK::If, sp);
      expect("(");
      p->cond = expr();
      expect(")");
      p->a = braced();
      if (!accept("else")) error("expected 'else' (program-level if needs both branches)");
      p->b = braced();
    } else if (is("while_t") || is("while_s") || is("while_st")) {
      PK k = is("while_t") ? PK::WhileT : is("while_s") ? PK::WhileS : PK::WhileST;
      next();
      p = mkp(k, sp);
      expect("(");
      p->cond = expr();
      expect(")");
      p->a = braced();
    } else if (accept("for_s")) {
      p = mkp(PK::ForS, sp);
      expect("(");
      p->name = ident();
      expect("=");
      p->init = expr();
      expect(";");
      p->cond = expr();
      expect(";");
      std::string v = ident();
      if (v != p->name) error("for_s must increment its own variable");
      expect("++");
      expect(")");
      p->a = braced();
    } else if (accept("(")) {
      p = prog();
      expect(")");
      return p;
    } else if (cur().kind == TK::Ident && !kReserved.count(cur().text)) {
      p = mkp(PK::Ref, sp);
      p->name = cur().text;
      next();
    } else {
      error("expected a program");
    }
    close(p->span);
    return p;
  }

  SourceFile file(const std::string& path) {
    SourceFile f;
    f.path = path;
    bool defs_mode = is("vars") || (cur().kind == TK::Ident && ahead(1).text == "=" && !kReserved.count(cur().text));
    if (!defs_mode) {
      f.main = prog();
      if (!at_end()) error("unexpected input after the program");
      return f;
    }
    std::set<std::string> seen;
    while (!at_end()) {
      if (accept(";")) continue;
      if (accept("vars")) {
        expect("{");
        while (!accept("}")) {
          if (accept(";")) continue;
          std::vector<std::pair<std::string, bool>> names;
          do {
            std::string n = ident();
            bool arr = false;
            if (accept(".")) n += "." + ident();
            else if (is("[") && ahead(1).text == "~") {
              next();
              next();
              expect("]");
              arr = true;
            }
            names.push_back({n, arr});
          } while (accept(","));
          expect(":");
          LeafType t = leaf_spec();
          for (auto& [n, arr] : names) {
            LeafType u = t;
            u.array = u.array || arr;
            f.vars.push_back({n, u});
          }
          if (!is("}")) expect(";");
        }
        continue;
      }
      std::string name = ident();
      if (seen.count(name)) error("duplicate definition of " + name);
      seen.insert(name);
      expect("=");
      ProgP p = prog();
      if (p->kind == PK::Module) p->module->label = name;
      f.defs.push_back({name, p});
    }
    for (auto& [n, p] : f.defs)
      if (n == "P") f.main = p;
    if (!f.main && !f.defs.empty()) f.main = f.defs.front().second;
    if (!f.main) error("no program in file");
    return f;
  }

  ExprP formula() {
    ExprP e = expr_top();
    if (!at_end()) error("unexpected input after the expression");
    return e;
  }

 private:
  std::vector<Tok> toks_;
  size_t pos_ = 0;
};

[[noreturn]] void raise(const std::vector<std::string>& errs, const std::string& path) {
  std::string m;
  for (auto& e : errs) m += (m.empty() ? "" : "\n") + path + ":" + e;
  fail(ErrorKind::Parse, m);
}

}  // namespace

SourceFile parse_source(std::string_view text, const std::string& path) {
  Parser p(text);
  try {
    SourceFile f = p.file(path);
    if (!p.errors.empty()) raise(p.errors, path);
    return f;
  } catch (ParseAbort&) {
    raise(p.errors, path);
  }
}

ExprP parse_expr(std::string_view text) {
  Parser p(text);
  try {
    return p.formula();
  } catch (ParseAbort&) {
    raise(p.errors, "<formula>");
  }
}

// ---------- resolution ----------

namespace {

void fill_types(Module& m, const std::map<std::string, LeafType>& vars) {
  auto fill = [&](std::vector<Decl>& ds, Axis axis) {
    for (auto& d : ds) {
      if (d.shape == Shape::Record) {
        for (size_t i = 0; i < d.fields.size(); ++i) {
          if (d.types[i]) continue;
          auto it = vars.find(d.name + "." + d.fields[i]);
          if (it != vars.end() && !it->second.array) {
            d.types[i] = it->second;
            if (d.types[i]->leaf == Leaf::Color) d.types[i]->axis = axis;
          }
        }
      } else if (!d.types[0]) {
        auto it = vars.find(d.name);
        if (it != vars.end() && it->second.array == (d.shape == Shape::Array)) {
          LeafType t = it->second;
          t.array = false;
          if (t.leaf == Leaf::Color) t.axis = axis;
          d.types[0] = t;
        }
      }
    }
  };
  fill(m.listen, Axis::Temporal);
  fill(m.speak, Axis::Temporal);
  fill(m.read, Axis::Spatial);
  fill(m.write, Axis::Spatial);

  // One variable inside a module: an untyped occurrence takes the leaf kind of the first typed
  // occurrence of the same shape, on the axis of its own interface.
  std::vector<const Decl*> all;
  for (auto* ds : {&m.listen, &m.read, &m.speak, &m.write})
    for (auto& d : *ds) all.push_back(&d);
  auto adopt = [&](std::vector<Decl>& ds, Axis axis) {
    for (auto& d : ds) {
      for (size_t i = 0; i < d.types.size(); ++i) {
        if (d.types[i]) continue;
        for (const Decl* src : all) {
          if (src == &d || src->name != d.name || src->shape != d.shape || src->fields != d.fields) continue;
          if (!src->types[i]) continue;
          LeafType t = *src->types[i];
          t.axis = axis;
          d.types[i] = t;
          break;
        }
      }
    }
  };
  adopt(m.listen, Axis::Temporal);
  adopt(m.speak, Axis::Temporal);
  adopt(m.read, Axis::Spatial);
  adopt(m.write, Axis::Spatial);
}

struct Resolver {
  const SourceFile& src;
  std::map<std::string, ProgP> defs;
  std::map<std::string, LeafType> vars;
  std::map<std::string, ProgP> done;
  std::set<std::string> active;
  std::set<const Module*> typed;

  ProgP go(const ProgP& p) {
    if (!p) return p;
    switch (p->kind) {
      case PK::Ref: {
        auto it = done.find(p->name);
        if (it != done.end()) return it->second;
        auto d = defs.find(p->name);
        if (d == defs.end()) fail(ErrorKind::Parse, "undefined program name '" + p->name + "'");
        if (active.count(p->name)) fail(ErrorKind::Parse, "recursive definition of '" + p->name + "'");
        active.insert(p->name);
        ProgP r = go(d->second);
        active.erase(p->name);
        done[p->name] = r;
        return r;
      }
      case PK::Module: {
        if (!typed.count(p->module.get())) {
          fill_types(*p->module, vars);
          typed.insert(p->module.get());
        }
        return p;
      }
      case PK::Nil: return p;
      default: {
        auto q = std::make_shared<Prog>(*p);
        q->a = go(p->a);
        q->b = go(p->b);
        return q;
      }
    }
  }
};

}  // namespace

ProgP resolve(const SourceFile& src, const std::string& entry) {
  Resolver r{src, {}, {}, {}, {}, {}};
  for (auto& [n, p] : src.defs) r.defs[n] = p;
  for (auto& v : src.vars) r.vars[v.name] = v.type;
  ProgP start = src.main;
  if (!entry.empty()) {
    auto it = r.defs.find(entry);
    if (it == r.defs.end()) fail(ErrorKind::Parse, "no definition named '" + entry + "'");
    start = it->second;
  }
  return r.go(start);
}

ProgP parse_program(std::string_view text, const std::string& path) { return resolve(parse_source(text, path)); }

}  // namespace agapia
