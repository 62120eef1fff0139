#include <functional>
#include <sstream>

#include "agapia/error.hpp"
#include "agapia/syntax.hpp"

namespace agapia {

// ---------- expression printing ----------

namespace {

const char* op_text(Op op) {
  switch (op) {
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Div: return "/";
    case Op::Rem: return "%";
    case Op::Lt: return "<";
    case Op::Le: return "<=";
    case Op::Gt: return ">";
    case Op::Ge: return ">=";
    case Op::Eq: return "==";
    case Op::Ne: return "!=";
    case Op::And: return "&&";
    case Op::Or: return "||";
    case Op::Implies: return "->";
    case Op::Iff: return "<->";
    case Op::Union: return "union";
    case Op::Inter: return "inter";
    case Op::In: return "in";
    case Op::Contains: return "contains";
    case Op::Subset: return "subset";
    case Op::Not: return "!";
    case Op::Neg: return "-";
  }
  return "?";
}

// Binding strength; higher binds tighter.
int prec(Op op) {
  switch (op) {
    case Op::Iff: return 1;
    case Op::Implies: return 2;
    case Op::Or: return 3;
    case Op::And: return 4;
    case Op::Lt: case Op::Le: case Op::Gt: case Op::Ge: case Op::Eq: case Op::Ne:
    case Op::In: case Op::Contains: case Op::Subset: return 5;
    case Op::Add: case Op::Sub: case Op::Union: return 6;
    case Op::Mul: case Op::Div: case Op::Rem: case Op::Inter: return 7;
    default: return 8;
  }
}

void pe(std::ostream& o, const ExprP& e, int ctx);

void pe_wrap(std::ostream& o, const ExprP& e, int own, int ctx, const std::function<void()>& body) {
  (void)e;
  if (own < ctx) o << "(";
  body();
  if (own < ctx) o << ")";
}

void pe(std::ostream& o, const ExprP& e, int ctx) {
  switch (e->kind) {
    case EK::Int:
      if (e->num < 0 && ctx > 8) o << "(" << e->num << ")";
      else o << e->num;
      return;
    case EK::Bool: o << (e->num ? "true" : "false"); return;
    case EK::Color: o << (e->num ? "black" : "white"); return;
    case EK::Null: o << "null"; return;
    case EK::Var: o << e->name; return;
    case EK::SetLit: {
      o << "{";
      for (size_t i = 0; i < e->kids.size(); ++i) {
        if (i) o << ", ";
        pe(o, e->kids[i], 1);
      }
      o << "}";
      return;
    }
    case EK::TupleLit: {
      o << "(";
      for (size_t i = 0; i < e->kids.size(); ++i) {
        if (i) o << ", ";
        pe(o, e->kids[i], 0);
      }
      o << ")";
      return;
    }
    case EK::Interval:
      o << ((e->num & 1) ? "(" : "[");
      pe(o, e->kids[0], 1);
      o << ", ";
      pe(o, e->kids[1], 1);
      o << ((e->num & 2) ? "]" : ")");
      return;
    case EK::Call: {
      o << e->name << "(";
      for (size_t i = 0; i < e->kids.size(); ++i) {
        if (i) o << ", ";
        pe(o, e->kids[i], 0);
      }
      o << ")";
      return;
    }
    case EK::Field: pe(o, e->kids[0], 9); o << "." << e->name; return;
    case EK::Index:
      pe(o, e->kids[0], 9);
      o << "[";
      pe(o, e->kids[1], 1);
      o << "]";
      return;
    case EK::Unary:
      pe_wrap(o, e, 8, ctx, [&] {
        o << op_text(e->op);
        const ExprP& a = e->kids[0];
        // keep -(5) distinct from the literal -5
        if (e->op == Op::Neg && a->kind == EK::Int) {
          o << "(" << a->num << ")";
        } else {
          if (e->op == Op::Neg && a->kind == EK::Unary && a->op == Op::Neg) o << " ";
          pe(o, a, 8);
        }
      });
      return;
    case EK::Binary: {
      int p = prec(e->op);
      int lctx = p, rctx = p + 1;
      if (e->op == Op::Implies) lctx = p + 1, rctx = p;
      if (p == 5) lctx = rctx = 6;
      pe_wrap(o, e, p, ctx, [&] {
        pe(o, e->kids[0], lctx);
        o << " " << op_text(e->op) << " ";
        // "x - -1" must not lex as "x --1"; spaces already separate tokens
        pe(o, e->kids[1], rctx);
      });
      return;
    }
    case EK::Mod:
      pe_wrap(o, e, 0, ctx, [&] {
        pe(o, e->kids[0], 1);
        o << " [mod ";
        pe(o, e->kids[1], 1);
        o << "]";
      });
      return;
    case EK::Quant:
      pe_wrap(o, e, 0, ctx, [&] {
        o << (e->forall ? "forall " : "exists ") << e->name << " in ";
        pe(o, e->kids[0], 6);
        o << " : ";
        pe(o, e->kids[1], 1);
      });
      return;
  }
}

// ---------- W-code and declaration printing ----------

std::string decl_text(const Decl& d) {
  auto ty = [](const std::optional<LeafType>& t) { return t ? ":" + leaf_text(*t) : std::string(); };
  switch (d.shape) {
    case Shape::Scalar: return d.name + ty(d.types[0]);
    case Shape::Array: return d.name + "[~]" + ty(d.types[0]);
    case Shape::Record: {
      std::string s = d.name + "(";
      for (size_t i = 0; i < d.fields.size(); ++i) s += (i ? ", " : "") + d.fields[i] + ty(d.types[i]);
      return s + ")";
    }
  }
  return d.name;
}

void ps(std::ostream& o, const std::vector<StmtP>& body, int ind);

void ps_one(std::ostream& o, const StmtP& s, int ind) {
  std::string pad(ind * 2, ' ');
  auto blk = [&](const std::vector<StmtP>& b) {
    o << "{\n";
    ps(o, b, ind + 1);
    o << pad << "}";
  };
  switch (s->kind) {
    case SK::Nil: o << "nil"; break;
    case SK::New: o << "new " << s->name << ":" << leaf_text(*s->new_type); break;
    case SK::Assign: pe(o, s->target, 9); o << " = "; pe(o, s->value, 0); break;
    case SK::Incr: pe(o, s->target, 9); o << "++"; break;
    case SK::If:
      o << "if (";
      pe(o, s->value, 1);
      o << ") ";
      blk(s->body);
      if (!s->els.empty()) {
        o << " else ";
        blk(s->els);
      }
      break;
    case SK::While: o << "while ("; pe(o, s->value, 1); o << ") "; blk(s->body); break;
    case SK::For:
      o << "for (";
      ps_one(o, s->init, ind);
      o << "; ";
      pe(o, s->value, 1);
      o << "; ";
      ps_one(o, s->step, ind);
      o << ") ";
      blk(s->body);
      break;
    case SK::Delay: o << "delay("; pe(o, s->target, 1); o << ")"; break;
    case SK::Block: blk(s->body); break;
  }
}

void ps(std::ostream& o, const std::vector<StmtP>& body, int ind) {
  std::string pad(ind * 2, ' ');
  for (auto& s : body) {
    o << pad;
    ps_one(o, s, ind);
    o << ";\n";
  }
}

void pm(std::ostream& o, const Module& m, int ind) {
  std::string pad(ind * 2, ' ');
  o << "module{listen " << pretty_decls(m.listen) << "}{read " << pretty_decls(m.read) << "}{\n";
  ps(o, m.body, ind + 1);
  o << pad << "}{speak " << pretty_decls(m.speak) << "}{write " << pretty_decls(m.write) << "}";
}

void pp(std::ostream& o, const ProgP& p, int ind, bool as_right) {
  std::string pad(ind * 2, ' ');
  auto braced = [&](const ProgP& q) {
    o << "{\n" << std::string((ind + 1) * 2, ' ');
    pp(o, q, ind + 1, false);
    o << "\n" << pad << "}";
  };
  switch (p->kind) {
    case PK::Nil: o << "nil"; return;
    case PK::Module: pm(o, *p->module, ind); return;
    case PK::Ref: o << p->name; return;
    case PK::If:
      o << "if (";
      pe(o, p->cond, 1);
      o << ") ";
      braced(p->a);
      o << " else ";
      braced(p->b);
      return;
    case PK::VComp:
    case PK::HComp:
    case PK::DComp: {
      const char* op = p->kind == PK::VComp ? "#" : p->kind == PK::HComp ? "##" : "####";
      if (as_right) o << "(";
      pp(o, p->a, ind, false);
      o << "\n" << pad << op << " ";
      pp(o, p->b, ind, true);
      if (as_right) o << ")";
      return;
    }
    case PK::WhileT:
    case PK::WhileS:
    case PK::WhileST:
      o << (p->kind == PK::WhileT ? "while_t" : p->kind == PK::WhileS ? "while_s" : "while_st") << "(";
      pe(o, p->cond, 1);
      o << ") ";
      braced(p->a);
      return;
    case PK::ForS:
      o << "for_s(" << p->name << " = ";
      pe(o, p->init, 1);
      o << "; ";
      pe(o, p->cond, 1);
      o << "; " << p->name << "++) ";
      braced(p->a);
      return;
  }
}

}  // namespace

std::string pretty(const ExprP& e) {
  std::ostringstream o;
  pe(o, e, 0);
  return o.str();
}

std::string pretty_decls(const std::vector<Decl>& ds) {
  if (ds.empty()) return "nil";
  std::string s;
  for (size_t i = 0; i < ds.size(); ++i) s += (i ? ", " : "") + decl_text(ds[i]);
  return s;
}

std::string pretty_stmts(const std::vector<StmtP>& body) {
  std::ostringstream o;
  ps(o, body, 0);
  return o.str();
}

std::string pretty(const Module& m) {
  std::ostringstream o;
  pm(o, m, 0);
  return o.str();
}

std::string pretty(const ProgP& p) {
  std::ostringstream o;
  pp(o, p, 0, false);
  return o.str();
}

std::string outline(const ProgP& p) {
  switch (p->kind) {
    case PK::Nil: return "nil";
    case PK::Module: return p->module->label;
    case PK::Ref: return p->name;
    case PK::If: return "if(" + pretty(p->cond) + "){" + outline(p->a) + "}else{" + outline(p->b) + "}";
    case PK::VComp:
    case PK::HComp:
    case PK::DComp: {
      const char* op = p->kind == PK::VComp ? " # " : p->kind == PK::HComp ? " ## " : " #### ";
      std::string r = outline(p->b);
      bool comp = p->b->kind == PK::VComp || p->b->kind == PK::HComp || p->b->kind == PK::DComp;
      return outline(p->a) + op + (comp ? "(" + r + ")" : r);
    }
    case PK::WhileT: return "while_t(" + pretty(p->cond) + "){" + outline(p->a) + "}";
    case PK::WhileS: return "while_s(" + pretty(p->cond) + "){" + outline(p->a) + "}";
    case PK::WhileST: return "while_st(" + pretty(p->cond) + "){" + outline(p->a) + "}";
    case PK::ForS:
      return "for_s(" + p->name + "=" + pretty(p->init) + ";" + pretty(p->cond) + ";" + p->name + "++){" +
             outline(p->a) + "}";
  }
  return "?";
}

// ---------- equality ----------

bool expr_equal(const ExprP& a, const ExprP& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind || a->kids.size() != b->kids.size()) return false;
  switch (a->kind) {
    case EK::Int: case EK::Bool: case EK::Color: case EK::Interval:
      if (a->num != b->num) return false;
      break;
    case EK::Unary: case EK::Binary:
      if (a->op != b->op) return false;
      break;
    case EK::Quant:
      if (a->forall != b->forall) return false;
      break;
    default: break;
  }
  if (a->name != b->name) return false;
  for (size_t i = 0; i < a->kids.size(); ++i)
    if (!expr_equal(a->kids[i], b->kids[i])) return false;
  return true;
}

static bool stmt_equal(const StmtP& a, const StmtP& b) {
  if (!a || !b) return !a && !b;
  return a->kind == b->kind && a->name == b->name && a->new_type == b->new_type && expr_equal(a->target, b->target) &&
         expr_equal(a->value, b->value) && stmts_equal(a->body, b->body) && stmts_equal(a->els, b->els) &&
         stmt_equal(a->init, b->init) && stmt_equal(a->step, b->step);
}

bool stmts_equal(const std::vector<StmtP>& a, const std::vector<StmtP>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!stmt_equal(a[i], b[i])) return false;
  return true;
}

static bool decls_equal(const std::vector<Decl>& a, const std::vector<Decl>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i].name != b[i].name || a[i].shape != b[i].shape || a[i].fields != b[i].fields || a[i].types != b[i].types)
      return false;
  return true;
}

bool prog_equal(const ProgP& a, const ProgP& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind || a->name != b->name) return false;
  if (a->kind == PK::Module) {
    const Module &x = *a->module, &y = *b->module;
    if (!decls_equal(x.listen, y.listen) || !decls_equal(x.read, y.read) || !decls_equal(x.speak, y.speak) ||
        !decls_equal(x.write, y.write) || !stmts_equal(x.body, y.body))
      return false;
  }
  return expr_equal(a->cond, b->cond) && expr_equal(a->init, b->init) && prog_equal(a->a, b->a) &&
         prog_equal(a->b, b->b);
}

// ---------- JSON ----------

static nlohmann::json span_json(const Span& s) { return {s.line, s.col, s.end_line, s.end_col}; }

static const char* ek_name(EK k) {
  static const char* n[] = {"int", "bool", "color", "null", "set", "var", "field", "index",
                            "unary", "binary", "mod", "call", "tuple", "interval", "quant"};
  return n[static_cast<int>(k)];
}

nlohmann::json to_json(const ExprP& e) {
  if (!e) return nullptr;
  nlohmann::json j{{"kind", ek_name(e->kind)}, {"span", span_json(e->span)}};
  switch (e->kind) {
    case EK::Int: j["value"] = e->num; break;
    case EK::Bool: j["value"] = e->num != 0; break;
    case EK::Color: j["value"] = e->num ? "black" : "white"; break;
    case EK::Interval:
      j["lo_open"] = (e->num & 1) != 0;
      j["hi_closed"] = (e->num & 2) != 0;
      break;
    case EK::Unary:
    case EK::Binary: j["op"] = op_text(e->op); break;
    case EK::Quant: j["quantifier"] = e->forall ? "forall" : "exists"; break;
    default: break;
  }
  if (!e->name.empty()) j["name"] = e->name;
  if (!e->kids.empty()) {
    j["kids"] = nlohmann::json::array();
    for (auto& k : e->kids) j["kids"].push_back(to_json(k));
  }
  return j;
}

static nlohmann::json stmts_json(const std::vector<StmtP>& b);

static nlohmann::json stmt_json(const StmtP& s) {
  if (!s) return nullptr;
  static const char* n[] = {"nil", "new", "assign", "incr", "if", "while", "for", "delay", "block"};
  nlohmann::json j{{"kind", n[static_cast<int>(s->kind)]}, {"span", span_json(s->span)}};
  if (s->target) j["target"] = to_json(s->target);
  if (s->value) j["value"] = to_json(s->value);
  if (s->kind == SK::New) {
    j["name"] = s->name;
    j["type"] = leaf_text(*s->new_type);
  }
  if (!s->body.empty() || s->kind == SK::If || s->kind == SK::While || s->kind == SK::For || s->kind == SK::Block)
    j["body"] = stmts_json(s->body);
  if (!s->els.empty()) j["else"] = stmts_json(s->els);
  if (s->init) j["init"] = stmt_json(s->init);
  if (s->step) j["step"] = stmt_json(s->step);
  return j;
}

static nlohmann::json stmts_json(const std::vector<StmtP>& b) {
  nlohmann::json a = nlohmann::json::array();
  for (auto& s : b) a.push_back(stmt_json(s));
  return a;
}

static nlohmann::json decls_json(const std::vector<Decl>& ds) {
  nlohmann::json a = nlohmann::json::array();
  for (auto& d : ds) {
    nlohmann::json j{{"name", d.name}, {"text", decl_text(d)}, {"span", span_json(d.span)}};
    j["shape"] = d.shape == Shape::Scalar ? "scalar" : d.shape == Shape::Array ? "array" : "record";
    if (d.shape == Shape::Record) j["fields"] = d.fields;
    a.push_back(j);
  }
  return a;
}

nlohmann::json to_json(const ProgP& p) {
  if (!p) return nullptr;
  static const char* n[] = {"nil",  "module",  "ref",     "if",       "vcomp", "hcomp",
                            "dcomp", "while_t", "while_s", "while_st", "for_s"};
  nlohmann::json j{{"kind", n[static_cast<int>(p->kind)]}, {"span", span_json(p->span)}};
  if (p->kind == PK::Module) {
    const Module& m = *p->module;
    j["label"] = m.label;
    j["listen"] = decls_json(m.listen);
    j["read"] = decls_json(m.read);
    j["body"] = stmts_json(m.body);
    j["speak"] = decls_json(m.speak);
    j["write"] = decls_json(m.write);
  }
  if (!p->name.empty()) j["name"] = p->name;
  if (p->cond) j["cond"] = to_json(p->cond);
  if (p->init) j["init"] = to_json(p->init);
  if (p->a) j["a"] = to_json(p->a);
  if (p->b) j["b"] = to_json(p->b);
  return j;
}

// ---------- for_s ----------

std::vector<Decl> west_decls(const ProgP& p) {
  if (!p) return {};
  switch (p->kind) {
    case PK::Module: return p->module->listen;
    case PK::VComp: {
      auto a = west_decls(p->a);
      auto b = west_decls(p->b);
      a.insert(a.end(), b.begin(), b.end());
      return a;
    }
    case PK::Nil:
    case PK::Ref: return {};
    default: return west_decls(p->a);
  }
}

static ProgP synth_module(const std::string& label, const std::vector<Decl>& iface, StmtP body) {
  auto m = std::make_shared<Module>();
  m->label = label;
  m->listen = iface;
  m->speak = iface;
  m->body.push_back(std::move(body));
  auto p = std::make_shared<Prog>();
  p->kind = PK::Module;
  p->module = m;
  return p;
}

ProgP expand_for_s(const ProgP& p) {
  if (!p) return p;
  switch (p->kind) {
    case PK::Nil:
    case PK::Module:
    case PK::Ref: return p;
    case PK::ForS: {
      ProgP body = expand_for_s(p->a);
      auto iface = west_decls(body);
      bool has = false;
      for (auto& d : iface) has = has || (d.name == p->name && d.shape == Shape::Scalar);
      if (!has)
        fail(ErrorKind::Macro, "for_s variable '" + p->name + "' is not in the temporal interface of its body (" +
                                   pretty_decls(iface) + ")");
      auto init = std::make_shared<Stmt>();
      init->kind = SK::Assign;
      init->target = e_var(p->name);
      init->value = p->init;
      auto inc = std::make_shared<Stmt>();
      inc->kind = SK::Incr;
      inc->target = e_var(p->name);
      ProgP init_m = synth_module(p->name + "=" + pretty(p->init), iface, init);
      ProgP inc_m = synth_module(p->name + "++", iface, inc);
      auto inner = std::make_shared<Prog>();
      inner->kind = PK::HComp;
      inner->a = body;
      inner->b = inc_m;
      inner->span = p->span;
      auto loop = std::make_shared<Prog>();
      loop->kind = PK::WhileS;
      loop->cond = p->cond;
      loop->a = inner;
      loop->span = p->span;
      auto top = std::make_shared<Prog>();
      top->kind = PK::HComp;
      top->a = init_m;
      top->b = loop;
      top->span = p->span;
      return top;
    }
    default: {
      ProgP a = expand_for_s(p->a), b = expand_for_s(p->b);
      if (a == p->a && b == p->b) return p;
      auto q = std::make_shared<Prog>(*p);
      q->a = a;
      q->b = b;
      return q;
    }
  }
}

}  // namespace agapia

namespace agapia {
const char* op_symbol(Op op) { return op_text(op); }
}  // namespace agapia
