#include <functional>

#include "agapia/error.hpp"
#include "agapia/syntax.hpp"
#include "agapia/typecheck.hpp"

namespace agapia {

namespace {

std::string at(const Span& s) { return std::to_string(s.line) + ":" + std::to_string(s.col) + ": "; }

[[noreturn]] void type_error(const Span& s, const std::string& m) { fail(ErrorKind::Type, at(s) + m); }

std::string root_name(const ExprP& e) {
  ExprP x = e;
  while (x->kind == EK::Field || x->kind == EK::Index) x = x->kids[0];
  return x->kind == EK::Var ? x->name : std::string();
}

void collect_vars(const ExprP& e, std::set<std::string>& bound, std::set<std::string>& out) {
  if (!e) return;
  switch (e->kind) {
    case EK::Var:
      if (!bound.count(e->name)) out.insert(e->name);
      return;
    case EK::Quant: {
      collect_vars(e->kids[0], bound, out);
      bool fresh = bound.insert(e->name).second;
      collect_vars(e->kids[1], bound, out);
      if (fresh) bound.erase(e->name);
      return;
    }
    default:
      for (auto& k : e->kids) collect_vars(k, bound, out);
  }
}

void walk_body(const std::vector<StmtP>& body, std::set<std::string>& assigned, std::set<std::string>& read,
               std::vector<std::pair<std::string, Span>>& uses) {
  std::set<std::string> none;
  auto use = [&](const ExprP& e, const Span& sp) {
    std::set<std::string> vs;
    collect_vars(e, none, vs);
    for (auto& v : vs) {
      read.insert(v);
      uses.push_back({v, sp});
    }
  };
  std::function<void(const StmtP&)> go = [&](const StmtP& s) {
    if (!s) return;
    switch (s->kind) {
      case SK::Nil:
      case SK::Delay: break;
      case SK::New: assigned.insert(s->name); break;
      case SK::Assign:
      case SK::Incr: {
        assigned.insert(root_name(s->target));
        // index subexpressions of the target are reads
        ExprP x = s->target;
        while (x->kind == EK::Field || x->kind == EK::Index) {
          if (x->kind == EK::Index) use(x->kids[1], s->span);
          x = x->kids[0];
        }
        if (s->kind == SK::Incr) use(x, s->span);
        if (s->value) use(s->value, s->span);
        break;
      }
      default:
        if (s->value) use(s->value, s->span);
        go(s->init);
        go(s->step);
        for (auto& b : s->body) go(b);
        for (auto& b : s->els) go(b);
    }
  };
  for (auto& s : body) go(s);
}

void check_decls(const std::vector<Decl>& ds, Axis axis, const char* where, const Module& m) {
  std::set<std::string> seen;
  for (auto& d : ds) {
    if (!seen.insert(d.name).second)
      type_error(d.span, "duplicate declaration '" + d.name + "' in " + where + " of module " + m.label);
    for (size_t i = 0; i < d.types.size(); ++i) {
      std::string full = d.shape == Shape::Record ? d.name + "." + d.fields[i] : d.name;
      if (!d.types[i])
        type_error(d.span, "untyped declaration '" + full + "' in " + where + " of module " + m.label +
                               " (give a type inline or in a vars block)");
      const LeafType& t = *d.types[i];
      if (t.leaf != Leaf::Color && t.axis != axis)
        type_error(d.span, "'" + full + "' in " + where + " must have a " +
                               (axis == Axis::Temporal ? "temporal" : "spatial") + " type, got " + leaf_text(t));
    }
  }
}

void collect_names(const Type& t, std::set<std::string>& out) {
  switch (t->kind) {
    case TKind::Tuple:
      for (auto& n : t->names)
        if (!n.empty()) out.insert(n);
      return;
    case TKind::List:
    case TKind::ListStar:
    case TKind::Union:
    case TKind::Inter:
      for (auto& k : t->kids) collect_names(k, out);
      return;
    default: return;
  }
}

Type seq(const Type& a, const Type& b) { return nil_normalize(t_list({a, b})); }
Type alt(const Type& a, const Type& b) { return nil_normalize(t_union({a, b})); }

void need_match(const Type& got, const Type& expected, const char* axis, const Span& sp) {
  if (!type_match(got, expected))
    type_error(sp, std::string("MatchFailure(") + axis + ", got " + to_text(got, axis[0] == 'e' ? Axis::Temporal : Axis::Spatial, true) +
                       ", expected " + to_text(expected, axis[0] == 'e' ? Axis::Temporal : Axis::Spatial, true) + ")");
}

std::set<std::string> meet(const std::set<std::string>& a, const std::set<std::string>& b) {
  std::set<std::string> r;
  for (auto& x : a)
    if (b.count(x)) r.insert(x);
  return r;
}

}  // namespace

std::string to_text(const ProgramType& t, bool with_names) {
  return "<" + to_text(t.w, Axis::Temporal, with_names) + " | " + to_text(t.n, Axis::Spatial, with_names) + " | " +
         to_text(t.e, Axis::Temporal, with_names) + " | " + to_text(t.s, Axis::Spatial, with_names) + ">";
}

std::vector<std::string> module_warnings(const Module& m) {
  std::set<std::string> inputs, assigned, read;
  std::vector<std::pair<std::string, Span>> uses;
  for (auto* ds : {&m.listen, &m.read})
    for (auto& d : *ds) inputs.insert(d.name);
  walk_body(m.body, assigned, read, uses);
  std::vector<std::string> out;
  for (auto* ds : {&m.speak, &m.write})
    for (auto& d : *ds)
      if (!inputs.count(d.name) && !assigned.count(d.name))
        out.push_back(at(d.span) + "output '" + d.name + "' of module " + m.label +
                      " is never assigned; it carries the default value of its type");
  return out;
}

std::set<std::string> border_names(const Type& t) {
  std::set<std::string> out;
  collect_names(t, out);
  return out;
}

std::set<std::string> condition_vars(const ExprP& cond) {
  std::set<std::string> bound, out;
  collect_vars(cond, bound, out);
  return out;
}

void check_condition_scope(const ExprP& cond, const std::set<std::string>& allowed) {
  std::string bad;
  for (auto& v : condition_vars(cond))
    if (!allowed.count(v)) bad += (bad.empty() ? "" : ", ") + v;
  if (!bad.empty()) {
    std::string ok;
    for (auto& a : allowed) ok += (ok.empty() ? "" : ", ") + a;
    type_error(cond->span, "ConditionScopeError: " + bad + " not among the shared interface variables {" + ok + "}");
  }
}

ProgramType module_type(const Module& m) {
  check_decls(m.listen, Axis::Temporal, "listen", m);
  check_decls(m.speak, Axis::Temporal, "speak", m);
  check_decls(m.read, Axis::Spatial, "read", m);
  check_decls(m.write, Axis::Spatial, "write", m);

  std::set<std::string> inputs, assigned, read;
  std::vector<std::pair<std::string, Span>> uses;
  for (auto* ds : {&m.listen, &m.read})
    for (auto& d : *ds) inputs.insert(d.name);
  walk_body(m.body, assigned, read, uses);
  for (auto& [v, sp] : uses)
    if (!inputs.count(v) && !assigned.count(v))
      type_error(sp, "undeclared variable '" + v + "' in module " + m.label);

  return {item_type(m.listen), item_type(m.read), item_type(m.speak), item_type(m.write)};
}

ProgramType infer_type(const ProgP& p) {
  switch (p->kind) {
    case PK::Nil: return {t_nil(), t_nil(), t_nil(), t_nil()};
    case PK::Module: return module_type(*p->module);
    case PK::Ref: type_error(p->span, "unresolved program name '" + p->name + "'");
    case PK::ForS: type_error(p->span, "for_s must be expanded before type checking");
    case PK::HComp: {
      ProgramType a = infer_type(p->a), b = infer_type(p->b);
      need_match(a.e, b.w, "east/west", p->span);
      return {a.w, seq(a.n, b.n), b.e, seq(a.s, b.s)};
    }
    case PK::VComp: {
      ProgramType a = infer_type(p->a), b = infer_type(p->b);
      need_match(a.s, b.n, "south/north", p->span);
      return {seq(a.w, b.w), a.n, seq(a.e, b.e), b.s};
    }
    case PK::DComp: {
      ProgramType a = infer_type(p->a), b = infer_type(p->b);
      need_match(a.e, b.w, "east/west", p->span);
      need_match(a.s, b.n, "south/north", p->span);
      return {a.w, a.n, b.e, b.s};
    }
    case PK::If: {
      ProgramType a = infer_type(p->a), b = infer_type(p->b);
      std::set<std::string> allowed = meet(border_names(a.w), border_names(b.w));
      for (auto& x : meet(border_names(a.n), border_names(b.n))) allowed.insert(x);
      check_condition_scope(p->cond, allowed);
      return {alt(a.w, b.w), alt(a.n, b.n), alt(a.e, b.e), alt(a.s, b.s)};
    }
    case PK::WhileT: {
      ProgramType a = infer_type(p->a);
      need_match(a.s, a.n, "south/north", p->span);
      check_condition_scope(p->cond, border_names(a.n));
      Type ns = alt(a.n, a.s);
      return {nil_normalize(t_list_star(a.w)), ns, nil_normalize(t_list_star(a.e)), ns};
    }
    case PK::WhileS: {
      ProgramType a = infer_type(p->a);
      need_match(a.e, a.w, "east/west", p->span);
      check_condition_scope(p->cond, border_names(a.w));
      Type we = alt(a.w, a.e);
      return {we, nil_normalize(t_list_star(a.n)), we, nil_normalize(t_list_star(a.s))};
    }
    case PK::WhileST: {
      ProgramType a = infer_type(p->a);
      need_match(a.e, a.w, "east/west", p->span);
      need_match(a.s, a.n, "south/north", p->span);
      std::set<std::string> allowed = border_names(a.w);
      for (auto& x : border_names(a.n)) allowed.insert(x);
      check_condition_scope(p->cond, allowed);
      Type we = alt(a.w, a.e), ns = alt(a.n, a.s);
      return {we, ns, we, ns};
    }
  }
  fail(ErrorKind::Internal, "unknown program node");
}

}  // namespace agapia
