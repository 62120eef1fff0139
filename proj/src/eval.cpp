#include <algorithm>

#include "agapia/error.hpp"
#include "agapia/eval.hpp"
#include "agapia/syntax.hpp"

namespace agapia {

// ---------- randomness ----------

uint64_t splitmix64(uint64_t x) {
  uint64_t z = x + 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

uint64_t stream_seed(uint64_t seed, const std::vector<int64_t>& path) {
  uint64_t h = splitmix64(seed);
  for (int64_t p : path) h = splitmix64(h ^ static_cast<uint64_t>(p));
  return h;
}

int64_t PathRng::uniform(int64_t k) {
  if (k < 0) fail(ErrorKind::Runtime, "random(" + std::to_string(k) + "): negative bound");
  state_ = state_ * 6364136223846793005ull + 1442695040888963407ull;
  unsigned __int128 x = state_ >> 32;
  return static_cast<int64_t>((x * (static_cast<unsigned __int128>(k) + 1)) >> 32);
}

int64_t ChoiceTape::uniform(int64_t k) {
  if (k < 0) fail(ErrorKind::Runtime, "random(" + std::to_string(k) + "): negative bound");
  if (pos_ < tape_.size()) return tape_[pos_++].first;
  tape_.emplace_back(0, k);
  ++pos_;
  return 0;
}

bool ChoiceTape::advance() {
  tape_.resize(pos_);
  while (!tape_.empty() && tape_.back().first == tape_.back().second) tape_.pop_back();
  pos_ = 0;
  if (tape_.empty()) return false;
  ++tape_.back().first;
  return true;
}

// ---------- environments ----------

namespace {

std::string where(const Span& s) { return std::to_string(s.line) + ":" + std::to_string(s.col) + ": "; }

[[noreturn]] void rt(const Span& s, const std::string& m) { fail(ErrorKind::Runtime, where(s) + m); }

}  // namespace

Value ScopedEnv::var(const std::string& name, const Span& w) const {
  for (auto it = bound_.rbegin(); it != bound_.rend(); ++it)
    if (it->first == name) return it->second;
  return base_.var(name, w);
}

bool ScopedEnv::bound(const std::string& name, Value& out) const {
  for (auto it = bound_.rbegin(); it != bound_.rend(); ++it)
    if (it->first == name) {
      out = it->second;
      return true;
    }
  return base_.bound(name, out);
}

bool ScopedEnv::family(const std::string& n, int64_t k, Value& out) const {
  for (auto& b : bound_)
    if (b.first == n) return false;
  return base_.family(n, k, out);
}

const Value* Store::find(const std::string& name) const {
  for (auto& [n, v] : vars_)
    if (n == name) return &v;
  return nullptr;
}

void Store::set(const std::string& name, Value v) {
  for (auto& [n, x] : vars_)
    if (n == name) {
      x = std::move(v);
      return;
    }
  vars_.emplace_back(name, std::move(v));
}

Value Store::var(const std::string& name, const Span& w) const {
  if (const Value* v = find(name)) return *v;
  rt(w, "variable '" + name + "' used before assignment");
}

// ---------- expression evaluation ----------

namespace {

int64_t as_int(const Value& v, const Span& s, const char* what) {
  if (!v || v->kind != VKind::Int) rt(s, std::string(what) + " expects an integer, got " + to_text(v));
  return v->num;
}

bool as_bool(const Value& v, const Span& s, const char* what) {
  if (!v || v->kind != VKind::Bool) rt(s, std::string(what) + " expects a boolean, got " + to_text(v));
  return v->num != 0;
}

const std::vector<int64_t>& as_set(const Value& v, const Span& s, const char* what) {
  if (!v || v->kind != VKind::Set) rt(s, std::string(what) + " expects a set, got " + to_text(v));
  return v->set;
}

Value interval(int64_t lo, int64_t hi, const Span& s) {
  if (hi - lo > (1 << 20)) rt(s, "interval too large to enumerate");
  std::vector<int64_t> xs;
  for (int64_t i = lo; i < hi; ++i) xs.push_back(i);
  return make_set(std::move(xs));
}

Value index_value(const Value& base, int64_t k, const Span& s) {
  if (base && (base->kind == VKind::Seq || base->kind == VKind::Tuple || base->kind == VKind::List)) {
    if (k < 0 || static_cast<size_t>(k) >= base->kids.size())
      rt(s, "index " + std::to_string(k) + " out of range for " + to_text(base));
    return base->kids[k];
  }
  rt(s, "cannot index " + to_text(base));
}

Value eval(const ExprP& e, const Env& env, RandomSource* rng);

Value eval_index(const ExprP& e, const Env& env, RandomSource* rng) {
  const ExprP& b = e->kids[0];
  int64_t k = as_int(eval(e->kids[1], env, rng), e->kids[1]->span, "index");
  if (b->kind == EK::Var) {
    Value out;
    if (env.family(b->name, k, out)) return out;
  }
  if (b->kind == EK::TupleLit) {  // (x, y)[k] = (x[k], y[k])
    std::vector<Value> kids;
    for (auto& c : b->kids) {
      auto ix = std::make_shared<Expr>(*e);
      ix->kids = {c, e->kids[1]};
      kids.push_back(eval_index(ix, env, rng));
    }
    return make_tuple(std::move(kids));
  }
  return index_value(eval(b, env, rng), k, e->span);
}

Value arith(Op op, int64_t a, int64_t b, const Span& s) {
  int64_t r = 0;
  bool ovf = false;
  switch (op) {
    case Op::Add: ovf = __builtin_add_overflow(a, b, &r); break;
    case Op::Sub: ovf = __builtin_sub_overflow(a, b, &r); break;
    case Op::Mul: ovf = __builtin_mul_overflow(a, b, &r); break;
    case Op::Div:
    case Op::Rem:
      if (b == 0) rt(s, "division by zero");
      if (a == INT64_MIN && b == -1) ovf = true;
      else r = op == Op::Div ? a / b : a % b;
      break;
    default: break;
  }
  if (ovf) rt(s, "integer overflow");
  return make_int(r);
}

Value eval_binary(const ExprP& e, const Env& env, RandomSource* rng) {
  const Span& s = e->span;
  switch (e->op) {
    case Op::And: return make_bool(as_bool(eval(e->kids[0], env, rng), s, "&&") && as_bool(eval(e->kids[1], env, rng), s, "&&"));
    case Op::Or: return make_bool(as_bool(eval(e->kids[0], env, rng), s, "||") || as_bool(eval(e->kids[1], env, rng), s, "||"));
    case Op::Implies:
      return make_bool(!as_bool(eval(e->kids[0], env, rng), s, "->") || as_bool(eval(e->kids[1], env, rng), s, "->"));
    default: break;
  }
  Value a = eval(e->kids[0], env, rng), b = eval(e->kids[1], env, rng);
  switch (e->op) {
    case Op::Iff: return make_bool(as_bool(a, s, "<->") == as_bool(b, s, "<->"));
    case Op::Eq: return make_bool(value_equal(a, b));
    case Op::Ne: return make_bool(!value_equal(a, b));
    case Op::Lt: return make_bool(as_int(a, s, "<") < as_int(b, s, "<"));
    case Op::Le: return make_bool(as_int(a, s, "<=") <= as_int(b, s, "<="));
    case Op::Gt: return make_bool(as_int(a, s, ">") > as_int(b, s, ">"));
    case Op::Ge: return make_bool(as_int(a, s, ">=") >= as_int(b, s, ">="));
    case Op::Add:
    case Op::Mul:
    case Op::Div:
    case Op::Rem: return arith(e->op, as_int(a, s, op_symbol(e->op)), as_int(b, s, op_symbol(e->op)), s);
    case Op::Sub:
      if (a && a->kind == VKind::Set) {
        const auto &x = a->set, &y = as_set(b, s, "set difference");
        std::vector<int64_t> r;
        std::set_difference(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(r));
        return make_set(std::move(r));
      }
      return arith(Op::Sub, as_int(a, s, "-"), as_int(b, s, "-"), s);
    case Op::Union: {
      const auto &x = as_set(a, s, "union"), &y = as_set(b, s, "union");
      std::vector<int64_t> r;
      std::set_union(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(r));
      return make_set(std::move(r));
    }
    case Op::Inter: {
      const auto &x = as_set(a, s, "inter"), &y = as_set(b, s, "inter");
      std::vector<int64_t> r;
      std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(r));
      return make_set(std::move(r));
    }
    case Op::In: {
      const auto& y = as_set(b, s, "in");
      return make_bool(std::binary_search(y.begin(), y.end(), as_int(a, s, "in")));
    }
    case Op::Contains: {
      const auto& x = as_set(a, s, "contains");
      return make_bool(std::binary_search(x.begin(), x.end(), as_int(b, s, "contains")));
    }
    case Op::Subset: {
      const auto &x = as_set(a, s, "subset"), &y = as_set(b, s, "subset");
      return make_bool(std::includes(y.begin(), y.end(), x.begin(), x.end()));
    }
    default: rt(s, "bad binary operator");
  }
}

Value eval_call(const ExprP& e, const Env& env, RandomSource* rng) {
  Value hooked;
  if (env.call(*e, env, hooked)) return hooked;
  const std::string& f = e->name;
  const Span& s = e->span;
  std::vector<Value> a;
  for (auto& k : e->kids) a.push_back(eval(k, env, rng));
  if (f == "random") {
    if (!rng) rt(s, "random(...) is not available here");
    if (a.size() == 1) return make_int(rng->uniform(as_int(a[0], s, "random")));
    if (a.size() >= 2) return a[static_cast<size_t>(rng->uniform(static_cast<int64_t>(a.size()) - 1))];
    rt(s, "random needs arguments");
  }
  if ((f == "len" || f == "size") && a.size() == 1) {
    if (a[0] && a[0]->kind == VKind::Set) return make_int(static_cast<int64_t>(a[0]->set.size()));
    if (a[0] && (a[0]->kind == VKind::Seq || a[0]->kind == VKind::Tuple)) return make_int(static_cast<int64_t>(a[0]->kids.size()));
    rt(s, f + " expects a set or array");
  }
  if ((f == "max" || f == "min") && a.size() == 2) {
    int64_t x = as_int(a[0], s, f.c_str()), y = as_int(a[1], s, f.c_str());
    return make_int(f == "max" ? std::max(x, y) : std::min(x, y));
  }
  if (f == "wrap" && a.size() == 2) {  // a mod m, always in [0, m)
    int64_t x = as_int(a[0], s, "wrap"), m = as_int(a[1], s, "wrap");
    if (m <= 0) rt(s, "wrap: modulus must be positive");
    return make_int(((x % m) + m) % m);
  }
  if (f == "abs" && a.size() == 1) return make_int(std::abs(as_int(a[0], s, "abs")));
  rt(s, "unknown function " + f + "/" + std::to_string(a.size()));
}

Value eval(const ExprP& e, const Env& env, RandomSource* rng) {
  const Span& s = e->span;
  switch (e->kind) {
    case EK::Int: return make_int(e->num);
    case EK::Bool:
    case EK::Color: return make_bool(e->num != 0);
    case EK::Null: return make_set({});
    case EK::Var: return env.var(e->name, s);
    case EK::SetLit: {
      std::vector<int64_t> xs;
      for (auto& k : e->kids) xs.push_back(as_int(eval(k, env, rng), k->span, "set element"));
      return make_set(std::move(xs));
    }
    case EK::TupleLit: {
      std::vector<Value> kids;
      for (auto& k : e->kids) kids.push_back(eval(k, env, rng));
      return make_tuple(std::move(kids));
    }
    case EK::Interval: {
      int64_t lo = as_int(eval(e->kids[0], env, rng), s, "interval"), hi = as_int(eval(e->kids[1], env, rng), s, "interval");
      if (e->num & 1) ++lo;
      if (e->num & 2) ++hi;
      return interval(lo, hi, s);
    }
    case EK::Field: {
      Value b = eval(e->kids[0], env, rng), out;
      if (!tuple_field(b, e->name, &out)) rt(s, "no field '" + e->name + "' in " + to_text(b));
      return out;
    }
    case EK::Index: return eval_index(e, env, rng);
    case EK::Unary: {
      Value a = eval(e->kids[0], env, rng);
      if (e->op == Op::Not) return make_bool(!as_bool(a, s, "!"));
      int64_t x = as_int(a, s, "-");
      if (x == INT64_MIN) rt(s, "integer overflow");
      return make_int(-x);
    }
    case EK::Binary: return eval_binary(e, env, rng);
    case EK::Mod: {
      int64_t a = as_int(eval(e->kids[0], env, rng), s, "mod"), m = as_int(eval(e->kids[1], env, rng), s, "mod");
      if (m <= 0) rt(s, "[mod " + std::to_string(m) + "]: modulus must be positive");
      return make_int(((a % m) + m) % m);
    }
    case EK::Call: return eval_call(e, env, rng);
    case EK::Quant: {
      Value dom = eval(e->kids[0], env, rng);
      std::vector<Value> elems;
      if (dom && dom->kind == VKind::Set)
        for (int64_t x : dom->set) elems.push_back(make_int(x));
      else if (dom && dom->kind == VKind::Seq)
        elems = dom->kids;
      else
        rt(s, "quantifier domain must be a set, interval or array");
      ScopedEnv inner(env);
      inner.push(e->name, nullptr);
      for (auto& x : elems) {
        inner.set_top(x);
        bool b = as_bool(eval(e->kids[1], inner, rng), s, "quantifier body");
        if (b != e->forall) return make_bool(b);
      }
      return make_bool(e->forall);
    }
  }
  rt(s, "bad expression");
}

}  // namespace

Value eval_expr(const ExprP& e, const Env& env, RandomSource* rng) { return eval(e, env, rng); }

bool eval_bool(const ExprP& e, const Env& env, RandomSource* rng) {
  return as_bool(eval(e, env, rng), e->span, "condition");
}

// ---------- W-code ----------

namespace {

struct Step {
  bool field;
  std::string name;
  int64_t index;
};

Value assign_path(const Value& base, const std::vector<Step>& steps, size_t i, const Value& rhs, const Span& s) {
  if (i == steps.size()) return rhs;
  const Step& st = steps[i];
  if (st.field) {
    if (!base || base->kind != VKind::Tuple) rt(s, "field assignment on non-record " + to_text(base));
    for (size_t k = 0; k < base->names.size(); ++k)
      if (base->names[k] == st.name) {
        auto kids = base->kids;
        kids[k] = assign_path(kids[k], steps, i + 1, rhs, s);
        return make_tuple(std::move(kids), base->names);
      }
    rt(s, "no field '" + st.name + "' in " + to_text(base));
  }
  if (!base || base->kind != VKind::Seq) rt(s, "indexed assignment on non-array " + to_text(base));
  auto kids = base->kids;
  if (st.index < 0 || static_cast<size_t>(st.index) > kids.size())
    rt(s, "index " + std::to_string(st.index) + " out of range for array of length " + std::to_string(kids.size()));
  if (static_cast<size_t>(st.index) == kids.size()) {
    if (i + 1 != steps.size()) rt(s, "cannot extend an array through a nested path");
    kids.push_back(rhs);
  } else {
    kids[st.index] = assign_path(kids[st.index], steps, i + 1, rhs, s);
  }
  return make_seq(std::move(kids));
}

void assign(const ExprP& target, const Value& rhs, Store& store, RandomSource& rng) {
  std::vector<Step> steps;
  ExprP x = target;
  while (x->kind == EK::Field || x->kind == EK::Index) {
    if (x->kind == EK::Field) steps.push_back({true, x->name, 0});
    else steps.push_back({false, "", as_int(eval(x->kids[1], store, &rng), x->kids[1]->span, "index")});
    x = x->kids[0];
  }
  if (x->kind != EK::Var) rt(target->span, "not an assignable location");
  std::reverse(steps.begin(), steps.end());
  if (steps.empty()) {
    store.set(x->name, rhs);
    return;
  }
  const Value* root = store.find(x->name);
  // a[0] = v on a fresh name starts a sequence
  if (!root && !steps[0].field && steps[0].index == 0) {
    store.set(x->name, make_seq({}));
    root = store.find(x->name);
  }
  if (!root) rt(target->span, "assignment into undefined variable '" + x->name + "'");
  store.set(x->name, assign_path(*root, steps, 0, rhs, target->span));
}

struct Exec {
  Store& store;
  RandomSource& rng;
  int64_t max_iters;

  void block(const std::vector<StmtP>& b) {
    for (auto& s : b) stmt(s);
  }
  bool cond(const StmtP& s) { return eval_bool(s->value, store, &rng); }
  void stmt(const StmtP& s) {
    switch (s->kind) {
      case SK::Nil:
      case SK::Delay: return;
      case SK::New: {
        LeafType t = *s->new_type;
        Value v;
        switch (t.leaf) {
          case Leaf::Int: v = make_int(0); break;
          case Leaf::Set: v = make_set({}); break;
          default: v = make_bool(false);
        }
        store.set(s->name, t.array ? make_seq({}) : v);
        return;
      }
      case SK::Assign: assign(s->target, eval_expr(s->value, store, &rng), store, rng); return;
      case SK::Incr: {
        int64_t v = as_int(eval_expr(s->target, store, &rng), s->span, "++");
        if (v == INT64_MAX) rt(s->span, "integer overflow");
        assign(s->target, make_int(v + 1), store, rng);
        return;
      }
      case SK::If:
        if (cond(s)) block(s->body);
        else block(s->els);
        return;
      case SK::While: {
        int64_t n = 0;
        while (cond(s)) {
          if (++n > max_iters) fail(ErrorKind::LoopBound, where(s->span) + "LoopBoundExceeded(while, " + std::to_string(max_iters) + ")");
          block(s->body);
        }
        return;
      }
      case SK::For: {
        int64_t n = 0;
        for (stmt(s->init); cond(s); stmt(s->step)) {
          if (++n > max_iters) fail(ErrorKind::LoopBound, where(s->span) + "LoopBoundExceeded(for, " + std::to_string(max_iters) + ")");
          block(s->body);
        }
        return;
      }
      case SK::Block: block(s->body); return;
    }
  }
};

void bind_decls(const std::vector<Decl>& decls, const Value& item, Store& store, const char* side, const Module& m) {
  if (decls.empty()) {
    if (item) fail(ErrorKind::Border, "module " + m.label + " has " + side + " nil but received " + to_text(item));
    return;
  }
  if (!item) fail(ErrorKind::Border, "module " + m.label + " expects a " + side + " input (" + pretty_decls(decls) + "), got nil");
  std::vector<Value> parts;
  if (item->kind == VKind::Tuple && item->kids.size() == decls.size()) {
    for (size_t i = 0; i < decls.size(); ++i)
      if (!item->names.empty() && item->names[i] != decls[i].name)
        fail(ErrorKind::Border, "module " + m.label + ": " + side + " field '" + item->names[i] + "' where '" +
                                    decls[i].name + "' is expected");
    parts = item->kids;
  } else if (decls.size() == 1) {
    parts = {item};
  } else {
    fail(ErrorKind::Border, "module " + m.label + ": " + side + " input " + to_text(item) + " does not fit (" +
                                pretty_decls(decls) + ")");
  }
  for (size_t i = 0; i < decls.size(); ++i) {
    Value v = parts[i];
    const Decl& d = decls[i];
    // records arrive as positional or named tuples; keep the declared field names
    if (d.shape == Shape::Record && v && v->kind == VKind::Tuple) v = make_tuple(v->kids, d.fields);
    if (!value_has_type(v, decl_type(d)))
      fail(ErrorKind::Border, "module " + m.label + ": " + side + " value " + to_text(v) + " for '" + d.name +
                                  "' is not of its declared type");
    store.set(d.name, v);
  }
}

}  // namespace

void eval_w(const std::vector<StmtP>& body, Store& store, RandomSource& rng, int64_t max_iters) {
  Exec{store, rng, max_iters}.block(body);
}

Value pack_decls(const std::vector<Decl>& decls, const Store& store) {
  if (decls.empty()) return nullptr;
  std::vector<Value> kids;
  std::vector<std::string> names;
  for (auto& d : decls) {
    const Value* v = store.find(d.name);
    Value x = v ? *v : default_value(decl_type(d));
    if (!value_has_type(x, decl_type(d)))
      fail(ErrorKind::Runtime, "output '" + d.name + "' holds " + to_text(x) + ", which is not of its declared type");
    kids.push_back(x);
    names.push_back(d.name);
  }
  return make_tuple(std::move(kids), std::move(names));
}

ModuleIO eval_module(const Module& m, const Value& tin, const Value& sin, RandomSource& rng, int64_t max_iters) {
  Store store;
  bind_decls(m.listen, tin, store, "west", m);
  bind_decls(m.read, sin, store, "north", m);
  for (auto* ds : {&m.speak, &m.write})
    for (auto& d : *ds)
      if (!store.has(d.name)) store.set(d.name, default_value(decl_type(d)));
  eval_w(m.body, store, rng, max_iters);
  return {pack_decls(m.speak, store), pack_decls(m.write, store)};
}

}  // namespace agapia
