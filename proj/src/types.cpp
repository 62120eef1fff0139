#include "agapia/types.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <unordered_map>

#include "agapia/error.hpp"

namespace agapia {

namespace {

Type mk(TKind k, std::vector<Type> kids = {}, std::vector<std::string> names = {}) {
  auto n = std::make_shared<TypeNode>();
  n->kind = k;
  n->kids = std::move(kids);
  n->names = std::move(names);
  return n;
}

}  // namespace

Type t_nil() {
  static const Type t = mk(TKind::Nil);
  return t;
}
Type t_int() {
  static const Type t = mk(TKind::Int);
  return t;
}
Type t_bool() {
  static const Type t = mk(TKind::Bool);
  return t;
}
Type t_set() {
  static const Type t = mk(TKind::Set);
  return t;
}
Type t_never() {
  static const Type t = mk(TKind::Never);
  return t;
}

Type t_union(std::vector<Type> arms) {
  std::vector<Type> out;
  for (auto& a : arms) {
    if (a->kind == TKind::Never) continue;
    std::vector<Type> sub = a->kind == TKind::Union ? a->kids : std::vector<Type>{a};
    for (auto& s : sub) {
      bool dup = false;
      for (auto& o : out) dup = dup || type_equal(o, s);
      if (!dup) out.push_back(s);
    }
  }
  if (out.empty()) return t_never();
  if (out.size() == 1) return out[0];
  return mk(TKind::Union, std::move(out));
}

Type t_tuple(std::vector<Type> kids, std::vector<std::string> names) {
  for (auto& k : kids)
    if (k->kind == TKind::Never) return t_never();
  if (!names.empty() && names.size() != kids.size()) names.clear();
  return mk(TKind::Tuple, std::move(kids), std::move(names));
}

Type t_star(Type elem) { return mk(TKind::Star, {std::move(elem)}); }

Type t_list(std::vector<Type> kids) {
  std::vector<Type> out;
  for (auto& k : kids) {
    if (k->kind == TKind::Never) return t_never();
    if (k->kind == TKind::List)
      out.insert(out.end(), k->kids.begin(), k->kids.end());
    else
      out.push_back(k);
  }
  if (out.empty()) return t_nil();
  if (out.size() == 1) return out[0];
  return mk(TKind::List, std::move(out));
}

Type t_list_star(Type body) { return mk(TKind::ListStar, {std::move(body)}); }

Type t_inter(Type a, Type b) {
  if (a->kind == TKind::Never || b->kind == TKind::Never) return t_never();
  return mk(TKind::Inter, {std::move(a), std::move(b)});
}

bool type_equal(const Type& a, const Type& b) {
  if (a == b) return true;
  if (a->kind != b->kind || a->kids.size() != b->kids.size()) return false;
  if (a->kind == TKind::Tuple && !a->names.empty() && !b->names.empty() && a->names != b->names) return false;
  for (size_t i = 0; i < a->kids.size(); ++i)
    if (!type_equal(a->kids[i], b->kids[i])) return false;
  return true;
}

bool is_item_type(const Type& t) {
  switch (t->kind) {
    case TKind::Int:
    case TKind::Bool:
    case TKind::Set:
    case TKind::Tuple:
    case TKind::Star:
    case TKind::Never: return true;
    case TKind::Union:
    case TKind::Inter:
      return std::all_of(t->kids.begin(), t->kids.end(), [](const Type& k) { return is_item_type(k); });
    default: return false;
  }
}

// ---------- text ----------

std::string to_text(const Type& t, Axis axis, bool with_names) {
  bool sp = axis == Axis::Spatial;
  auto rec = [&](const Type& k) { return to_text(k, axis, with_names); };
  switch (t->kind) {
    case TKind::Nil: return "nil";
    case TKind::Int: return sp ? "sn" : "tn";
    case TKind::Bool: return sp ? "sb" : "tb";
    case TKind::Set: return sp ? "sset" : "tset";
    case TKind::Never: return "never";
    case TKind::Union:
    case TKind::Inter: {
      std::string s = "(";
      for (size_t i = 0; i < t->kids.size(); ++i) {
        if (i) s += t->kind == TKind::Union ? " | " : " & ";
        s += rec(t->kids[i]);
      }
      return s + ")";
    }
    case TKind::Tuple: {
      std::string s = "(";
      for (size_t i = 0; i < t->kids.size(); ++i) {
        if (i) s += ", ";
        if (with_names && i < t->names.size() && !t->names[i].empty()) s += t->names[i] + ": ";
        s += rec(t->kids[i]);
      }
      return s + ")";
    }
    case TKind::Star: {
      const Type& k = t->kids[0];
      if (k->kind == TKind::Tuple && k->kids.size() > 1 && !with_names) {
        std::string s = rec(k);
        return s + "*";
      }
      return "(" + rec(k) + ")*";
    }
    case TKind::List: {
      std::string s;
      for (size_t i = 0; i < t->kids.size(); ++i) {
        if (i) s += ";";
        s += rec(t->kids[i]);
      }
      return s;
    }
    case TKind::ListStar: return "(" + rec(t->kids[0]) + ";)*";
  }
  return "?";
}

std::string to_text(const InterfaceType& t, bool with_names) { return to_text(t.root, t.axis, with_names); }

namespace {

struct TypeParser {
  std::string_view s;
  size_t p = 0;
  int axis = -1;  // -1 unknown, 0 spatial, 1 temporal
  bool fixed = false;

  [[noreturn]] void bad(const std::string& why) {
    fail(ErrorKind::Parse, "type syntax error at offset " + std::to_string(p) + ": " + why);
  }
  void ws() {
    while (p < s.size() && std::isspace(static_cast<unsigned char>(s[p]))) ++p;
  }
  bool peek_union() {
    ws();
    if (p < s.size() && s[p] == '|') return true;
    return s.substr(p, 3) == "\xe2\x88\xaa";
  }
  bool eat(char c) {
    ws();
    if (p < s.size() && s[p] == c) {
      ++p;
      return true;
    }
    return false;
  }
  std::string ident() {
    ws();
    size_t b = p;
    while (p < s.size() && (std::isalnum(static_cast<unsigned char>(s[p])) || s[p] == '_')) ++p;
    return std::string(s.substr(b, p - b));
  }
  void set_axis(int a) {
    if (axis == -1) {
      axis = a;
    } else if (axis != a) {
      bad(fixed ? "leaf on the wrong axis" : "mixed spatial and temporal leaves");
    }
  }

  struct R {
    Type t;
    bool grouped = false;   // top-level '|', '&' or ';'
    bool trailing = false;  // ended with ';'
  };

  R alt() {
    R first = inter();
    if (!peek_union()) return first;
    std::vector<Type> arms{first.t};
    while (peek_union()) {
      if (s[p] == '|')
        ++p;
      else
        p += 3;
      arms.push_back(inter().t);
    }
    // keep arms verbatim (no dedup) so the printed form round-trips
    return R{mk(TKind::Union, std::move(arms)), true, false};
  }
  R inter() {
    R first = seq();
    if (!(ws(), p < s.size() && s[p] == '&')) return first;
    Type acc = first.t;
    while (eat('&')) acc = mk(TKind::Inter, {acc, seq().t});
    return R{acc, true, false};
  }
  R seq() {
    std::vector<Type> items{prim()};
    bool trailing = false, any = false;
    while (eat(';')) {
      any = true;
      ws();
      if (p >= s.size() || s[p] == ')' || s[p] == '|' || s[p] == ',' || s[p] == '&') {
        trailing = true;
        break;
      }
      items.push_back(prim());
    }
    if (items.size() == 1) return R{items[0], any, trailing};
    return R{mk(TKind::List, std::move(items)), true, trailing};
  }
  Type prim() {
    ws();
    if (p < s.size() && s[p] == '(') return paren();
    std::string w = ident();
    if (w.empty()) bad("expected a type");
    if (w == "nil") return t_nil();
    if (w == "never") return t_never();
    if (w == "sn") return set_axis(0), t_int();
    if (w == "sb") return set_axis(0), t_bool();
    if (w == "sset") return set_axis(0), t_set();
    if (w == "tn") return set_axis(1), t_int();
    if (w == "tb") return set_axis(1), t_bool();
    if (w == "tset") return set_axis(1), t_set();
    bad("unknown type '" + w + "'");
  }
  Type paren() {
    eat('(');
    std::vector<R> fields;
    std::vector<std::string> names;
    bool any_name = false;
    do {
      ws();
      size_t save = p;
      std::string nm = ident();
      if (!nm.empty() && eat(':')) {
        any_name = true;
      } else {
        p = save;
        nm.clear();
      }
      names.push_back(nm);
      fields.push_back(alt());
    } while (eat(','));
    if (!eat(')')) bad("expected ')'");
    bool star = eat('*');
    if (!any_name) names.clear();
    if (fields.size() == 1 && !any_name) {
      R& f = fields[0];
      if (star) return f.trailing ? t_list_star(f.t) : t_star(f.t);
      if (f.trailing) bad("';' must be followed by ')*'");
      if (f.grouped) return f.t;
      return mk(TKind::Tuple, {f.t});
    }
    std::vector<Type> kids;
    for (auto& f : fields) {
      if (f.trailing) bad("';' inside a tuple");
      kids.push_back(f.t);
    }
    Type tup = mk(TKind::Tuple, std::move(kids), std::move(names));
    return star ? t_star(tup) : tup;
  }
};

}  // namespace

InterfaceType parse_type(std::string_view text) {
  TypeParser tp{text};
  auto r = tp.alt();
  tp.ws();
  if (tp.p != text.size()) tp.bad("trailing input");
  if (r.trailing) tp.bad("dangling ';'");
  return InterfaceType{tp.axis == 1 ? Axis::Temporal : Axis::Spatial, r.t};
}

Type parse_type_on(std::string_view text, Axis axis) {
  TypeParser tp{text};
  tp.axis = axis == Axis::Temporal ? 1 : 0;
  tp.fixed = true;
  auto r = tp.alt();
  tp.ws();
  if (tp.p != text.size()) tp.bad("trailing input");
  if (r.trailing) tp.bad("dangling ';'");
  return r.t;
}

// ---------- nil handling ----------

std::vector<Type> list_elements(const Type& t) {
  if (t->kind == TKind::List) return t->kids;
  return {t};
}

Type nil_normalize(const Type& t) {
  switch (t->kind) {
    case TKind::List: {
      std::vector<Type> kids;
      for (auto& k : t->kids) {
        Type n = nil_normalize(k);
        if (n->kind != TKind::Nil) kids.push_back(n);
      }
      return t_list(std::move(kids));
    }
    case TKind::Union:
    case TKind::Inter:
    case TKind::ListStar: {
      std::vector<Type> kids;
      for (auto& k : t->kids) kids.push_back(nil_normalize(k));
      if (t->kind == TKind::ListStar && kids[0]->kind == TKind::Nil) return t_nil();  // (nil;)* = nil
      return mk(t->kind, std::move(kids), t->names);
    }
    default: return t;
  }
}

std::optional<InsertionPlan> equal_up_to_nil(const Type& t, const Type& u) {
  return plan_up_to_nil(
      list_elements(t), list_elements(u), [](const Type& x) { return x->kind == TKind::Nil; },
      [](const Type& a, const Type& b) { return type_equal(nil_normalize(a), nil_normalize(b)); });
}

// ---------- intersection and membership ----------

namespace {

Type item_inter(const Type& a, const Type& b);

Type item_inter_impl(const Type& a, const Type& b) {
  if (a->kind == TKind::Never || b->kind == TKind::Never) return t_never();
  if (a->kind == TKind::Union) {
    std::vector<Type> arms;
    for (auto& k : a->kids) arms.push_back(item_inter(k, b));
    return t_union(std::move(arms));
  }
  if (b->kind == TKind::Union) return item_inter(b, a);
  if (a->kind == TKind::Inter) return item_inter(item_inter(a->kids[0], b), a->kids[1]);
  if (b->kind == TKind::Inter) return item_inter(b, a);
  if (a->kind == TKind::Tuple && b->kind == TKind::Tuple) {
    if (a->kids.size() != b->kids.size()) return t_never();
    if (!a->names.empty() && !b->names.empty() && a->names != b->names) return t_never();
    std::vector<Type> kids;
    for (size_t i = 0; i < a->kids.size(); ++i) kids.push_back(item_inter(a->kids[i], b->kids[i]));
    return t_tuple(std::move(kids), a->names.empty() ? b->names : a->names);
  }
  if (a->kind == TKind::Tuple && a->kids.size() == 1)
    return t_tuple({item_inter(a->kids[0], b)}, a->names);
  if (b->kind == TKind::Tuple && b->kids.size() == 1)
    return t_tuple({item_inter(a, b->kids[0])}, b->names);
  if (a->kind == TKind::Star && b->kind == TKind::Star) return t_star(item_inter(a->kids[0], b->kids[0]));
  if (a->kind == b->kind && (a->kind == TKind::Int || a->kind == TKind::Bool || a->kind == TKind::Set ||
                             a->kind == TKind::Nil))
    return a;
  return t_never();
}

Type item_inter(const Type& a, const Type& b) { return item_inter_impl(a, b); }

struct Nfa {
  struct Edge {
    Type label;  // null for epsilon
    int to;
  };
  std::vector<std::vector<Edge>> out;
  int start = 0, accept = 0;
  int add() {
    out.emplace_back();
    return static_cast<int>(out.size()) - 1;
  }
};

std::shared_ptr<Nfa> build_nfa(const Type& t);

void thompson(Nfa& n, const Type& t, int s, int a) {
  if (is_item_type(t)) {
    if (t->kind != TKind::Never) n.out[s].push_back({t, a});
    return;
  }
  switch (t->kind) {
    case TKind::Nil: n.out[s].push_back({nullptr, a}); return;
    case TKind::List: {
      int cur = s;
      for (size_t i = 0; i < t->kids.size(); ++i) {
        int nxt = i + 1 == t->kids.size() ? a : n.add();
        thompson(n, t->kids[i], cur, nxt);
        cur = nxt;
      }
      return;
    }
    case TKind::Union:
      for (auto& k : t->kids) {
        int ks = n.add(), ka = n.add();
        n.out[s].push_back({nullptr, ks});
        thompson(n, k, ks, ka);
        n.out[ka].push_back({nullptr, a});
      }
      return;
    case TKind::ListStar: {
      int bs = n.add(), ba = n.add();
      n.out[s].push_back({nullptr, a});
      n.out[s].push_back({nullptr, bs});
      thompson(n, t->kids[0], bs, ba);
      n.out[ba].push_back({nullptr, bs});
      n.out[ba].push_back({nullptr, a});
      return;
    }
    case TKind::Inter: {
      // product of the two sub-automata, spliced in
      auto A = build_nfa(t->kids[0]);
      auto B = build_nfa(t->kids[1]);
      std::map<std::pair<int, int>, int> id;
      std::vector<std::pair<int, int>> work;
      auto get = [&](int p, int q) {
        auto it = id.find({p, q});
        if (it != id.end()) return it->second;
        int x = n.add();
        id[{p, q}] = x;
        work.push_back({p, q});
        return x;
      };
      int st = get(A->start, B->start);
      n.out[s].push_back({nullptr, st});
      while (!work.empty()) {
        auto [p, q] = work.back();
        work.pop_back();
        int from = id[{p, q}];
        if (p == A->accept && q == B->accept) n.out[from].push_back({nullptr, a});
        for (auto& e : A->out[p])
          if (!e.label) {
            int to = get(e.to, q);
            n.out[from].push_back({nullptr, to});
          }
        for (auto& e : B->out[q])
          if (!e.label) {
            int to = get(p, e.to);
            n.out[from].push_back({nullptr, to});
          }
        for (auto& e : A->out[p]) {
          if (!e.label) continue;
          for (auto& f : B->out[q]) {
            if (!f.label) continue;
            Type z = item_inter(e.label, f.label);
            if (z->kind == TKind::Never) continue;
            int to = get(e.to, f.to);
            n.out[from].push_back({z, to});
          }
        }
      }
      return;
    }
    default: return;
  }
}

std::shared_ptr<Nfa> build_nfa(const Type& t) {
  auto n = std::make_shared<Nfa>();
  n->start = n->add();
  n->accept = n->add();
  thompson(*n, t, n->start, n->accept);
  return n;
}

std::shared_ptr<Nfa> cached_nfa(const Type& t) {
  thread_local std::unordered_map<const TypeNode*, std::pair<Type, std::shared_ptr<Nfa>>> cache;
  auto it = cache.find(t.get());
  if (it != cache.end()) return it->second.second;
  if (cache.size() > 4096) cache.clear();
  auto n = build_nfa(t);
  cache[t.get()] = {t, n};
  return n;
}

void closure(const Nfa& n, std::vector<char>& on, std::vector<int>& states) {
  for (size_t i = 0; i < states.size(); ++i) {
    for (auto& e : n.out[states[i]]) {
      if (!e.label && !on[e.to]) {
        on[e.to] = 1;
        states.push_back(e.to);
      }
    }
  }
}

bool nfa_nonempty(const Nfa& n) {
  std::vector<char> seen(n.out.size(), 0);
  std::vector<int> st{n.start};
  seen[n.start] = 1;
  for (size_t i = 0; i < st.size(); ++i) {
    if (st[i] == n.accept) return true;
    for (auto& e : n.out[st[i]])
      if (!seen[e.to]) {
        seen[e.to] = 1;
        st.push_back(e.to);
      }
  }
  return false;
}

bool has_list_star(const Type& t) {
  if (t->kind == TKind::ListStar) return true;
  if (is_item_type(t)) return false;
  for (auto& k : t->kids)
    if (has_list_star(k)) return true;
  return false;
}

size_t max_len(const Type& t) {
  if (is_item_type(t)) return 1;
  switch (t->kind) {
    case TKind::Nil: return 0;
    case TKind::List: {
      size_t s = 0;
      for (auto& k : t->kids) s += max_len(k);
      return s;
    }
    default: {
      size_t m = 0;
      for (auto& k : t->kids) m = std::max(m, max_len(k));
      return m;
    }
  }
}

std::string seq_key(const std::vector<Type>& s) {
  std::string k;
  for (auto& t : s) k += to_text(t, Axis::Spatial, true) + "\x1f";
  return k;
}

void add_unique(std::vector<std::vector<Type>>& out, std::set<std::string>& seen, std::vector<Type> s) {
  if (seen.insert(seq_key(s)).second) out.push_back(std::move(s));
}

}  // namespace

std::vector<std::vector<Type>> expand_paths(const Type& t, size_t limit) {
  std::vector<std::vector<Type>> out;
  std::set<std::string> seen;
  if (is_item_type(t)) {
    if (limit >= 1 && t->kind != TKind::Never) out.push_back({t});
    return out;
  }
  switch (t->kind) {
    case TKind::Nil: out.push_back({}); break;
    case TKind::List: {
      std::vector<std::vector<Type>> acc{{}};
      for (auto& k : t->kids) {
        std::vector<std::vector<Type>> nxt;
        std::set<std::string> ns;
        auto parts = expand_paths(k, limit);
        for (auto& a : acc)
          for (auto& b : parts) {
            if (a.size() + b.size() > limit) continue;
            auto c = a;
            c.insert(c.end(), b.begin(), b.end());
            add_unique(nxt, ns, std::move(c));
          }
        acc = std::move(nxt);
      }
      for (auto& a : acc) add_unique(out, seen, a);
      break;
    }
    case TKind::Union:
      for (auto& k : t->kids)
        for (auto& s : expand_paths(k, limit)) add_unique(out, seen, s);
      break;
    case TKind::ListStar: {
      auto body = expand_paths(t->kids[0], limit);
      std::vector<std::vector<Type>> frontier{{}};
      add_unique(out, seen, {});
      while (!frontier.empty()) {
        std::vector<std::vector<Type>> nxt;
        for (auto& a : frontier)
          for (auto& b : body) {
            if (b.empty() || a.size() + b.size() > limit) continue;
            auto c = a;
            c.insert(c.end(), b.begin(), b.end());
            if (seen.count(seq_key(c))) continue;
            add_unique(out, seen, c);
            nxt.push_back(std::move(c));
          }
        frontier = std::move(nxt);
      }
      break;
    }
    case TKind::Inter: {
      auto A = expand_paths(t->kids[0], limit);
      auto B = expand_paths(t->kids[1], limit);
      for (auto& a : A)
        for (auto& b : B) {
          if (a.size() != b.size()) continue;
          std::vector<Type> c;
          bool ok = true;
          for (size_t i = 0; i < a.size() && ok; ++i) {
            c.push_back(item_inter(a[i], b[i]));
            ok = c.back()->kind != TKind::Never;
          }
          if (ok) add_unique(out, seen, std::move(c));
        }
      break;
    }
    default: break;
  }
  return out;
}

std::optional<Type> type_match(const Type& t, const Type& u) {
  if (is_item_type(t) && is_item_type(u)) {
    Type r = item_inter(t, u);
    if (r->kind == TKind::Never) return std::nullopt;
    return r;
  }
  bool ft = !has_list_star(t), fu = !has_list_star(u);
  if (ft || fu) {
    const Type& fin = ft ? t : u;
    const Type& other = ft ? u : t;
    std::vector<Type> arms;
    auto mine = expand_paths(fin, max_len(fin));
    auto theirs = expand_paths(other, max_len(fin));
    for (auto& a : mine)
      for (auto& b : theirs) {
        if (a.size() != b.size()) continue;
        std::vector<Type> c;
        bool ok = true;
        for (size_t i = 0; i < a.size() && ok; ++i) {
          c.push_back(ft ? item_inter(a[i], b[i]) : item_inter(b[i], a[i]));
          ok = c.back()->kind != TKind::Never;
        }
        if (ok) arms.push_back(t_list(std::move(c)));
      }
    Type r = t_union(std::move(arms));
    if (r->kind == TKind::Never) return std::nullopt;
    return r;
  }
  Type both = t_inter(t, u);
  if (!nfa_nonempty(*build_nfa(both))) return std::nullopt;
  return both;
}

bool item_has_type(const Value& v, const Type& t) {
  switch (t->kind) {
    case TKind::Never: return false;
    case TKind::Nil: return v == nullptr;
    case TKind::Int: return v && v->kind == VKind::Int;
    case TKind::Bool: return v && v->kind == VKind::Bool;
    case TKind::Set: return v && v->kind == VKind::Set;
    case TKind::Union:
      for (auto& k : t->kids)
        if (item_has_type(v, k)) return true;
      return false;
    case TKind::Inter: return item_has_type(v, t->kids[0]) && item_has_type(v, t->kids[1]);
    case TKind::Tuple: {
      if (v && v->kind == VKind::Tuple && v->kids.size() == t->kids.size()) {
        for (size_t i = 0; i < t->kids.size(); ++i)
          if (!item_has_type(v->kids[i], t->kids[i])) return false;
        return true;
      }
      if (t->kids.size() == 1) return item_has_type(v, t->kids[0]);
      return false;
    }
    case TKind::Star: {
      if (!v || v->kind != VKind::Seq) return false;
      for (auto& e : v->kids)
        if (!item_has_type(e, t->kids[0])) return false;
      return true;
    }
    case TKind::List:
    case TKind::ListStar: return items_have_type(value_items(v), t);
  }
  return false;
}

bool items_have_type(const std::vector<Value>& items, const Type& t) {
  auto nfa = cached_nfa(t);
  const Nfa& n = *nfa;
  std::vector<char> on(n.out.size(), 0);
  std::vector<int> cur{n.start};
  on[n.start] = 1;
  closure(n, on, cur);
  for (auto& v : items) {
    if (!v) continue;  // nil items may be inserted anywhere
    std::vector<char> non(n.out.size(), 0);
    std::vector<int> nxt;
    for (int s : cur)
      for (auto& e : n.out[s]) {
        if (!e.label || non[e.to]) continue;
        bool ok = item_has_type(v, e.label);
        if (!ok && v && v->kind == VKind::Tuple && v->kids.size() == 1) ok = item_has_type(v->kids[0], e.label);
        if (ok) {
          non[e.to] = 1;
          nxt.push_back(e.to);
        }
      }
    if (nxt.empty()) return false;
    closure(n, non, nxt);
    cur = std::move(nxt);
    on = std::move(non);
  }
  return on[n.accept] != 0;
}

bool value_has_type(const Value& v, const Type& t) { return items_have_type(value_items(v), t); }

Value default_value(const Type& t) {
  switch (t->kind) {
    case TKind::Int: return make_int(0);
    case TKind::Bool: return make_bool(false);
    case TKind::Set: return make_set({});
    case TKind::Star: return make_seq({});
    case TKind::Tuple: {
      std::vector<Value> kids;
      for (auto& k : t->kids) kids.push_back(default_value(k));
      return make_tuple(std::move(kids), t->names);
    }
    case TKind::Union:
    case TKind::Inter: return default_value(t->kids[0]);
    case TKind::List: {
      std::vector<Value> kids;
      for (auto& k : t->kids) kids.push_back(default_value(k));
      return make_list(std::move(kids));
    }
    default: return nullptr;
  }
}

std::vector<Type> line_types(const Type& list_type, size_t n) {
  auto paths = expand_paths(list_type, n);
  size_t L = 0;
  for (auto& p : paths) L = std::max(L, p.size());
  std::vector<Type> out(n, t_nil());
  for (size_t i = 0; i < L; ++i) {
    std::vector<Type> arms;
    for (auto& p : paths)
      if (p.size() == L) arms.push_back(p[i]);
    out[i] = t_union(std::move(arms));
  }
  return out;
}

// ---------- json ----------

namespace {
const char* tag_of(TKind k) {
  switch (k) {
    case TKind::Nil: return "nil";
    case TKind::Int: return "int";
    case TKind::Bool: return "bool";
    case TKind::Set: return "set";
    case TKind::Union: return "union";
    case TKind::Tuple: return "tuple";
    case TKind::Star: return "star";
    case TKind::List: return "list";
    case TKind::ListStar: return "liststar";
    case TKind::Inter: return "inter";
    case TKind::Never: return "never";
  }
  return "?";
}
}  // namespace

nlohmann::json to_json(const Type& t) {
  nlohmann::json j{{"tag", tag_of(t->kind)}};
  if (!t->kids.empty()) {
    j["kids"] = nlohmann::json::array();
    for (auto& k : t->kids) j["kids"].push_back(to_json(k));
  }
  if (!t->names.empty()) j["names"] = t->names;
  return j;
}

Type type_from_json(const nlohmann::json& j) {
  static const std::map<std::string, TKind> tags = {
      {"nil", TKind::Nil},     {"int", TKind::Int},   {"bool", TKind::Bool},         {"set", TKind::Set},
      {"union", TKind::Union}, {"tuple", TKind::Tuple}, {"star", TKind::Star},       {"list", TKind::List},
      {"liststar", TKind::ListStar}, {"inter", TKind::Inter}, {"never", TKind::Never}};
  auto it = tags.find(j.at("tag").get<std::string>());
  if (it == tags.end()) fail(ErrorKind::Parse, "bad type json");
  std::vector<Type> kids;
  if (j.contains("kids"))
    for (auto& k : j["kids"]) kids.push_back(type_from_json(k));
  std::vector<std::string> names;
  if (j.contains("names")) names = j["names"].get<std::vector<std::string>>();
  switch (it->second) {
    case TKind::Nil: return t_nil();
    case TKind::Int: return t_int();
    case TKind::Bool: return t_bool();
    case TKind::Set: return t_set();
    case TKind::Never: return t_never();
    default: return mk(it->second, std::move(kids), std::move(names));
  }
}

}  // namespace agapia
