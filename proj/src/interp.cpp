#include <unordered_map>
#include <unordered_set>

#include "agapia/error.hpp"
#include "agapia/interp.hpp"
#include "agapia/syntax.hpp"

namespace agapia {

namespace {

// Items a guard sees: the remaining part of one or more border lists.
struct View {
  const std::vector<Value>* items;
  size_t from;
};

class ItemsEnv : public Env {
 public:
  explicit ItemsEnv(std::vector<View> views) : views_(std::move(views)) {}
  Value var(const std::string& name, const Span& where) const override {
    for (auto& v : views_)
      for (size_t i = v.from; i < v.items->size(); ++i) {
        Value out;
        if (tuple_field((*v.items)[i], name, &out)) return out;
      }
    fail(ErrorKind::Runtime, std::to_string(where.line) + ":" + std::to_string(where.col) + ": guard variable '" +
                                 name + "' is not on the border");
  }

 private:
  std::vector<View> views_;
};

bool guard(const ExprP& c, std::vector<View> views) {
  ItemsEnv env(std::move(views));
  return eval_bool(c, env, nullptr);
}

// Items a program consumes from one input border, or -1 when it depends on the run.
int64_t demand(const ProgP& p, bool west) {
  auto add = [](int64_t a, int64_t b) { return a < 0 || b < 0 ? -1 : a + b; };
  switch (p->kind) {
    case PK::Nil: return 0;
    case PK::Module: return (west ? p->module->listen : p->module->read).empty() ? 0 : 1;
    case PK::HComp: return west ? demand(p->a, true) : add(demand(p->a, false), demand(p->b, false));
    case PK::VComp: return west ? add(demand(p->a, true), demand(p->b, true)) : demand(p->a, false);
    case PK::DComp: return demand(p->a, west);
    case PK::If: {
      int64_t a = demand(p->a, west), b = demand(p->b, west);
      return a == b ? a : -1;
    }
    case PK::WhileT: return west ? -1 : demand(p->a, false);
    case PK::WhileS: return west ? demand(p->a, true) : -1;
    case PK::WhileST: return demand(p->a, west);
    default: fail(ErrorKind::Internal, "unexpanded program node at run time");
  }
}

std::vector<Value> take_demand(const ProgP& body, bool west, const std::vector<Value>& items, size_t& pos) {
  int64_t d = demand(body, west);
  size_t n = d < 0 ? items.size() - pos : static_cast<size_t>(d);
  if (pos + n > items.size())
    fail(ErrorKind::Border, std::string("BorderMismatch: ") + (west ? "west" : "north") + " border exhausted");
  std::vector<Value> out(items.begin() + pos, items.begin() + pos + n);
  pos += n;
  return out;
}

Scenario ident(const std::vector<Value>& tw, const std::vector<Value>& sn) {
  return Scenario::identity(tw.empty() ? std::vector<Value>{nullptr} : tw,
                            sn.empty() ? std::vector<Value>{nullptr} : sn);
}

void append(std::vector<Value>& a, const std::vector<Value>& b) { a.insert(a.end(), b.begin(), b.end()); }

struct In {
  const std::vector<Value>* items;
  size_t pos = 0;
  View view() const { return {items, pos}; }
  bool done() const { return pos == items->size(); }
};

void need_consumed(const In& s, const char* seam) {
  if (!s.done())
    fail(ErrorKind::Border, std::string("BorderMismatch(") + seam + "): " + std::to_string(s.items->size() - s.pos) +
                                " item(s) of " + items_text(*s.items) + " left unconsumed");
}

struct Out {
  Scenario sc;
  std::vector<Value> east, south;
};

const char* loop_name(PK k) { return k == PK::WhileT ? "while_t" : k == PK::WhileS ? "while_s" : "while_st"; }

struct Runner {
  const RunConfig& cfg;
  RunResult& res;
  std::vector<int64_t> path;

  Value take(In& s, const char* side, const Module& m) {
    if (s.done())
      fail(ErrorKind::Border, std::string("BorderMismatch: module ") + m.label + " needs a " + side +
                                  " input but the border is exhausted");
    return (*s.items)[s.pos++];
  }

  Out module(const Module& m, In& w, In& n) {
    Value tin = m.listen.empty() ? nullptr : take(w, "west", m);
    Value sin = m.read.empty() ? nullptr : take(n, "north", m);
    PathRng rng(cfg.seed, path);
    ModuleIO io = eval_module(m, tin, sin, rng, cfg.max_inner);
    ++res.modules_run;
    Out o;
    if (cfg.build_scenario) o.sc = Scenario::single(Cell{m.label, tin, sin, io.east, io.south});
    if (io.east) o.east.push_back(io.east);
    if (io.south) o.south.push_back(io.south);
    return o;
  }

  Out child(const ProgP& p, int64_t idx, In& w, In& n) {
    path.push_back(idx);
    Out o = go(p, w, n);
    path.pop_back();
    return o;
  }

  void discipline(const ExprP& c, const std::vector<View>& views, bool expect, const char* what) {
    if (!cfg.check_discipline) return;
    ++res.discipline_checks;
    if (guard(c, views) != expect)
      fail(ErrorKind::Internal, std::string("loop discipline violated: guard ") + (expect ? "false" : "true") +
                                    " on the " + what + " border of an iteration");
  }

  Out go(const ProgP& p, In& w, In& n) {
    switch (p->kind) {
      case PK::Nil: {
        Out o;
        if (cfg.build_scenario) o.sc = ident({}, {});
        return o;
      }
      case PK::Module: return module(*p->module, w, n);
      case PK::HComp: {
        Out a = child(p->a, 0, w, n);
        In w2{&a.east};
        Out b = child(p->b, 1, w2, n);
        need_consumed(w2, "east/west");
        Out o;
        if (cfg.build_scenario) o.sc = hcomp(std::move(a.sc), std::move(b.sc));
        o.east = std::move(b.east);
        o.south = std::move(a.south);
        append(o.south, b.south);
        return o;
      }
      case PK::VComp: {
        Out a = child(p->a, 0, w, n);
        In n2{&a.south};
        Out b = child(p->b, 1, w, n2);
        need_consumed(n2, "south/north");
        Out o;
        if (cfg.build_scenario) o.sc = vcomp(std::move(a.sc), std::move(b.sc));
        o.east = std::move(a.east);
        append(o.east, b.east);
        o.south = std::move(b.south);
        return o;
      }
      case PK::DComp: {
        Out a = child(p->a, 0, w, n);
        In w2{&a.east}, n2{&a.south};
        Out b = child(p->b, 1, w2, n2);
        need_consumed(w2, "diagonal east/west");
        need_consumed(n2, "diagonal south/north");
        Out o;
        if (cfg.build_scenario) o.sc = dcomp(std::move(a.sc), std::move(b.sc));
        o.east = std::move(b.east);
        o.south = std::move(b.south);
        return o;
      }
      case PK::If: {
        bool c = guard(p->cond, {w.view(), n.view()});
        return c ? child(p->a, 0, w, n) : child(p->b, 1, w, n);
      }
      case PK::WhileT:
      case PK::WhileS:
      case PK::WhileST: return loop(p, w, n);
      default: fail(ErrorKind::Internal, "unexpanded program node at run time");
    }
  }

  Out loop(const ProgP& p, In& w, In& n) {
    const PK k = p->kind;
    const bool uses_w = k != PK::WhileT, uses_n = k != PK::WhileS;
    const int64_t bound = k == PK::WhileT ? cfg.max_while_t : k == PK::WhileS ? cfg.max_while_s : cfg.max_while_st;
    Out acc;
    std::vector<Value> prev_e, prev_s;  // outputs of the last iteration
    Scenario last;
    int64_t i = 0;
    for (;; ++i) {
      // borders the guard sees before iteration i
      View vw = i == 0 ? w.view() : View{&prev_e, 0};
      View vn = i == 0 ? n.view() : View{&prev_s, 0};
      std::vector<View> views;
      if (uses_w) views.push_back(vw);
      if (uses_n) views.push_back(vn);
      if (cfg.trace) {
        TraceRecord r;
        r.kind = loop_name(k);
        r.path = path;
        r.iteration = i;
        if (uses_w) r.west.assign(vw.items->begin() + vw.from, vw.items->end());
        if (uses_n) r.north.assign(vn.items->begin() + vn.from, vn.items->end());
        if (k == PK::WhileS) {
          r.north.clear();
          r.done = acc.south;
          r.pending.assign(n.items->begin() + n.pos, n.items->end());
        }
        res.trace.push_back(std::move(r));
      }
      if (!guard(p->cond, views)) break;
      if (i >= bound)
        fail(ErrorKind::LoopBound, "LoopBoundExceeded(" + std::string(loop_name(k)) + ", " + std::to_string(bound) + ")");
      // the first iteration reads the shared streams; later ones the previous outputs exactly
      std::vector<Value> in_e = prev_e, in_s = prev_s;
      In ew{&in_e}, es{&in_s};
      In& bw = (k == PK::WhileT || i == 0) ? w : ew;
      In& bn = (k == PK::WhileS || i == 0) ? n : es;
      Out o = child(p->a, i, bw, bn);
      if (&bw == &ew) need_consumed(ew, "loop east/west");
      if (&bn == &es) need_consumed(es, "loop south/north");
      if (cfg.build_scenario) {
        std::vector<View> inb;
        auto wb = normalize_items(o.sc.west()), nb = normalize_items(o.sc.north());
        if (uses_w) inb.push_back({&wb, 0});
        if (uses_n) inb.push_back({&nb, 0});
        discipline(p->cond, inb, true, "entry");
        last = o.sc;
      }
      prev_e = o.east;
      prev_s = o.south;
      if (i == 0) {
        acc = std::move(o);
      } else {
        if (cfg.build_scenario) {
          if (k == PK::WhileT) acc.sc = vcomp(std::move(acc.sc), std::move(o.sc));
          else if (k == PK::WhileS) acc.sc = hcomp(std::move(acc.sc), std::move(o.sc));
          else acc.sc = dcomp(std::move(acc.sc), std::move(o.sc));
        }
        if (k == PK::WhileT) append(acc.east, o.east), acc.south = std::move(o.south);
        else if (k == PK::WhileS) append(acc.south, o.south), acc.east = std::move(o.east);
        else acc.east = std::move(o.east), acc.south = std::move(o.south);
      }
    }
    if (i == 0) {
      Out o;
      std::vector<Value> tw, sn;
      if (uses_w) tw = take_demand(p->a, true, *w.items, w.pos);
      if (uses_n) sn = take_demand(p->a, false, *n.items, n.pos);
      if (cfg.build_scenario) o.sc = ident(tw, sn);
      o.east = tw;
      o.south = sn;
      return o;
    }
    if (cfg.build_scenario) {
      auto eb = normalize_items(last.east()), sb = normalize_items(last.south());
      std::vector<View> outb;
      if (uses_w) outb.push_back({&eb, 0});
      if (uses_n) outb.push_back({&sb, 0});
      discipline(p->cond, outb, false, "exit");
    }
    return acc;
  }
};

}  // namespace

RunResult run(const ProgP& prog, const std::vector<Value>& west, const std::vector<Value>& north, const RunConfig& cfg) {
  ProgP p = expand_for_s(prog);
  RunResult res;
  std::vector<Value> w = normalize_items(west), n = normalize_items(north);
  In iw{&w}, in{&n};
  Runner r{cfg, res, {}};
  Out o = r.go(p, iw, in);
  need_consumed(iw, "input west");
  need_consumed(in, "input north");
  res.scenario = std::move(o.sc);
  res.east = std::move(o.east);
  res.south = std::move(o.south);
  return res;
}

std::vector<TraceRecord> trace(const ProgP& p, const std::vector<Value>& west, const std::vector<Value>& north,
                               RunConfig cfg) {
  cfg.trace = true;
  return run(p, west, north, cfg).trace;
}

// ---------- exhaustive exploration ----------

bool Outcome::operator==(const Outcome& o) const {
  return west_used == o.west_used && north_used == o.north_used && items_equal(east, o.east) &&
         items_equal(south, o.south);
}

namespace {

struct OutcomeHash {
  size_t operator()(const Outcome& o) const {
    size_t h = o.west_used * 1000003u ^ o.north_used;
    h = h * 31 + items_hash(o.east);
    return h * 31 + items_hash(o.south);
  }
};

struct ModKey {
  const Module* m;
  Value tin, sin;
  bool operator==(const ModKey& o) const { return m == o.m && value_equal(tin, o.tin) && value_equal(sin, o.sin); }
};
struct ModKeyHash {
  size_t operator()(const ModKey& k) const {
    return std::hash<const void*>()(k.m) ^ (value_hash(k.tin) * 31) ^ (value_hash(k.sin) * 1009);
  }
};

}  // namespace

struct Explorer::Impl {
  std::unordered_map<ModKey, std::vector<ModuleIO>, ModKeyHash> memo;
  std::unordered_map<const Prog*, std::pair<ProgP, ProgP>> expanded;  // original kept alive as the key
};

std::vector<ModuleIO> Explorer::module_outcomes(const Module& m, const Value& tin, const Value& sin) {
  if (!impl_) impl_ = std::make_shared<Impl>();
  ModKey key{&m, tin, sin};
  auto it = impl_->memo.find(key);
  if (it != impl_->memo.end()) return it->second;
  std::vector<ModuleIO> out;
  ChoiceTape tape;
  do {
    ModuleIO io = eval_module(m, tin, sin, tape, max_inner_);
    bool seen = false;
    for (auto& x : out) seen = seen || (value_equal(x.east, io.east) && value_equal(x.south, io.south));
    if (!seen) out.push_back(io);
    if (++states_ > cap_) fail(ErrorKind::SearchSpace, "SearchSpaceTooLarge: more than " + std::to_string(cap_) + " states");
  } while (tape.advance());
  impl_->memo.emplace(key, out);
  return out;
}

std::vector<Outcome> Explorer::explore(const ProgP& prog, const std::vector<Value>& west,
                                       const std::vector<Value>& north) {
  return explore_impl(prog, {{west, north}}, false);
}

std::vector<Outcome> Explorer::explore_union(const ProgP& prog, const std::vector<Borders>& inits) {
  return explore_impl(prog, inits, true);
}

std::vector<Outcome> Explorer::explore_impl(const ProgP& prog, const std::vector<Borders>& inits, bool shared) {
  if (!impl_) impl_ = std::make_shared<Impl>();
  auto cached = impl_->expanded.find(prog.get());
  if (cached == impl_->expanded.end())
    cached = impl_->expanded.emplace(prog.get(), std::make_pair(prog, expand_for_s(prog))).first;
  ProgP root = cached->second.second;
  struct S {  // absolute-position outcome
    size_t wp, np;
    std::vector<Value> e, s;
  };
  auto uniq = [](std::vector<S> v) {
    std::unordered_set<Outcome, OutcomeHash> seen;
    std::vector<S> out;
    for (auto& x : v)
      if (seen.insert(Outcome{x.wp, x.np, x.e, x.s}).second) out.push_back(std::move(x));
    return out;
  };
  std::function<std::vector<S>(const ProgP&, const std::vector<Value>&, size_t, const std::vector<Value>&, size_t)> ex;
  ex = [&](const ProgP& p, const std::vector<Value>& w, size_t wp, const std::vector<Value>& n,
           size_t np) -> std::vector<S> {
    switch (p->kind) {
      case PK::Nil: return {S{wp, np, {}, {}}};
      case PK::Module: {
        const Module& m = *p->module;
        Value tin, sin;
        size_t wp2 = wp, np2 = np;
        if (!m.listen.empty()) {
          if (wp >= w.size()) fail(ErrorKind::Border, "BorderMismatch: module " + m.label + " needs a west input");
          tin = w[wp2++];
        }
        if (!m.read.empty()) {
          if (np >= n.size()) fail(ErrorKind::Border, "BorderMismatch: module " + m.label + " needs a north input");
          sin = n[np2++];
        }
        std::vector<S> out;
        for (auto& io : module_outcomes(m, tin, sin)) {
          S s{wp2, np2, {}, {}};
          if (io.east) s.e.push_back(io.east);
          if (io.south) s.s.push_back(io.south);
          out.push_back(std::move(s));
        }
        return out;
      }
      case PK::HComp: {
        std::vector<S> out;
        for (auto& a : ex(p->a, w, wp, n, np))
          for (auto& b : ex(p->b, a.e, 0, n, a.np)) {
            if (b.wp != a.e.size()) fail(ErrorKind::Border, "BorderMismatch(east/west) during exploration");
            S s{a.wp, b.np, b.e, a.s};
            append(s.s, b.s);
            out.push_back(std::move(s));
          }
        return uniq(std::move(out));
      }
      case PK::VComp: {
        std::vector<S> out;
        for (auto& a : ex(p->a, w, wp, n, np))
          for (auto& b : ex(p->b, w, a.wp, a.s, 0)) {
            if (b.np != a.s.size()) fail(ErrorKind::Border, "BorderMismatch(south/north) during exploration");
            S s{b.wp, a.np, a.e, b.s};
            append(s.e, b.e);
            out.push_back(std::move(s));
          }
        return uniq(std::move(out));
      }
      case PK::DComp: {
        std::vector<S> out;
        for (auto& a : ex(p->a, w, wp, n, np))
          for (auto& b : ex(p->b, a.e, 0, a.s, 0)) {
            if (b.wp != a.e.size() || b.np != a.s.size())
              fail(ErrorKind::Border, "BorderMismatch(diagonal) during exploration");
            out.push_back(S{a.wp, a.np, b.e, b.s});
          }
        return uniq(std::move(out));
      }
      case PK::If:
        return guard(p->cond, {View{&w, wp}, View{&n, np}}) ? ex(p->a, w, wp, n, np) : ex(p->b, w, wp, n, np);
      case PK::WhileT:
      case PK::WhileS:
      case PK::WhileST: {
        const PK k = p->kind;
        const bool uses_w = k != PK::WhileT, uses_n = k != PK::WhileS;
        std::vector<S> out;
        std::vector<View> v0;
        if (uses_w) v0.push_back({&w, wp});
        if (uses_n) v0.push_back({&n, np});
        if (!guard(p->cond, v0)) {
          S s{wp, np, {}, {}};
          if (uses_w) s.e = take_demand(p->a, true, w, s.wp);
          if (uses_n) s.s = take_demand(p->a, false, n, s.np);
          return {s};
        }
        std::unordered_set<Outcome, OutcomeHash> visited;
        std::vector<S> work = ex(p->a, w, wp, n, np);
        while (!work.empty()) {
          S st = std::move(work.back());
          work.pop_back();
          if (!visited.insert(Outcome{st.wp, st.np, st.e, st.s}).second) continue;
          if (++states_ > cap_)
            fail(ErrorKind::SearchSpace, "SearchSpaceTooLarge: more than " + std::to_string(cap_) + " states");
          std::vector<View> v;
          if (uses_w) v.push_back({&st.e, 0});
          if (uses_n) v.push_back({&st.s, 0});
          if (!guard(p->cond, v)) {
            out.push_back(st);
            continue;
          }
          if (k == PK::WhileST) {
            for (auto& b : ex(p->a, st.e, 0, st.s, 0)) {
              if (b.wp != st.e.size() || b.np != st.s.size()) fail(ErrorKind::Border, "BorderMismatch in loop");
              work.push_back(S{st.wp, st.np, b.e, b.s});
            }
          } else if (k == PK::WhileT) {
            for (auto& b : ex(p->a, w, st.wp, st.s, 0)) {
              if (b.np != st.s.size()) fail(ErrorKind::Border, "BorderMismatch in loop");
              S s{b.wp, st.np, st.e, b.s};
              append(s.e, b.e);
              work.push_back(std::move(s));
            }
          } else {
            for (auto& b : ex(p->a, st.e, 0, n, st.np)) {
              if (b.wp != st.e.size()) fail(ErrorKind::Border, "BorderMismatch in loop");
              S s{st.wp, b.np, b.e, st.s};
              append(s.s, b.s);
              work.push_back(std::move(s));
            }
          }
        }
        return uniq(std::move(out));
      }
      default: fail(ErrorKind::Internal, "unexpanded program node");
    }
  };
  std::unordered_set<Outcome, OutcomeHash> seen;
  std::vector<Outcome> res;
  auto emit = [&](S&& s) {
    Outcome o{s.wp, s.np, std::move(s.e), std::move(s.s)};
    if (seen.insert(o).second) res.push_back(std::move(o));
  };
  if (shared && root->kind == PK::WhileST && inits.size() > 1) {
    // one worklist for every start; states are absolute (the whole input is handed to the body)
    std::unordered_set<Outcome, OutcomeHash> visited;
    std::vector<S> work;
    for (auto& [west, north] : inits) {
      std::vector<Value> w = normalize_items(west), n = normalize_items(north);
      if (!guard(root->cond, {View{&w, 0}, View{&n, 0}})) {
        S s{0, 0, {}, {}};
        s.e = take_demand(root->a, true, w, s.wp);
        s.s = take_demand(root->a, false, n, s.np);
        emit(std::move(s));
        continue;
      }
      for (auto& b : ex(root->a, w, 0, n, 0)) {
        if (b.wp != w.size() || b.np != n.size()) fail(ErrorKind::Border, "BorderMismatch in loop");
        work.push_back(S{w.size(), n.size(), b.e, b.s});
      }
    }
    while (!work.empty()) {
      S st = std::move(work.back());
      work.pop_back();
      if (!visited.insert(Outcome{st.wp, st.np, st.e, st.s}).second) continue;
      if (++states_ > cap_) fail(ErrorKind::SearchSpace, "SearchSpaceTooLarge: more than " + std::to_string(cap_) + " states");
      if (!guard(root->cond, {View{&st.e, 0}, View{&st.s, 0}})) {
        emit(std::move(st));
        continue;
      }
      for (auto& b : ex(root->a, st.e, 0, st.s, 0)) {
        if (b.wp != st.e.size() || b.np != st.s.size()) fail(ErrorKind::Border, "BorderMismatch in loop");
        work.push_back(S{st.wp, st.np, b.e, b.s});
      }
    }
    return res;
  }
  for (auto& [west, north] : inits) {
    std::vector<Value> w = normalize_items(west), n = normalize_items(north);
    for (auto& s : ex(root, w, 0, n, 0)) emit(std::move(s));
  }
  return res;
}

}  // namespace agapia
