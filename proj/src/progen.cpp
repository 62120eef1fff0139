#include "agapia/progen.hpp"

#include <optional>

#include "agapia/error.hpp"
#include "agapia/interp.hpp"
#include "agapia/syntax.hpp"
#include "agapia/typecheck.hpp"

namespace agapia {

namespace {

// Interface shapes: index 0 is nil. Temporal shapes carry x (and b), spatial ones y (and c).
const char* const kTemporal[] = {"nil", "x:tInt", "x:tInt, b:tBool"};
const char* const kSpatial[] = {"nil", "y:sInt", "y:sInt, c:sBool"};

using Want = std::optional<int>;

struct Gen {
  std::mt19937_64& rng;

  int pick(int n) { return static_cast<int>(std::uniform_int_distribution<int>(0, n - 1)(rng)); }
  bool coin(int percent) { return pick(100) < percent; }
  int shape(const Want& w) { return w ? *w : pick(3); }
  std::string num() { return std::to_string(pick(4)); }

  std::string int_expr(const std::vector<std::string>& ints) {
    if (ints.empty() || coin(25)) return coin(30) ? "random(" + std::to_string(1 + pick(2)) + ")" : num();
    std::string v = ints[pick(static_cast<int>(ints.size()))];
    switch (pick(4)) {
      case 0: return v;
      case 1: return v + " + " + num();
      case 2: return v + " * 2";
      default: return int_expr(ints) + " - " + num();
    }
  }

  // Conditions of if/while programs may not draw random numbers.
  std::string bool_expr(const std::vector<std::string>& ints, const std::vector<std::string>& bools, bool guard = false) {
    switch (pick(4)) {
      case 0: return coin(50) || guard ? "true" : "random(true, false)";
      case 1:
        if (!bools.empty()) return "!" + bools[pick(static_cast<int>(bools.size()))];
        [[fallthrough]];
      case 2:
        if (!ints.empty()) return ints[pick(static_cast<int>(ints.size()))] + " < " + num();
        [[fallthrough]];
      default: return "false";
    }
  }

  // Variables of a pair of shapes, split by sort.
  static void vars(int t, int s, std::vector<std::string>& ints, std::vector<std::string>& bools) {
    if (t >= 1) ints.push_back("x");
    if (t == 2) bools.push_back("b");
    if (s >= 1) ints.push_back("y");
    if (s == 2) bools.push_back("c");
  }

  std::string module(int w, int n, int e, int s) {
    std::vector<std::string> ints, bools, out_ints, out_bools;
    vars(w, n, ints, bools);
    vars(e, s, out_ints, out_bools);
    std::string body;
    auto add = [&](const std::string& st) { body += (body.empty() ? "" : "; ") + st; };
    for (auto& v : out_ints) {
      bool input = std::find(ints.begin(), ints.end(), v) != ints.end();
      if (input && coin(75))
        add(v + " = " + v + " + 1" + (coin(30) ? " + random(1)" : ""));
      else
        add(v + " = " + int_expr(ints));
    }
    for (auto& v : out_bools) add(v + " = " + bool_expr(ints, bools));
    if (!ints.empty() && coin(20)) {
      std::string v = ints[pick(static_cast<int>(ints.size()))];
      add("if (" + v + " > 2) {" + v + " = " + v + " - 1}");
    }
    if (body.empty()) body = "nil";
    return std::string("module{listen ") + kTemporal[w] + "}{read " + kSpatial[n] + "}{" + body + "}{speak " +
           kTemporal[e] + "}{write " + kSpatial[s] + "}";
  }

  std::string cond(int t, int s) {
    std::vector<std::string> ints, bools;
    vars(t, s, ints, bools);
    return bool_expr(ints, bools, true);
  }

  std::string bound() { return std::to_string(2 + pick(4)); }

  // A program whose interface shapes equal the wanted ones where given.
  std::string prog(int depth, Want w, Want n, Want e, Want s) {
    if (depth <= 1 || coin(20)) return module(shape(w), shape(n), shape(e), shape(s));
    std::vector<int> ok;
    if (!n && !s) ok.push_back(0);  // hcomp
    if (!w && !e) ok.push_back(1);  // vcomp
    ok.push_back(2);                // dcomp
    ok.push_back(3);                // if
    if (!w && !e && (!n || !s || *n == *s) && n.value_or(s.value_or(1)) != 0) ok.push_back(4);  // while_t
    if (!n && !s && (!w || !e || *w == *e) && w.value_or(e.value_or(1)) != 0) ok.push_back(5);  // while_s
    if ((!w || !e || *w == *e) && (!n || !s || *n == *s)) ok.push_back(6);                        // while_st
    int d = depth - 1;
    switch (ok[pick(static_cast<int>(ok.size()))]) {
      case 0: {
        int m = pick(3);
        return "(" + prog(d, w, {}, m, {}) + " ## " + prog(d, m, {}, e, {}) + ")";
      }
      case 1: {
        int m = pick(3);
        return "(" + prog(d, {}, n, {}, m) + " # " + prog(d, {}, m, {}, s) + ")";
      }
      case 2: {
        int me = pick(3), ms = pick(3);
        return "(" + prog(d, w, n, me, ms) + " #### " + prog(d, me, ms, e, s) + ")";
      }
      case 3: {
        int cw = shape(w), cn = shape(n);
        return "if (" + cond(cw, cn) + ") {" + prog(d, cw, cn, e, s) + "} else {" + prog(d, cw, cn, e, s) + "}";
      }
      case 4: {
        int a = n ? *n : s ? *s : 1 + pick(2);
        return "while_t (y < " + bound() + ") {" + prog(d, {}, a, {}, a) + "}";
      }
      case 5: {
        int a = w ? *w : e ? *e : 1 + pick(2);
        return "while_s (x < " + bound() + ") {" + prog(d, a, {}, a, {}) + "}";
      }
      default: {
        int a = w ? *w : e ? *e : pick(3), b = n ? *n : s ? *s : pick(3);
        if (a == 0 && b == 0) return module(shape(w), shape(n), shape(e), shape(s));
        std::string g = a ? "x < " + bound() : "";
        if (b) g += (g.empty() ? "" : " && ") + std::string("y < ") + bound();
        return "while_st (" + g + ") {" + prog(d, a, b, a, b) + "}";
      }
    }
  }
};

}  // namespace

std::string random_program(std::mt19937_64& rng, int max_depth) {
  Gen g{rng};
  return g.prog(max_depth, {}, {}, {}, {});
}

Value random_value(std::mt19937_64& rng, const Type& t) {
  auto u = [&](int64_t hi) { return std::uniform_int_distribution<int64_t>(0, hi - 1)(rng); };
  switch (t->kind) {
    case TKind::Nil: return nullptr;
    case TKind::Int: return make_int(u(4));
    case TKind::Bool: return make_bool(u(2) == 1);
    case TKind::Set: {
      std::vector<int64_t> s;
      for (int64_t k = 0; k < 4; ++k)
        if (u(2)) s.push_back(k);
      return make_set(s);
    }
    case TKind::Tuple: {
      std::vector<Value> kids;
      for (auto& k : t->kids) kids.push_back(random_value(rng, k));
      return make_tuple(kids, t->names);
    }
    case TKind::Union: return random_value(rng, t->kids[u(static_cast<int64_t>(t->kids.size()))]);
    case TKind::Star: {
      std::vector<Value> kids;
      for (int64_t i = u(4); i > 0; --i) kids.push_back(random_value(rng, t->kids[0]));
      return make_seq(kids);
    }
    default: fail(ErrorKind::Internal, "random_value: not an item type: " + to_text(t, Axis::Spatial));
  }
}

std::vector<Value> random_items(std::mt19937_64& rng, const Type& t, size_t max_len) {
  auto paths = expand_paths(t, max_len);
  for (size_t len = max_len; paths.empty() && len < 16;) paths = expand_paths(t, len *= 2);  // fixed lists longer than max_len
  if (paths.empty()) fail(ErrorKind::Internal, "random_items: no border of " + to_text(t, Axis::Spatial) + " within " + std::to_string(max_len) + " items");
  const auto& path = paths[std::uniform_int_distribution<size_t>(0, paths.size() - 1)(rng)];
  std::vector<Value> out;
  for (auto& it : path) out.push_back(random_value(rng, it));
  return normalize_items(out);
}

SoundnessStats random_type_soundness(int64_t count, uint64_t seed, int max_depth) {
  SoundnessStats st;
  std::mt19937_64 rng(seed);
  while (st.programs < count) {
    std::string src = random_program(rng, max_depth);
    ProgP p;
    ProgramType t;
    try {
      p = parse_program(src);
      t = infer_type(p);
    } catch (const Error&) {
      continue;  // the shapes do not always line up (e.g. a star border against a single item)
    }
    ++st.programs;
    for (int attempt = 0; attempt < 3; ++attempt) {
      RunConfig cfg;
      cfg.seed = rng();
      cfg.max_while_t = cfg.max_while_s = cfg.max_while_st = 64;
      cfg.max_inner = 64;
      RunResult r;
      try {
        r = run(p, random_items(rng, t.w, 3), random_items(rng, t.n, 3), cfg);
      } catch (const Error& e) {
        if (e.kind == ErrorKind::Internal) throw;
        ++st.skipped;
        continue;
      }
      ++st.executed;
      st.discipline_checks += r.discipline_checks;
      const Scenario& s = r.scenario;
      bool ok = items_have_type(s.west(), t.w) && items_have_type(s.north(), t.n) &&
                items_have_type(s.east(), t.e) && items_have_type(s.south(), t.s) &&
                items_have_type(r.east, t.e) && items_have_type(r.south, t.s);
      if (!ok) {
        ++st.violations;
        if (st.examples.size() < 3) st.examples.push_back(src);
      }
    }
  }
  return st;
}

}  // namespace agapia
