// Acceptance run: one PASS/FAIL line per criterion, exit status 1 when any criterion fails.
//   acceptance            all criteria
//   acceptance --only 5,6 a subset

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "agapia/error.hpp"
#include "agapia/interp.hpp"
#include "agapia/progen.hpp"
#include "agapia/proofcheck.hpp"
#include "agapia/protocol.hpp"
#include "agapia/scenario.hpp"
#include "agapia/syntax.hpp"
#include "agapia/typecheck.hpp"

using namespace agapia;

namespace {

struct CheckResult {
  bool pass = true;
  std::string detail;
  void require(bool cond, const std::string& why) {
    if (!cond) {
      if (pass) detail = why;
      pass = false;
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// ---------- 1: grammar ----------

struct Production {
  const char* name;
  const char* good;
  const char* near_miss;
};

const Production kProductions[] = {
    {"program nil", "nil", "nill"},
    {"module", "module{listen nil}{read nil}{nil}{speak nil}{write nil}", "module{listen nil}{read nil}{nil}{speak nil}"},
    {"typed interface", "module{listen x:tInt, b:tBool}{read y:sInt}{nil}{speak x}{write y}",
     "module{listen x:tFloat}{read nil}{nil}{speak nil}{write nil}"},
    {"array and record interface", "module{listen a[~]:tIntSet}{read r(p:sInt,q:sBool)}{ }{speak a[~]}{write r(p,q)}",
     "module{listen a[~:tIntSet}{read nil}{nil}{speak nil}{write nil}"},
    {"if program", "if (x < 1) {nil} else {nil}", "if (x < 1) {nil}"},
    {"vertical composition", "nil # nil", "nil # # nil"},
    {"horizontal composition", "nil ## nil", "nil ### nil"},
    {"diagonal composition", "nil #### nil", "nil #### "},
    {"parenthesised program", "nil # (nil ## nil)", "nil # (nil ## nil"},
    {"while_t", "while_t(x < 3){nil}", "while_t(x < 3)nil"},
    {"while_s", "while_s(true){nil}", "while_s(true){nil"},
    {"while_st", "while_st(!b){nil}", "while_x(!b){nil}"},
    {"for_s macro", "for_s(i=0;i<n;i++){nil}", "for_s(i=0;i<2;j++){nil}"},
    {"new and := statements", "module{listen x}{read nil}{new y:sInt; y := x}{speak y}{write nil}",
     "module{listen nil}{read nil}{new x}{speak nil}{write nil}"},
    {"assignment", "module{listen x}{read nil}{x = x + 1}{speak x}{write nil}",
     "module{listen nil}{read nil}{x = }{speak nil}{write nil}"},
    {"statement sequence", "module{listen x}{read nil}{x = 1; x = 2}{speak x}{write nil}",
     "module{listen nil}{read nil}{x = 1 y = 2}{speak nil}{write nil}"},
    {"if statement", "module{listen x}{read nil}{if (x > 0) {x = x - 1} else {x = x + 1}}{speak x}{write nil}",
     "module{listen x}{read nil}{if x > 0 {x = 1}}{speak x}{write nil}"},
    {"while statement", "module{listen x}{read nil}{while (x > 0) {x = x / 2}}{speak x}{write nil}",
     "module{listen x}{read nil}{while (x > 0) x = 1}{speak x}{write nil}"},
    {"for statement", "module{listen x}{read nil}{for (j = 0; j < 3; j++) {x = x * 2}}{speak x}{write nil}",
     "module{listen x}{read nil}{for (j = 0, j < 3; j++) {x = 1}}{speak x}{write nil}"},
    {"arithmetic", "module{listen x}{read nil}{x = (x + 1) % 4; x = -x; x = 2 - -3}{speak x}{write nil}",
     "module{listen x}{read nil}{x = (x + 1}{speak x}{write nil}"},
    {"boolean", "module{listen b}{read nil}{b = !b || b && true; b = x <= 1 && x != 2}{speak b}{write nil}",
     "module{listen b}{read nil}{b = b && || b}{speak b}{write nil}"},
    {"sets", "module{listen s}{read nil}{s = s union {1, 2} minus {3}; b = s contains 1}{speak s}{write nil}",
     "module{listen s}{read nil}{s = {1, 2}{speak s}{write nil}"},
    {"random and delay", "module{listen x}{read nil}{x = random(3); b = random(true, false); delay(t)}{speak x}{write nil}",
     "module{listen x}{read nil}{x = random(3}{speak x}{write nil}"},
    {"modular increment and block", "module{listen x}{read nil}{x = x + 1 [mod 5]; {x++}}{speak x}{write nil}",
     "module{listen x}{read nil}{x = x + 1 [mod 5}{speak x}{write nil}"},
};

CheckResult criterion1() {
  CheckResult o;
  int good = 0, bad = 0;
  for (const auto& p : kProductions) {
    try {
      parse_program(p.good);
      ++good;
    } catch (const Error& e) {
      o.require(false, std::string(p.name) + " rejected: " + e.what());
    }
    try {
      parse_program(p.near_miss);
      o.require(false, std::string(p.name) + " near miss accepted");
    } catch (const Error& e) {
      o.require(e.kind == ErrorKind::Parse, std::string(p.name) + " near miss: " + kind_name(e.kind));
      ++bad;
    }
  }
  ProgP p = build_protocol();
  std::string once = pretty(p);
  ProgP q = parse_program(once);
  o.require(prog_equal(p, q), "protocol does not round-trip");
  o.require(pretty(q) == once, "pretty is not a fixpoint on the protocol");
  o.detail = o.pass ? fmt("%zu productions, %d positive, %d near misses rejected, protocol round-trips",
                          std::size(kProductions), good, bad)
                    : o.detail;
  return o;
}

// ---------- 2: scenario laws ----------

Scenario unit(const char* l, int w, int n, int e, int s) {
  return Scenario::single(Cell{l, make_int(w), make_int(n), make_int(e), make_int(s)});
}

std::vector<Scenario> all_units(const char* l) {
  std::vector<Scenario> v;
  for (int w = 0; w < 3; ++w)
    for (int n = 0; n < 3; ++n)
      for (int e = 0; e < 3; ++e)
        for (int s = 0; s < 3; ++s) v.push_back(unit(l, w, n, e, s));
  return v;
}

// The diagonal formula assembled from hcomp/vcomp of constant cells.
Scenario dcomp_by_formula(const Scenario& f1, const Scenario& f2) {
  Value e = f1.east()[0], s = f1.south()[0];
  auto c = [](const std::string& l, Value w, Value n, Value ee, Value ss) {
    return Scenario::single(Cell{l, w, n, ee, ss});
  };
  Scenario R1 = c(kLabelRecorder, e, nullptr, nullptr, e), L = c(kLabelEmpty, nullptr, nullptr, nullptr, nullptr);
  Scenario S2 = c(kLabelSpeaker, nullptr, s, s, nullptr), Id = Scenario::identity({s}, {e});
  Scenario R2 = c(kLabelRecorder, s, nullptr, nullptr, s), S1 = c(kLabelSpeaker, nullptr, e, e, nullptr);
  return vcomp(vcomp(hcomp(hcomp(f1, R1), L), hcomp(hcomp(S2, Id), R2)), hcomp(hcomp(L, S1), f2));
}

bool same_borders(const Scenario& a, const Scenario& b) {
  auto eq = [](const std::vector<Value>& x, const std::vector<Value>& y) {
    return items_equal(normalize_items(x), normalize_items(y));
  };
  return eq(a.west(), b.west()) && eq(a.north(), b.north()) && eq(a.east(), b.east()) && eq(a.south(), b.south());
}

CheckResult criterion2() {
  CheckResult o;
  auto A = all_units("a"), B = all_units("b"), C = all_units("c");
  int64_t ident = 0, hassoc = 0, vassoc = 0, diag = 0, diag_id = 0;
  for (auto& a : A) {
    o.require(scenario_equal(hcomp(a, Scenario::identity(a.east(), {})), a), "hcomp right identity");
    o.require(scenario_equal(hcomp(Scenario::identity(a.west(), {}), a), a), "hcomp left identity");
    o.require(scenario_equal(vcomp(a, Scenario::identity({}, a.south())), a), "vcomp right identity");
    o.require(scenario_equal(vcomp(Scenario::identity({}, a.north()), a), a), "vcomp left identity");
    ident += 4;
    Scenario d = dcomp(a, Scenario::identity(a.east(), a.south()));
    o.require(same_borders(d, a) && d.adjacency_ok(), "dcomp with Id(m,n) changes the borders");
    ++diag_id;
  }
  for (auto& a : A)
    for (auto& b : B) {
      bool h = value_equal(a.east()[0], b.west()[0]), v = value_equal(a.south()[0], b.north()[0]);
      if (h && v) {
        Scenario d = dcomp(a, b);
        o.require(d.rows() == 3 && d.cols() == 3, "dcomp of unit cells is not 3x3");
        o.require(scenario_equal(d, dcomp_by_formula(a, b)) && d.adjacency_ok(), "dcomp differs from its formula");
        ++diag;
      }
      if (!h && !v) continue;
      std::optional<Scenario> ab_h, ab_v;
      if (h) ab_h = hcomp(a, b);
      if (v) ab_v = vcomp(a, b);
      for (auto& c : C) {
        if (h && value_equal(b.east()[0], c.west()[0])) {
          o.require(scenario_equal(hcomp(*ab_h, c), hcomp(a, hcomp(b, c))), "hcomp not associative");
          ++hassoc;
        }
        if (v && value_equal(b.south()[0], c.north()[0])) {
          o.require(scenario_equal(vcomp(*ab_v, c), vcomp(a, vcomp(b, c))), "vcomp not associative");
          ++vassoc;
        }
      }
    }
  if (o.pass)
    o.detail = fmt("%lld identity, %lld hcomp and %lld vcomp associativity, %lld dcomp-formula, %lld dcomp-identity cases",
                   (long long)ident, (long long)hassoc, (long long)vassoc, (long long)diag, (long long)diag_id);
  return o;
}

// ---------- 3, 4: types and loop discipline ----------

CheckResult criterion3() {
  CheckResult o;
  SoundnessStats st = random_type_soundness(500, 2024, 4);
  o.require(st.violations == 0, fmt("%lld violations, e.g. %s", (long long)st.violations,
                                    st.examples.empty() ? "" : st.examples[0].c_str()));
  o.require(st.executed >= st.programs, "fewer executed runs than programs");
  ProgP p = build_protocol();
  ProgramType t = infer_type(expand_for_s(p));
  int corpus_runs = 0;
  for (int64_t n = 1; n <= 5; ++n)
    for (uint64_t seed = 0; seed < 20; ++seed) {
      RunConfig cfg;
      cfg.seed = seed;
      RunResult r = run(p, {}, protocol_input(n), cfg);
      const Scenario& s = r.scenario;
      bool ok = items_have_type(s.west(), t.w) && items_have_type(s.north(), t.n) && items_have_type(s.east(), t.e) &&
                items_have_type(s.south(), t.s);
      o.require(ok, fmt("protocol n=%lld seed=%llu leaves its type", (long long)n, (unsigned long long)seed));
      ++corpus_runs;
    }
  if (o.pass)
    o.detail = fmt("%lld programs, %lld scenarios checked (%lld runs skipped: loop bound or unfit input), %d corpus runs, 0 violations",
                   (long long)st.programs, (long long)st.executed, (long long)st.skipped, corpus_runs);
  return o;
}

CheckResult criterion4() {
  CheckResult o;
  int64_t checks = 0;
  try {
    SoundnessStats st = random_type_soundness(500, 4048, 4);
    checks += st.discipline_checks;
    for (int64_t n = 1; n <= 5; ++n)
      for (uint64_t seed = 0; seed < 20; ++seed) {
        RunConfig cfg;
        cfg.seed = seed;
        checks += run(build_protocol(), {}, protocol_input(n), cfg).discipline_checks;
      }
  } catch (const Error& e) {
    o.require(false, e.what());
  }
  o.require(checks > 0, "no loop boundaries were checked");
  if (o.pass) o.detail = fmt("%lld guard checks at loop entries and exits, none fired", (long long)checks);
  return o;
}

// ---------- 5, 6: protocol ----------

std::vector<MonitorReport> g_runs;

CheckResult criterion5() {
  CheckResult o;
  g_runs.clear();
  int inconclusive = 0, agree = 0;
  int64_t max_rounds = 0;
  for (int64_t n = 1; n <= 5; ++n)
    for (uint64_t seed = 0; seed < 20; ++seed) {
      MonitorReport m = monitor_run(n, seed);
      std::string tag = fmt("n=%lld seed=%llu", (long long)n, (unsigned long long)seed);
      if (!m.terminated) {
        ++inconclusive;
        o.require(false, tag + " inconclusive");
      } else {
        o.require(m.safe, tag + " terminal state has an active process or a message");
        o.require(!m.final.token_black && m.final.token_pos == 0, tag + " token is not (white,0)");
        OracleResult r = oracle_simulate(n, seed);
        bool same = r.terminated && r.state == m.final && r.rounds == m.rounds;
        o.require(same, tag + " interpreter and oracle disagree");
        agree += same;
        max_rounds = std::max(max_rounds, m.rounds);
      }
      g_runs.push_back(m);
    }
  if (o.pass)
    o.detail = fmt("100 runs: %d inconclusive, all safe, %d oracle agreements, at most %lld rounds", inconclusive, agree,
                   (long long)max_rounds);
  return o;
}

CheckResult criterion6() {
  CheckResult o;
  if (g_runs.empty()) criterion5();
  int64_t inv = 0, inv2 = 0, sent = 0, viol = 0;
  for (auto& m : g_runs) {
    inv += m.inv_checks;
    inv2 += m.inv2_checks;
    sent += m.sent_checks;
    viol += static_cast<int64_t>(m.violations.size());
    for (auto& v : m.violations)
      o.require(false, fmt("n=%lld seed=%llu %s: %s", (long long)m.n, (unsigned long long)m.seed, v.boundary.c_str(),
                           v.formula.c_str()));
  }
  o.require(inv > 0 && inv2 > 0, "no boundaries monitored");
  if (o.pass)
    o.detail = fmt("%lld WF/Inv checks at while_st boundaries, %lld Inv2 checks at for_s boundaries, %lld sent-message "
                   "checks, %lld violations",
                   (long long)inv, (long long)inv2, (long long)sent, (long long)viol);
  return o;
}

// ---------- 7, 8, 9: proofs ----------

std::optional<Report> g_flagship;

Domain up_to(int64_t n) {
  Domain d;
  d.n_max = n;
  return d;
}

CheckResult criterion7() {
  CheckResult o;
  g_flagship = check_proof(flagship_proof(), up_to(3));
  const Report& r = *g_flagship;
  o.require(r.ok(), "not every node is Valid");
  std::set<std::string> rules;
  int64_t en = 0, sat = 0, outs = 0;
  for (auto& n : r.nodes) {
    rules.insert(rule_name(n.rule));
    en += n.enumerated;
    sat += n.satisfying;
    outs += n.outcomes;
    if (n.verdict != Verdict::Valid) o.require(false, fmt("%s (N=%lld): %s", n.path.c_str(), (long long)n.param, n.message.c_str()));
  }
  for (const char* need : {"basic", "simple-for", "implication", "stwhile", "dcomp"})
    o.require(rules.count(need), std::string("no ") + need + " node");
  if (o.pass) {
    std::string rs;
    for (auto& x : rules) rs += (rs.empty() ? "" : ",") + x;
    o.detail = fmt("%zu nodes for N=1..3 (%s), %lld bindings enumerated, %lld satisfying, %lld outcomes", r.nodes.size(),
                   rs.c_str(), (long long)en, (long long)sat, (long long)outs);
  }
  return o;
}

std::string first_counterexample(const Report& r, CheckResult& o, const char* what) {
  for (auto& n : r.nodes)
    if (n.verdict == Verdict::Counterexample) {
      bool bound = n.witness.contains("binding") || (n.witness.contains("pre") && n.witness.contains("post"));
      o.require(bound, std::string(what) + ": counterexample without witness binding");
      return fmt("%s at %s N=%lld (%s)", what, n.path.c_str(), (long long)n.param, rule_name(n.rule));
    }
  o.require(false, std::string(what) + ": no Counterexample verdict");
  return "";
}

CheckResult criterion8() {
  CheckResult o;
  Report a = check_proof(mutate_drop_black(flagship_proof()), up_to(3));
  Report b = check_proof(mutate_swap_token_colours(flagship_proof()), up_to(3));
  std::string x = first_counterexample(a, o, "drop c[k]=black");
  std::string y = first_counterexample(b, o, "swap token colours");
  if (o.pass)
    o.detail = x + fmt(" [%zu total]; ", a.count(Verdict::Counterexample)) + y +
               fmt(" [%zu total]", b.count(Verdict::Counterexample));
  return o;
}

CheckResult criterion9() {
  CheckResult o;
  if (!g_flagship) criterion7();
  int64_t triples = 0, scen = 0, viol = 0, init = 0;
  for (auto& h : soundness_harness(*g_flagship)) {
    ++triples;
    scen += h.scenarios;
    init += h.initial;
    viol += h.violations;
    if (h.violations) o.require(false, h.path + ": " + h.first);
  }
  o.require(triples > 0, "no accepted triples");
  if (o.pass)
    o.detail = fmt("%lld accepted triples, %lld pre-states, %lld scenarios, %lld violations", (long long)triples,
                   (long long)init, (long long)scen, (long long)viol);
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double limit;  // seconds
  std::function<CheckResult()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> only;
  app.add_option("--only", only, "criteria to run")->delimiter(',')->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);

  const Criterion all[] = {
      {1, "grammar coverage and protocol round trip", 1, criterion1},
      {2, "scenario algebra laws on unit cells", 10, criterion2},
      {3, "dynamic type soundness", 60, criterion3},
      {4, "while discipline", 120, criterion4},
      {5, "protocol runs against the oracle", 120, criterion5},
      {6, "invariant monitoring", 120, criterion6},
      {7, "flagship proof, N <= 3", 600, criterion7},
      {8, "mutation sensitivity", 600, criterion8},
      {9, "soundness harness", 600, criterion9},
  };
  int failed = 0;
  for (const auto& c : all) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    auto t0 = std::chrono::steady_clock::now();
    CheckResult o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    double s = seconds_since(t0);
    if (o.pass && s > c.limit) {
      o.pass = false;
      o.detail = fmt("took %.1f s, limit %.0f s; ", s, c.limit) + o.detail;
    }
    std::printf("criterion %d %s: %s (%.2f s) %s\n", c.id, o.pass ? "PASS" : "FAIL", c.name, s, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
