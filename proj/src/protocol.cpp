#include "agapia/protocol.hpp"

#include <algorithm>
#include <regex>

#include "agapia/corpus.hpp"
#include "agapia/error.hpp"
#include "agapia/interp.hpp"

namespace agapia {

// ---------- ring states ----------

bool RingState::terminated() const {
  for (int64_t k = 0; k < n; ++k)
    if (active[k] || !msg[k].empty()) return false;
  return true;
}

std::string RingState::text() const {
  std::string s = "token=(" + std::string(token_black ? "black" : "white") + "," + std::to_string(token_pos) + ")";
  for (int64_t k = 0; k < n; ++k) {
    s += " p" + std::to_string(id[k]) + "=" + (black[k] ? "black" : "white") + (active[k] ? "/active" : "/passive") + "{";
    for (size_t j = 0; j < msg[k].size(); ++j) s += (j ? "," : "") + std::to_string(msg[k][j]);
    s += "}";
  }
  return s;
}

nlohmann::json RingState::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["token"] = {{"col", token_black ? "black" : "white"}, {"pos", token_pos}};
  j["processes"] = nlohmann::json::array();
  for (int64_t k = 0; k < n; ++k)
    j["processes"].push_back(
        {{"id", id[k]}, {"c", black[k] ? "black" : "white"}, {"active", static_cast<bool>(active[k])}, {"msg", msg[k]}});
  return j;
}

namespace {

Value field(const Value& v, const char* name) {
  Value out;
  if (!tuple_field(v, name, &out)) fail(ErrorKind::Runtime, std::string("ring state: no field ") + name + " in " + to_text(v));
  return out;
}

int64_t int_of(const Value& v) {
  if (!v || (v->kind != VKind::Int && v->kind != VKind::Bool)) fail(ErrorKind::Runtime, "ring state: expected a number");
  return v->num;
}

}  // namespace

RingState ring_from_borders(const Value& t, const std::vector<Value>& processes) {
  RingState r;
  r.n = int_of(field(t, "tn"));
  Value tok = field(t, "token");
  r.token_black = int_of(field(tok, "col")) != 0;
  r.token_pos = int_of(field(tok, "pos"));
  Value msg = field(t, "msg");
  for (auto& m : msg ? msg->kids : std::vector<Value>{}) r.msg.push_back(m ? m->set : std::vector<int64_t>{});
  r.msg.resize(static_cast<size_t>(std::max<int64_t>(r.n, 0)));
  for (auto& p : processes) {
    r.id.push_back(int_of(field(p, "id")));
    r.black.push_back(int_of(field(p, "c")) != 0);
    r.active.push_back(int_of(field(p, "active")) != 0);
  }
  if (static_cast<int64_t>(processes.size()) != r.n)
    fail(ErrorKind::Runtime, "ring state: " + std::to_string(processes.size()) + " process lines for tn = " + std::to_string(r.n));
  return r;
}

// ---------- program ----------

const SourceFile& protocol_source() {
  static const SourceFile src = parse_source(corpus::termination_agapia, "termination.agapia");
  return src;
}

ProgP protocol_part(const std::string& name) { return resolve(protocol_source(), name); }

ProgP build_protocol() {
  static const ProgP p = protocol_part("P");
  return p;
}

std::vector<Value> protocol_input(int64_t n) { return {make_tuple({make_int(n)}, {"n"})}; }

// ---------- formulas ----------

ProofScript flagship_proof() {
  return parse_script(corpus::termination_sthl, [](const std::string& path) -> std::string {
    if (path == "termination.agapia") return corpus::termination_agapia;
    fail(ErrorKind::Usage, "flagship proof: unknown source " + path);
  });
}

InvariantFormulas invariant_formulas(int64_t n) {
  static const ProofScript s = flagship_proof();
  auto f = [&](const char* text) { return script_formula(s, text, n); };
  InvariantFormulas r;
  r.WF = f("WF");
  r.P1 = f("P1");
  r.P2 = f("P2");
  r.Inv = f("Inv");
  r.Cond = f("Cond");
  r.P1d = f("P1d(tid)");
  r.P2d = f("P2d(tid)");
  r.Inv2 = f("Inv2(tid)");
  r.Q1 = f("Q1");
  r.Q2 = f("Q2");
  r.Q3 = f("Q3");
  r.Sent = f("forall k in [0,N): msg[k] subset [0,k)");
  r.Final = f("forall k in [0,N): active[k] == false && msg[k] == {}");
  return r;
}

// ---------- monitor ----------

nlohmann::json MonitorReport::to_json() const {
  nlohmann::json j = {{"n", n},
                      {"seed", seed},
                      {"terminated", terminated},
                      {"rounds", rounds},
                      {"safe", safe},
                      {"ok", ok()},
                      {"checks", {{"inv", inv_checks}, {"inv2", inv2_checks}, {"sent", sent_checks}}},
                      {"note", note}};
  j["violations"] = nlohmann::json::array();
  for (auto& v : violations) j["violations"].push_back({{"boundary", v.boundary}, {"formula", v.formula}, {"binding", v.binding}});
  if (final.n) j["final"] = final.to_json();
  return j;
}

MonitorReport monitor_run(int64_t n, uint64_t seed, const MonitorConfig& mc) {
  if (n < 1) fail(ErrorKind::Usage, "monitor_run: n must be at least 1");
  MonitorReport rep;
  rep.n = n;
  rep.seed = seed;
  RunConfig cfg;
  cfg.seed = seed;
  cfg.max_while_st = mc.max_rounds;
  cfg.trace = true;  // round count comes from the trace
  RunResult res;
  try {
    res = run(build_protocol(), {}, protocol_input(n), cfg);
  } catch (const Error& e) {
    if (e.kind != ErrorKind::LoopBound) throw;
    rep.note = std::string("inconclusive: ") + e.what();
    return rep;
  }
  rep.terminated = true;
  InvariantFormulas f = invariant_formulas(n);
  auto check = [&](const ExprP& formula, const char* name, const ContourBinding& b, const std::string& where) {
    bool ok = false;
    std::string why;
    try {
      ok = eval_formula(formula, b);
    } catch (const Error& e) {
      why = std::string(" (") + e.what() + ")";
    }
    if (!ok) rep.violations.push_back({where, name + why, to_text(b)});
  };
  for (auto& r : res.trace) {
    if (r.kind == "while_st") {
      rep.rounds = std::max(rep.rounds, r.iteration);
      if (!mc.check_invariants) continue;
      ContourBinding b;
      b.v = r.west;
      b.h = r.north;
      std::string where = "round " + std::to_string(r.iteration);
      check(f.WF, "WF", b, where);
      check(f.Inv, "Inv", b, where);
      check(f.Sent, "msg[k] subset [0,k)", b, where);
      rep.inv_checks += 2;
      ++rep.sent_checks;
    } else if (mc.check_invariants && r.kind == "while_s" && r.path.size() == 3 && r.path[0] == 1) {
      ContourBinding b;
      b.v = r.west;
      b.h = r.done;
      b.h.insert(b.h.end(), r.pending.begin(), r.pending.end());
      check(f.Inv2, "Inv2", b, "round " + std::to_string(r.path[1]) + " process " + std::to_string(r.iteration));
      ++rep.inv2_checks;
    }
  }
  if (res.east.size() != 1) fail(ErrorKind::Internal, "protocol run: expected one token line on the east border");
  rep.final = ring_from_borders(res.east[0], res.south);
  ContourBinding fin;
  fin.v = res.east;
  fin.h = res.south;
  rep.safe = rep.final.terminated() && eval_formula(f.Final, fin);
  if (rep.final.token_black || rep.final.token_pos != 0)
    rep.violations.push_back({"exit", "token == (white, 0)", rep.final.text()});
  return rep;
}

// ---------- oracle ----------

const char* action_name(OracleStep::Action a) {
  switch (a) {
    case OracleStep::ConsumeJobs: return "consume-jobs";
    case OracleStep::WorkAndSend: return "work-and-send";
    case OracleStep::GoPassive: return "go-passive";
    case OracleStep::PassToken: return "pass-token";
  }
  return "?";
}

OracleResult oracle_simulate(int64_t n, uint64_t seed, int64_t max_rounds) {
  if (n < 1) fail(ErrorKind::Usage, "oracle_simulate: n must be at least 1");
  OracleResult out;
  RingState& s = out.state;
  s.n = n;
  s.token_black = true;
  s.token_pos = 0;
  s.msg.assign(n, {});
  for (int64_t k = 0; k < n; ++k) {
    s.id.push_back(k);
    s.black.push_back(false);
    s.active.push_back(true);
  }
  auto step = [&](int64_t round, int64_t t) {
    // the stream of R for process t in this round
    PathRng rng(seed, {1, round, 1, t, 0});
    bool consumed = false;
    for (int64_t j = 0; j < n; ++j) {
      auto& m = s.msg[j];
      auto it = std::find(m.begin(), m.end(), t);
      if (it != m.end()) {
        m.erase(it);
        s.active[t] = true;
        consumed = true;
      }
    }
    if (consumed) out.steps.push_back({OracleStep::ConsumeJobs, round, t, {}});
    if (s.active[t]) {
      int64_t r = rng.uniform(n - 1);
      OracleStep w{OracleStep::WorkAndSend, round, t, {}};
      for (int64_t i = 0; i < r; ++i) {
        int64_t k = rng.uniform(n - 1);
        w.targets.push_back(k);
        auto& m = s.msg[t];
        if (k != t && std::find(m.begin(), m.end(), k) == m.end()) {
          m.push_back(k);
          std::sort(m.begin(), m.end());
        }
        if (k < t) s.black[t] = true;
      }
      out.steps.push_back(w);
      s.active[t] = rng.uniform(1) == 0;  // random(true, false)
      if (!s.active[t]) out.steps.push_back({OracleStep::GoPassive, round, t, {}});
    }
    if (!s.active[t] && s.token_pos == t) {
      if (t == 0) s.token_black = false;
      if (t != 0 && s.black[t]) {
        s.token_black = true;
        s.black[t] = false;
      }
      s.token_pos = (s.token_pos + 1) % n;
      out.steps.push_back({OracleStep::PassToken, round, t, {}, s.token_black});
    }
  };
  for (int64_t round = 0;; ++round) {
    if (!s.token_black && s.token_pos == 0) {
      out.terminated = true;
      out.rounds = round;
      break;
    }
    if (round >= max_rounds) {
      out.rounds = round;
      break;
    }
    for (int64_t t = 0; t < n; ++t) step(round, t);
  }
  return out;
}

// ---------- mutations ----------

ProofScript mutate_drop_black(const ProofScript& s) {
  ProofScript m = s;
  static const std::regex colour(R"(\s*&&\s*\(msg\[k\] inter \[0,k\) != \{\} -> c\[k\] == black\))");
  for (auto& d : m.defines)
    if (d.name == "P2d") {
      std::string t = std::regex_replace(d.text, colour, "");
      if (t == d.text) fail(ErrorKind::Usage, "mutation: P2d has no c[k] == black conjunct");
      d.text = t;
      return m;
    }
  fail(ErrorKind::Usage, "mutation: the script defines no P2d");
}

ProofScript mutate_swap_token_colours(const ProofScript& s) {
  ProofScript m = s;
  std::string& src = m.source_text;
  size_t from = src.find("if(!active && token.pos==id){");
  size_t to = from == std::string::npos ? from : src.find("token.pos=token.pos+1", from);
  if (to == std::string::npos) fail(ErrorKind::Usage, "mutation: no token-passing branch in R");
  std::string branch = src.substr(from, to - from);
  branch = std::regex_replace(branch, std::regex("white"), "\x01");
  branch = std::regex_replace(branch, std::regex("black"), "white");
  branch = std::regex_replace(branch, std::regex("\x01"), "black");
  src.replace(from, to - from, branch);
  return m;
}

}  // namespace agapia
