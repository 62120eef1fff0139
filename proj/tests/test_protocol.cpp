#include <gtest/gtest.h>

#include "agapia/error.hpp"
#include "agapia/interp.hpp"
#include "agapia/protocol.hpp"
#include "agapia/typecheck.hpp"

using namespace agapia;

namespace {

ContourBinding ring(const std::string& token_line, const std::string& processes) {
  ContourBinding b;
  b.v = {parse_value(token_line)};
  b.h = parse_items(processes);
  return b;
}

const char* kProcs3 = "(id: 0, c: white, active: false); (id: 1, c: white, active: true); (id: 2, c: white, active: true)";

}  // namespace

// ---------- program ----------

TEST(Ring, Typechecks) {
  ProgramType t = infer_type(expand_for_s(build_protocol()));
  EXPECT_EQ(to_text(t), "<nil | (sn) | (tn, tn, (tset)*, (tb, tn)) | ((sn, sb, sb);)*>");
}

TEST(Ring, PrettyRoundTrip) {
  ProgP p = build_protocol();
  ProgP q = parse_program(pretty(p));
  EXPECT_TRUE(prog_equal(p, q));
}

TEST(Ring, StateAfterInitialisation) {
  RunResult r = run(protocol_part("I"), {}, protocol_input(3), {});
  ASSERT_EQ(r.east.size(), 1u);
  RingState s = ring_from_borders(r.east[0], r.south);
  EXPECT_EQ(s.n, 3);
  EXPECT_TRUE(s.token_black);
  EXPECT_EQ(s.token_pos, 0);
  for (int64_t k = 0; k < 3; ++k) {
    EXPECT_EQ(s.id[k], k);
    EXPECT_FALSE(s.black[k]);
    EXPECT_TRUE(s.active[k]);
    EXPECT_TRUE(s.msg[k].empty());
  }
  ContourBinding b;
  b.v = r.east;
  b.h = r.south;
  InvariantFormulas f = invariant_formulas(3);
  EXPECT_TRUE(eval_formula(f.Inv, b));
  EXPECT_TRUE(eval_formula(f.WF, b));
}

// ---------- formulas ----------

TEST(Formulas, P1FirstDisjunct) {
  InvariantFormulas f = invariant_formulas(3);
  auto b = ring("(tn: 3, tid: 0, msg: [{}, {}, {}], token: (col: white, pos: 1))", kProcs3);
  EXPECT_TRUE(eval_formula(f.P1, b));
  auto busy = ring("(tn: 3, tid: 0, msg: [{2}, {}, {}], token: (col: white, pos: 1))", kProcs3);
  EXPECT_FALSE(eval_formula(f.P1, busy));
}

TEST(Formulas, P1WrapsAtZero) {
  // i = 0: every process must be passive, unless none is black beyond tn-1 (there is none)
  InvariantFormulas f = invariant_formulas(3);
  auto b = ring("(tn: 3, tid: 0, msg: [{}, {}, {}], token: (col: white, pos: 0))", kProcs3);
  EXPECT_FALSE(eval_formula(f.P1, b));
}

TEST(Formulas, P2dViolatedByUnreportedMessage) {
  InvariantFormulas f = invariant_formulas(3);
  auto b = ring("(tn: 3, tid: 2, msg: [{1}, {}, {}], token: (col: white, pos: 0))", kProcs3);
  EXPECT_FALSE(eval_formula(f.P2d, b));
  auto ok = ring("(tn: 3, tid: 2, msg: [{}, {0}, {}], token: (col: white, pos: 0))",
                 "(id: 0, c: white, active: false); (id: 1, c: black, active: true); (id: 2, c: white, active: true)");
  EXPECT_TRUE(eval_formula(f.P2d, ok));
}

TEST(Formulas, BlackTokenMakesInvVacuous) {
  InvariantFormulas f = invariant_formulas(3);
  auto b = ring("(tn: 3, tid: 0, msg: [{1}, {2}, {0}], token: (col: black, pos: 2))", kProcs3);
  EXPECT_TRUE(eval_formula(f.Inv, b));
}

// ---------- monitored runs and the oracle ----------

TEST(Monitor, SingleProcess) {
  for (uint64_t seed = 0; seed < 5; ++seed) {
    MonitorReport m = monitor_run(1, seed);
    EXPECT_TRUE(m.ok()) << m.to_json().dump();
    EXPECT_FALSE(m.final.token_black);
    EXPECT_EQ(m.final.token_pos, 0);
    EXPECT_FALSE(m.final.active[0]);
  }
}

TEST(Monitor, InvariantsOnThreeProcesses) {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    MonitorReport m = monitor_run(3, seed);
    EXPECT_TRUE(m.violations.empty()) << m.to_json().dump();
    EXPECT_TRUE(m.terminated);
    EXPECT_GT(m.inv_checks, 0);
    EXPECT_EQ(m.inv2_checks, m.rounds * 4);  // tid = 0..3 in every round
  }
}

TEST(Monitor, RoundBoundIsInconclusive) {
  MonitorConfig cfg;
  cfg.max_rounds = 0;
  MonitorReport m = monitor_run(2, 0, cfg);
  EXPECT_FALSE(m.terminated);
  EXPECT_FALSE(m.ok());
  EXPECT_NE(m.note.find("inconclusive"), std::string::npos);
}

TEST(Oracle, AgreesWithInterpreter) {
  for (int64_t n = 1; n <= 4; ++n)
    for (uint64_t seed = 0; seed < 20; ++seed) {
      MonitorReport m = monitor_run(n, seed);
      OracleResult o = oracle_simulate(n, seed);
      ASSERT_TRUE(o.terminated);
      EXPECT_EQ(o.state, m.final) << "n=" << n << " seed=" << seed << "\n" << o.state.text() << "\n" << m.final.text();
      EXPECT_EQ(o.rounds, m.rounds);
      EXPECT_TRUE(m.safe);
    }
}

TEST(Oracle, SingleProcessPassesTwiceAtMost) {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    OracleResult o = oracle_simulate(1, seed);
    ASSERT_TRUE(o.terminated);
    int passes = 0;
    for (auto& s : o.steps) passes += s.action == OracleStep::PassToken;
    EXPECT_LE(passes, 2);
  }
}

TEST(Oracle, TerminalTokenIsWhiteAtZero) {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    OracleResult o = oracle_simulate(3, seed);
    EXPECT_FALSE(o.state.token_black);
    EXPECT_EQ(o.state.token_pos, 0);
    EXPECT_TRUE(o.state.terminated());
  }
}

TEST(Oracle, SendingBackwardsBlackensTheToken) {
  int witnessed = 0;
  for (uint64_t seed = 0; seed < 20; ++seed) {
    OracleResult o = oracle_simulate(4, seed);
    for (size_t i = 0; i < o.steps.size(); ++i) {
      const auto& s = o.steps[i];
      if (s.action != OracleStep::WorkAndSend || s.process == 0) continue;
      bool backwards = false;
      for (int64_t k : s.targets) backwards = backwards || k < s.process;
      if (!backwards) continue;
      for (size_t j = i + 1; j < o.steps.size(); ++j)
        if (o.steps[j].action == OracleStep::PassToken && o.steps[j].process == s.process) {
          EXPECT_TRUE(o.steps[j].black) << "seed " << seed;
          ++witnessed;
          break;
        }
    }
  }
  EXPECT_GT(witnessed, 0);
}

// ---------- proof ----------

TEST(Flagship, StructureAndConclusion) {
  ProofScript s = flagship_proof();
  Domain d;
  d.n_max = 2;
  Report r = check_proof(s, d);
  EXPECT_TRUE(r.ok()) << r.table();
  const NodeReport* st = nullptr;
  for (auto& n : r.nodes)
    if (n.param == 2 && n.rule == Rule::STWhile) st = &n;
  ASSERT_NE(st, nullptr);
  // {Inv} while_st(...) {Inv and token = (white, 0)}
  EXPECT_TRUE(formula_equal(st->obligation->triple.post,
                            script_formula(s, "WF && Inv && token.col == white && token.pos == 0", 2)));
  std::set<Rule> rules;
  for (auto& n : r.nodes) rules.insert(n.rule);
  EXPECT_EQ(rules, (std::set<Rule>{Rule::Basic, Rule::HComp, Rule::DComp, Rule::STWhile, Rule::SimpleFor,
                                   Rule::Implication}));
}

TEST(Flagship, SwappedTokenColoursCaught) {
  ProofScript s = mutate_swap_token_colours(flagship_proof());
  Domain d;
  d.n_max = 2;
  Report r = check_proof(s, d);
  ASSERT_GT(r.count(Verdict::Counterexample), 0u) << r.table();
  for (auto& n : r.nodes)
    if (n.verdict == Verdict::Counterexample) {
      EXPECT_EQ(n.rule, Rule::Basic);
      EXPECT_TRUE(n.witness.contains("pre"));
    }
}

TEST(Flagship, DroppedColourConjunctCaught) {
  ProofScript s = mutate_drop_black(flagship_proof());
  Report r = check_proof(s, {});
  ASSERT_EQ(r.count(Verdict::Counterexample), 1u) << r.table();
  for (auto& n : r.nodes)
    if (n.verdict == Verdict::Counterexample) {
      EXPECT_EQ(n.param, 3);
      EXPECT_EQ(n.rule, Rule::Implication);
      EXPECT_TRUE(n.witness.contains("binding"));
    }
}

TEST(Flagship, MutationsNeedTheirTargets) {
  ProofScript s = flagship_proof();
  s.defines.clear();
  EXPECT_THROW(mutate_drop_black(s), Error);
  s.source_text = "x";
  EXPECT_THROW(mutate_swap_token_colours(s), Error);
}
