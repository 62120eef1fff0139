#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "agapia/proofcheck.hpp"
#include "agapia/syntax.hpp"

namespace agapia {

// Ring of n processes as seen on the borders of the program: the token line (tn, tid, msg, token)
// and one (id, c, active) line per process.
struct RingState {
  int64_t n = 0;
  std::vector<int64_t> id;
  std::vector<bool> black, active;
  bool token_black = false;
  int64_t token_pos = 0;
  std::vector<std::vector<int64_t>> msg;  // msg[k]: processes that k sent work to and that did not take it yet

  bool operator==(const RingState&) const = default;
  bool terminated() const;  // every process passive, no pending messages
  std::string text() const;
  nlohmann::json to_json() const;
};

// From a token-line item and the process-line items.
RingState ring_from_borders(const Value& token_line, const std::vector<Value>& processes);

// ---------- the program ----------

const SourceFile& protocol_source();
// P = I #### Q, the definitions resolved.
ProgP build_protocol();
ProgP protocol_part(const std::string& name);  // I, I1, I2, Q, R
// North input of P for a ring of n processes.
std::vector<Value> protocol_input(int64_t n);

// ---------- formulas ----------

// The safety properties and their per-process refinements, for a ring of n processes. Formulas use the
// loop variable tid where the round position matters (P1d, P2d, Inv2); Q1-Q3 relate a step of R to
// its pre-state through old().
struct InvariantFormulas {
  ExprP WF, P1, P2, Inv, Cond, P1d, P2d, Inv2, Q1, Q2, Q3, Sent, Final;
};
InvariantFormulas invariant_formulas(int64_t n);

// ---------- monitored runs ----------

struct MonitorConfig {
  int64_t max_rounds = 1000;
  bool check_invariants = true;
};

struct InvariantViolation {
  std::string boundary;  // "round 3", "round 3 process 1", "exit"
  std::string formula;
  std::string binding;
};

struct MonitorReport {
  int64_t n = 0;
  uint64_t seed = 0;
  bool terminated = false;  // reached token = (white, 0) within the round bound
  int64_t rounds = 0;       // iterations of the outer loop
  int64_t inv_checks = 0, inv2_checks = 0, sent_checks = 0;
  std::vector<InvariantViolation> violations;
  bool safe = false;        // terminal state has every process passive and no messages
  RingState final;
  std::string note;         // why a run is inconclusive
  bool ok() const { return terminated && safe && violations.empty(); }
  nlohmann::json to_json() const;
};

// Runs P for n processes with the given seed, checking Inv at every round boundary, Inv2 at every
// process boundary inside a round and the sent-messages property after each full round.
MonitorReport monitor_run(int64_t n, uint64_t seed, const MonitorConfig& cfg = {});

// ---------- independent simulation ----------

struct OracleStep {
  enum Action { ConsumeJobs, WorkAndSend, GoPassive, PassToken } action;
  int64_t round = 0, process = 0;
  std::vector<int64_t> targets;  // WorkAndSend: the drawn targets
  bool black = false;            // PassToken: colour of the token passed on
};
const char* action_name(OracleStep::Action a);

struct OracleResult {
  RingState state;
  bool terminated = false;
  int64_t rounds = 0;
  std::vector<OracleStep> steps;
};

// A direct implementation of the protocol on RingState, drawing random numbers from the same
// per-module streams as the interpreter.
OracleResult oracle_simulate(int64_t n, uint64_t seed, int64_t max_rounds = 1000);

// ---------- proof ----------

// The proof script of corpus/termination.sthl with its program text.
ProofScript flagship_proof();

// Mutations for sensitivity tests: drop "c[k] == black" from P2d; swap white and black in the
// token-passing branch of R.
ProofScript mutate_drop_black(const ProofScript& s);
ProofScript mutate_swap_token_colours(const ProofScript& s);

}  // namespace agapia
