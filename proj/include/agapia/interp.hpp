#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "agapia/ast.hpp"
#include "agapia/eval.hpp"
#include "agapia/scenario.hpp"

namespace agapia {

struct RunConfig {
  uint64_t seed = 0;
  int64_t max_while_t = 10000;
  int64_t max_while_s = 10000;
  int64_t max_while_st = 10000;
  int64_t max_inner = 10000;  // while/for inside module bodies
  bool trace = false;
  bool build_scenario = true;
  bool check_discipline = true;
};

// One loop boundary: the borders a guard was evaluated on. For while_s boundaries, `done` holds the
// south items produced so far by the loop and `pending` the north items not consumed yet.
struct TraceRecord {
  std::string kind;  // "while_t", "while_s", "while_st"
  std::vector<int64_t> path;
  int64_t iteration = 0;
  std::vector<Value> west, north, done, pending;
};

struct RunResult {
  Scenario scenario;
  std::vector<Value> east, south;
  std::vector<TraceRecord> trace;
  int64_t discipline_checks = 0;
  int64_t modules_run = 0;
};

// Border lists are item lists; nils are dropped. Every input item must be consumed.
RunResult run(const ProgP& p, const std::vector<Value>& west, const std::vector<Value>& north, const RunConfig& cfg);
std::vector<TraceRecord> trace(const ProgP& p, const std::vector<Value>& west, const std::vector<Value>& north,
                               RunConfig cfg);

// All outcomes over every resolution of random(...), for relational reasoning.
struct Outcome {
  size_t west_used = 0, north_used = 0;  // items consumed from the inputs
  std::vector<Value> east, south;
  bool operator==(const Outcome& o) const;
};

class Explorer {
 public:
  explicit Explorer(int64_t state_cap = 200000, int64_t max_inner = 10000)
      : cap_(state_cap), max_inner_(max_inner) {}
  std::vector<Outcome> explore(const ProgP& p, const std::vector<Value>& west, const std::vector<Value>& north);
  // Union of the outcomes from several initial borders. A top-level while_st shares one worklist, so a
  // border state reached from several starts is expanded once.
  using Borders = std::pair<std::vector<Value>, std::vector<Value>>;
  std::vector<Outcome> explore_union(const ProgP& p, const std::vector<Borders>& inits);
  // Every (east, south) of a module over all random branches.
  std::vector<ModuleIO> module_outcomes(const Module& m, const Value& tin, const Value& sin);
  int64_t states_visited() const { return states_; }

 private:
  struct Impl;
  std::vector<Outcome> explore_impl(const ProgP& p, const std::vector<Borders>& inits, bool shared);
  int64_t cap_, max_inner_, states_ = 0;
  std::shared_ptr<Impl> impl_;
};

}  // namespace agapia
