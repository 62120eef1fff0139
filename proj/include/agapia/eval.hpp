#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "agapia/ast.hpp"
#include "agapia/value.hpp"

namespace agapia {

// ---------- randomness ----------

// Source of random(k) draws: a value in [0, k].
class RandomSource {
 public:
  virtual ~RandomSource() = default;
  virtual int64_t uniform(int64_t k) = 0;
};

uint64_t splitmix64(uint64_t x);
// Stream seed of one module instance: the run seed mixed with its execution path.
uint64_t stream_seed(uint64_t seed, const std::vector<int64_t>& path);

// 64-bit LCG (Knuth's MMIX constants); draws use the high 32 bits.
class PathRng : public RandomSource {
 public:
  explicit PathRng(uint64_t state) : state_(state) {}
  PathRng(uint64_t seed, const std::vector<int64_t>& path) : state_(stream_seed(seed, path)) {}
  int64_t uniform(int64_t k) override;

 private:
  uint64_t state_;
};

// Replays a recorded choice sequence; unseen choice points take 0. advance() moves to the next
// sequence in depth-first order and returns false when every branch has been visited.
class ChoiceTape : public RandomSource {
 public:
  int64_t uniform(int64_t k) override;
  bool advance();
  void rewind() { pos_ = 0; }

 private:
  std::vector<std::pair<int64_t, int64_t>> tape_;  // (choice, max)
  size_t pos_ = 0;
};

// ---------- expressions ----------

// Name resolution for expression evaluation.
class Env {
 public:
  virtual ~Env() = default;
  // Throws Error when the name is unbound.
  virtual Value var(const std::string& name, const Span& where) const = 0;
  // Hook for calls the environment defines itself (e.g. old(...)); scope is the innermost environment,
  // including quantifier-bound names. Return false to fall through.
  virtual bool call(const Expr&, const Env& /*scope*/, Value&) const { return false; }
  // Quantifier-bound names only.
  virtual bool bound(const std::string&, Value&) const { return false; }
  // Hook for name[k] when name denotes a family rather than one array; return false to fall through.
  virtual bool family(const std::string&, int64_t, Value&) const { return false; }
};

// Bound variables (quantifiers) layered over another environment.
class ScopedEnv : public Env {
 public:
  explicit ScopedEnv(const Env& base) : base_(base) {}
  Value var(const std::string& name, const Span& where) const override;
  bool call(const Expr& e, const Env& scope, Value& out) const override { return base_.call(e, scope, out); }
  bool bound(const std::string& name, Value& out) const override;
  bool family(const std::string& n, int64_t k, Value& out) const override;
  void push(const std::string& name, Value v) { bound_.emplace_back(name, std::move(v)); }
  void pop() { bound_.pop_back(); }
  void set_top(Value v) { bound_.back().second = std::move(v); }

 private:
  const Env& base_;
  std::vector<std::pair<std::string, Value>> bound_;
};

// rng may be null (random(...) is then an error).
Value eval_expr(const ExprP& e, const Env& env, RandomSource* rng);
bool eval_bool(const ExprP& e, const Env& env, RandomSource* rng);

// ---------- W-code ----------

// Variables of one module: no spatial/temporal distinction inside.
class Store : public Env {
 public:
  Value var(const std::string& name, const Span& where) const override;
  const Value* find(const std::string& name) const;
  void set(const std::string& name, Value v);
  bool has(const std::string& name) const { return find(name) != nullptr; }
  const std::vector<std::pair<std::string, Value>>& entries() const { return vars_; }

 private:
  std::vector<std::pair<std::string, Value>> vars_;
};

void eval_w(const std::vector<StmtP>& body, Store& store, RandomSource& rng, int64_t max_iters = 10000);

struct ModuleIO {
  Value east, south;  // nil when the module speaks/writes nothing
};

// Binds the listen/read declarations from tin/sin (named tuples, or nil), runs the body, and packs
// the speak/write declarations. Inputs of the wrong shape are a BorderMismatch.
ModuleIO eval_module(const Module& m, const Value& tin, const Value& sin, RandomSource& rng,
                     int64_t max_iters = 10000);

// Value of a declaration read from / packed into a module-level tuple.
Value pack_decls(const std::vector<Decl>& decls, const Store& store);

}  // namespace agapia
