#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "agapia/types.hpp"

namespace agapia {

// Random well-typed programs, built top-down from a few fixed interface shapes so that compositions
// connect. Loops are guarded on a counter that module bodies tend to increment; runs may still hit
// the loop bound, which callers count as skipped.
std::string random_program(std::mt19937_64& rng, int max_depth);

// A random item of an item type (ints and sets drawn from [0,4)).
Value random_value(std::mt19937_64& rng, const Type& item_type);
// A random border accepted by a list type, at most max_len items unless the type needs more.
std::vector<Value> random_items(std::mt19937_64& rng, const Type& list_type, size_t max_len);

struct SoundnessStats {
  int64_t programs = 0;    // well-typed programs generated
  int64_t executed = 0;    // runs that produced a scenario
  int64_t skipped = 0;     // runs ended by a loop bound or an input border the program did not fit
  int64_t violations = 0;  // outer borders outside the inferred type
  int64_t discipline_checks = 0;
  std::vector<std::string> examples;  // first few offending programs
};

// Generates `count` programs (depth <= max_depth) and runs each on a few random inputs of its
// inferred type, checking every outer border of the scenario against the type.
SoundnessStats random_type_soundness(int64_t count, uint64_t seed, int max_depth);

}  // namespace agapia
