#include <gtest/gtest.h>

#include "agapia/progen.hpp"
#include "agapia/syntax.hpp"
#include "agapia/typecheck.hpp"

using namespace agapia;

TEST(Progen, ProgramsTypecheckAndParseBack) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    std::string src = random_program(rng, 4);
    ProgP p = parse_program(src);
    EXPECT_NO_THROW(infer_type(p)) << src;
    EXPECT_TRUE(prog_equal(p, parse_program(pretty(p)))) << src;
  }
}

TEST(Progen, Deterministic) {
  std::mt19937_64 a(5), b(5);
  for (int i = 0; i < 20; ++i) EXPECT_EQ(random_program(a, 4), random_program(b, 4));
}

TEST(Progen, ItemsInhabitTheirType) {
  std::mt19937_64 rng(2);
  for (const char* text : {"((sn, sb);)*", "(sn);((sn, sb);)*", "nil", "(sset) | (sn, (sn)*)"}) {
    Type t = parse_type_on(text, Axis::Spatial);
    for (int i = 0; i < 50; ++i) EXPECT_TRUE(items_have_type(random_items(rng, t, 3), t)) << text;
  }
}

TEST(Progen, ExecutedScenariosInhabitInferredTypes) {
  SoundnessStats st = random_type_soundness(150, 3, 4);
  EXPECT_EQ(st.programs, 150);
  EXPECT_EQ(st.violations, 0) << (st.examples.empty() ? "" : st.examples[0]);
  EXPECT_GT(st.executed, st.skipped);
}
