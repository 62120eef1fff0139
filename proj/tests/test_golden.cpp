#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "agapia/interp.hpp"
#include "agapia/protocol.hpp"

using namespace agapia;

// Stored scenario dumps of the protocol. Regenerate with AGAPIA_UPDATE_GOLDEN=1.
namespace {

void golden(int64_t n, uint64_t seed) {
  std::string path = std::string(AGAPIA_SOURCE_DIR) + "/corpus/golden/ring-n" + std::to_string(n) + "-seed" +
                     std::to_string(seed) + ".json";
  RunConfig cfg;
  cfg.seed = seed;
  nlohmann::json got = to_json(run(build_protocol(), {}, protocol_input(n), cfg).scenario);
  if (std::getenv("AGAPIA_UPDATE_GOLDEN")) {
    std::ofstream(path) << got.dump(1) << "\n";
    GTEST_SKIP() << "rewrote " << path;
  }
  std::ifstream in(path);
  ASSERT_TRUE(in) << path;
  nlohmann::json want = nlohmann::json::parse(in);
  EXPECT_EQ(got, want) << path;
  // the dump is a complete description of the scenario
  EXPECT_EQ(to_json(scenario_from_json(want)), want);
}

}  // namespace

TEST(Golden, RingTwoProcessesSeedOne) { golden(2, 1); }
TEST(Golden, RingThreeProcessesSeedTwo) { golden(3, 2); }
