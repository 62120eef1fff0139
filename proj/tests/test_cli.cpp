#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdlib>
#include <fstream>
#include <cstdio>
#include <string>

#include "json.hpp"

namespace {

struct Out {
  int rc;
  std::string text;
};

Out sh(const std::string& args) {
  std::string cmd = std::string(AGAPIA_CLI) + " " + args + " 2>/dev/null";
  std::string text;
  FILE* p = popen(cmd.c_str(), "r");
  std::array<char, 4096> buf;
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) text.append(buf.data(), n);
  int st = pclose(p);
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, text};
}

std::string corpus(const char* f) { return std::string(AGAPIA_SOURCE_DIR) + "/corpus/" + f; }

}  // namespace

TEST(Cli, ParseEmitsAstJson) {
  Out o = sh("parse " + corpus("termination.agapia"));
  ASSERT_EQ(o.rc, 0);
  auto j = nlohmann::json::parse(o.text);
  EXPECT_EQ(j["schema"], "agapia.parse/1");
  EXPECT_TRUE(j["ast"].contains("kind"));
}

TEST(Cli, TypecheckPrintsType) {
  Out o = sh("typecheck " + corpus("termination.agapia"));
  EXPECT_EQ(o.rc, 0);
  EXPECT_EQ(o.text, "<nil | (sn) | (tn, tn, (tset)*, (tb, tn)) | ((sn, sb, sb);)*>\n");
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(sh("run /nonexistent/missing.agapia").rc, 2);
  EXPECT_EQ(sh("").rc, 1);
  EXPECT_EQ(sh("run").rc, 1);
  EXPECT_EQ(sh("protocol ring --n 0").rc, 1);
  // the protocol needs its north input
  EXPECT_EQ(sh("run " + corpus("termination.agapia")).rc, 3);
  EXPECT_EQ(sh("run " + corpus("termination.agapia") + " --north '(n: 2)' --max-iters 0").rc, 3);
  EXPECT_EQ(sh("protocol ring --n 3 --max-rounds 0").rc, 3);
}

TEST(Cli, RunIsDeterministic) {
  std::string cmd = "run " + corpus("termination.agapia") + " --north '(n: 3)' --seed 5 --json";
  Out a = sh(cmd), b = sh(cmd);
  ASSERT_EQ(a.rc, 0);
  EXPECT_EQ(a.text, b.text);
  auto j = nlohmann::json::parse(a.text);
  EXPECT_EQ(j["schema"], "agapia.run/1");
  EXPECT_EQ(j["south"].size(), 3u);
}

TEST(Cli, ProtocolRing) {
  Out o = sh("protocol ring --n 3 --seed 2 --monitor --oracle-check --json");
  ASSERT_EQ(o.rc, 0);
  auto j = nlohmann::json::parse(o.text);
  EXPECT_EQ(j["schema"], "agapia.protocol/1");
  EXPECT_TRUE(j["run"]["ok"].get<bool>());
  EXPECT_TRUE(j["oracle"]["agrees"].get<bool>());
}

TEST(Cli, VerifySmallDomain) {
  Out o = sh("verify " + corpus("termination.sthl") + " --domain n=2");
  EXPECT_EQ(o.rc, 0);
  EXPECT_NE(o.text.find("0 counterexamples, 0 rejected"), std::string::npos) << o.text;
  EXPECT_EQ(sh("verify " + corpus("termination.sthl") + " --domain n=2").text, o.text);
  EXPECT_EQ(sh("verify /nonexistent.sthl").rc, 2);
}

TEST(Cli, VerifyCounterexampleExitsFour) {
  std::string dir = testing::TempDir();
  std::ofstream(dir + "/id.agapia") << "vars { x: sInt; }\nId = module{listen nil}{read x}{x=x;}{speak nil}{write x};\n";
  std::ofstream(dir + "/bad.sthl") << "(script bad (source \"id.agapia\")\n"
                                      "(proof (basic (prog Id) (contour \"(n E)\") (pre \"x == 0\") (post \"x == 1\"))))\n";
  Out o = sh("verify " + dir + "/bad.sthl --json");
  EXPECT_EQ(o.rc, 4);
  auto j = nlohmann::json::parse(o.text);
  EXPECT_FALSE(j["ok"].get<bool>());
  EXPECT_EQ(j["nodes"][0]["verdict"], "Counterexample");
  EXPECT_TRUE(j["nodes"][0].contains("witness"));
}
