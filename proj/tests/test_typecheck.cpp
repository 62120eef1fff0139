#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "agapia/error.hpp"
#include "agapia/syntax.hpp"
#include "agapia/typecheck.hpp"

using namespace agapia;

namespace {

std::string slurp(const std::string& rel) {
  std::ifstream in(std::string(AGAPIA_SOURCE_DIR) + "/" + rel);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ProgramType ty(const std::string& src) { return infer_type(expand_for_s(parse_program(src))); }

std::string type_err(const std::string& src) {
  try {
    ty(src);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind, ErrorKind::Type) << e.what();
    return e.what();
  }
  return "";
}

const char* kCell = "module{listen x:tInt}{read y:sBool}{x = x + 1; y = !y}{speak x}{write y}";

}  // namespace

TEST(Infer, ModuleFromDeclarations) {
  EXPECT_EQ(to_text(ty(kCell)), "<(tn) | (sb) | (tn) | (sb)>");
  ProgramType t = ty("module{listen nil}{read n:sInt}{nil}{speak nil}{write n}");
  EXPECT_EQ(t.w->kind, TKind::Nil);
}

TEST(Infer, WhileStTypeIsUnionOfOppositeBorders) {
  std::string src = std::string("while_st(x < 3 && y){") + kCell + "}";
  ProgramType t = ty(src);
  ProgramType b = ty(kCell);
  EXPECT_TRUE(type_equal(t.w, t_union({b.w, b.e})));
  EXPECT_TRUE(type_equal(t.e, t.w));
  EXPECT_TRUE(type_equal(t.n, t_union({b.n, b.s})));
  EXPECT_TRUE(type_equal(t.s, t.n));
}

TEST(Infer, CompositionTypes) {
  std::string m = kCell;
  EXPECT_EQ(to_text(ty(m + " ## " + m)), "<(tn) | (sb);(sb) | (tn) | (sb);(sb)>");
  EXPECT_EQ(to_text(ty(m + " # " + m)), "<(tn);(tn) | (sb) | (tn);(tn) | (sb)>");
  EXPECT_EQ(to_text(ty(m + " #### " + m)), "<(tn) | (sb) | (tn) | (sb)>");
  EXPECT_EQ(to_text(ty("while_t(y){" + m + "}")), "<((tn);)* | (sb) | ((tn);)* | (sb)>");
  EXPECT_EQ(to_text(ty("while_s(x < 2){" + m + "}")), "<(tn) | ((sb);)* | (tn) | ((sb);)*>");
}

TEST(Infer, IfUnionAndScope) {
  std::string a = "module{listen x:tInt}{read nil}{nil}{speak x}{write nil}";
  std::string b = "module{listen x:tBool}{read nil}{nil}{speak x}{write nil}";
  ProgramType t = ty("if (x == 1) {" + a + "} else {" + b + "}");
  EXPECT_EQ(t.w->kind, TKind::Union);
  EXPECT_EQ(to_text(t.w, Axis::Temporal), "((tn) | (tb))");
  std::string c = "module{listen z:tInt}{read nil}{nil}{speak z}{write nil}";
  EXPECT_NE(type_err("if (x == 1) {" + a + "} else {" + c + "}").find("ConditionScopeError"), std::string::npos);
}

TEST(Infer, MismatchNamesAxis) {
  std::string a = "module{listen x:tInt}{read nil}{nil}{speak x}{write nil}";
  std::string b = "module{listen x:tBool}{read nil}{nil}{speak x}{write nil}";
  std::string e = type_err(a + " ## " + b);
  EXPECT_NE(e.find("MatchFailure(east/west"), std::string::npos) << e;
  std::string c = "module{listen nil}{read nil}{s = 1}{speak nil}{write s:sInt}";
  std::string d = "module{listen nil}{read s:sBool}{nil}{speak nil}{write nil}";
  EXPECT_NE(type_err(c + " # " + d).find("MatchFailure(south/north"), std::string::npos);
  // field names take part in matching
  std::string f = "module{listen nil}{read nil}{u = 1}{speak u:tInt}{write nil}";
  EXPECT_NE(type_err(f + " ## " + a).find("MatchFailure"), std::string::npos);
}

TEST(Infer, DeclarationErrors) {
  EXPECT_NE(type_err("module{listen x}{read nil}{nil}{speak x}{write nil}").find("untyped"), std::string::npos);
  EXPECT_NE(type_err("module{listen x:sInt}{read nil}{nil}{speak x}{write nil}").find("temporal"),
            std::string::npos);
  EXPECT_NE(type_err("module{listen x:tInt, x:tInt}{read nil}{nil}{speak x}{write nil}").find("duplicate"),
            std::string::npos);
  EXPECT_NE(type_err("module{listen x:tInt}{read nil}{x = q}{speak x}{write nil}").find("undeclared"),
            std::string::npos);
}

TEST(Infer, ProtocolAccepted) {
  ProgP p = expand_for_s(parse_program(slurp("corpus/termination.agapia")));
  ProgramType t = infer_type(p);
  EXPECT_EQ(to_text(t, true),
            "<nil | (n: sn) | (tn: tn, tid: tn, msg: (tset)*, token: (col: tb, pos: tn)) | "
            "((id: sn, c: sb, active: sb);)*>");
  // I1 speaks exactly what I2 listens to
  const Module& i1 = *p->a->a->module;
  const Module& i2 = *p->a->b->b->a->a->module;
  EXPECT_EQ(i2.label, "I2");
  EXPECT_TRUE(type_equal(item_type(i1.speak), item_type(i2.listen)));
  auto w = module_warnings(i1);
  ASSERT_EQ(w.size(), 2u);  // tid and msg keep their defaults
  EXPECT_NE(w[0].find("'tid'"), std::string::npos);
}

TEST(ConditionScope, Examples) {
  EXPECT_NO_THROW(check_condition_scope(parse_expr("!(token.col == white && token.pos == 0)"), {"token", "tn"}));
  EXPECT_THROW(check_condition_scope(parse_expr("out > 0"), {"x"}), Error);
  EXPECT_NO_THROW(check_condition_scope(parse_expr("true"), {}));
  EXPECT_NO_THROW(check_condition_scope(parse_expr("forall k in [0, tn) : k < tn"), {"tn"}));
}

TEST(Infer, ForSPreservesTypeOfExpansion) {
  std::string r = "module{listen i:tInt, x:tInt}{read v:sInt}{x = x + v}{speak i, x}{write v}";
  std::string src = "P = for_s(i=0;i<3;i++){R};\nR = " + r + ";";
  ProgP raw = parse_program(src);
  ProgP exp = expand_for_s(raw);
  EXPECT_EQ(to_text(infer_type(exp)), "<(tn, tn) | ((sn);)* | (tn, tn) | ((sn);)*>");
  EXPECT_THROW(infer_type(raw), Error);
}
