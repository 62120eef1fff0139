#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "agapia/error.hpp"
#include "agapia/syntax.hpp"

using namespace agapia;

namespace {

std::string slurp(const std::string& rel) {
  std::ifstream in(std::string(AGAPIA_SOURCE_DIR) + "/" + rel);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ErrorKind kind_of(const std::string& text) {
  try {
    parse_program(text);
  } catch (const Error& e) {
    return e.kind;
  }
  return ErrorKind::Internal;
}

std::string nospace(std::string s) {
  s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
  return s;
}

const char* kI1 =
    "module{listen nil}{read n}{\n tn=n; token.col=black; token.pos=0;\n}"
    "{speak tn,tid,msg[~],token(col,pos)}{write nil}";

}  // namespace

TEST(Parse, Nil) { EXPECT_EQ(parse_program("nil")->kind, PK::Nil); }

TEST(Parse, InitModule) {
  ProgP p = parse_program(kI1);
  ASSERT_EQ(p->kind, PK::Module);
  const Module& m = *p->module;
  EXPECT_TRUE(m.listen.empty());
  ASSERT_EQ(m.read.size(), 1u);
  EXPECT_EQ(m.read[0].name, "n");
  EXPECT_EQ(pretty_stmts(m.body), "tn = n;\ntoken.col = black;\ntoken.pos = 0;\n");
  EXPECT_EQ(pretty_decls(m.speak), "tn, tid, msg[~], token(col, pos)");
  EXPECT_TRUE(m.write.empty());
  EXPECT_EQ(m.speak[2].shape, Shape::Array);
  EXPECT_EQ(m.speak[3].shape, Shape::Record);
}

TEST(Parse, WhileStGuard) {
  ProgP p = parse_program("while_st(!(token.col==white && token.pos==0)){ nil }");
  ASSERT_EQ(p->kind, PK::WhileST);
  EXPECT_EQ(pretty(p->cond), "!(token.col == white && token.pos == 0)");
  EXPECT_EQ(p->a->kind, PK::Nil);
}

TEST(Parse, SpansPointAtSource) {
  ProgP p = parse_program("nil ##\n  nil");
  ASSERT_EQ(p->kind, PK::HComp);
  EXPECT_EQ(p->b->span.line, 2u);
  EXPECT_EQ(p->b->span.col, 3u);
  EXPECT_EQ(p->span.line, 1u);
  EXPECT_EQ(p->span.end_line, 2u);
}

// One positive case per grammar production (programs, modules, statements, expressions, interfaces).
TEST(Parse, EveryProductionPositive) {
  const char* cases[] = {
      "nil",
      "module{listen nil}{read nil}{nil}{speak nil}{write nil}",
      "module{listen x:tInt}{read y:sBool}{}{speak x}{write y}",
      "module{listen a[~]:tIntSet}{read r(p:sInt,q:sBool)}{ }{speak a[~]}{write r(p,q)}",
      "if (x < 1) {nil} else {nil}",
      "nil # nil",
      "nil ## nil",
      "nil #### nil",
      "nil # (nil ## nil)",
      "while_t(x < 3){nil}",
      "while_s(true){nil}",
      "while_st(!b){nil}",
      "for_s(i=0;i<n;i++){nil}",
      "module{listen x}{read nil}{new y:sInt; y := x}{speak y}{write nil}",
      "module{listen x}{read nil}{if (x > 0) {x = x - 1} else {x = x + 1}}{speak x}{write nil}",
      "module{listen x}{read nil}{while (x > 0) {x = x / 2}}{speak x}{write nil}",
      "module{listen x}{read nil}{for (j = 0; j < 3; j++) {x = x * 2}}{speak x}{write nil}",
      "module{listen x}{read nil}{x = (x + 1) % 4; x = -x; x = 2 - -3}{speak x}{write nil}",
      "module{listen b}{read nil}{b = !b || b && true; b = x <= 1 && x >= 0 && x != 2}{speak b}{write nil}",
      "module{listen s}{read nil}{s = s union {1, 2} minus {3}; s = s inter null; b = s contains 1}{speak s}{write nil}",
      "module{listen x}{read nil}{x = random(3); b = random(true, false); delay(t)}{speak x}{write nil}",
      "module{listen x}{read nil}{x = x + 1 [mod 5]; {x++}}{speak x}{write nil}",
  };
  for (const char* c : cases) {
    SCOPED_TRACE(c);
    EXPECT_NO_THROW(parse_program(c));
  }
  // formula-only productions
  for (const char* f : {"forall k in [0, n) : x[k] == 0", "exists k in (0, n] : k in s", "a -> b -> c",
                        "a <-> b", "s subset t", "(k, white, true) == (id, c, active)[k]", "old(x) + 1 [mod n]"}) {
    SCOPED_TRACE(f);
    EXPECT_NO_THROW(parse_expr(f));
  }
}

TEST(Parse, NearMissesRejected) {
  const char* cases[] = {
      "module{listen nil}{read n}{x=1}{speak nil}",  // no write block
      "nil # # nil",
      "nil ### nil",
      "if (x) {nil}",  // program-level if needs else
      "while_st(x){nil",
      "for_s(i=0;i<2;j++){nil}",
      "module{listen nil}{read nil}{x = }{speak nil}{write nil}",
      "module{listen nil}{read nil}{new x}{speak nil}{write nil}",
      "module{listen nil}{read nil}{x = 1 y = 2}{speak nil}{write nil}",
      "while_x(true){nil}",
      "module{listen x:tFloat}{read nil}{nil}{speak nil}{write nil}",
      "nil nil",
  };
  for (const char* c : cases) {
    SCOPED_TRACE(c);
    EXPECT_EQ(kind_of(c), ErrorKind::Parse);
  }
  EXPECT_THROW(parse_expr("a < b < c"), Error);
}

TEST(Parse, RecoveryReportsOneErrorPerStatement) {
  try {
    parse_program("module{listen nil}{read nil}{ x = ; y = 1; z = * 2; w = 3 }{speak nil}{write nil}");
    FAIL();
  } catch (const Error& e) {
    std::string m = e.what();
    EXPECT_EQ(std::count(m.begin(), m.end(), '\n'), 1) << m;
  }
}

TEST(Parse, UndefinedAndRecursiveNames) {
  EXPECT_EQ(kind_of("P = Q;"), ErrorKind::Parse);
  EXPECT_EQ(kind_of("P = Q; Q = P ## nil;"), ErrorKind::Parse);
}

TEST(Parse, ProtocolCorpus) {
  SourceFile f = parse_source(slurp("corpus/termination.agapia"), "termination.agapia");
  EXPECT_EQ(f.defs.size(), 6u);
  ProgP p = resolve(f);
  ASSERT_EQ(p->kind, PK::DComp);
  EXPECT_EQ(outline(p), "I1 ## for_s(tid=0;tid < tn;tid++){I2} #### while_st(!(token.col == white && token.pos == 0)){"
                        "for_s(tid=0;tid < tn;tid++){R}}");
  // the speak list of the initializer coincides with the listen list of I2
  ProgP i1 = p->a->a, i2 = p->a->b->a;
  EXPECT_EQ(pretty_decls(i1->module->speak), pretty_decls(i2->module->listen));
  // vars filled the declaration types
  EXPECT_EQ(pretty_decls(i2->module->listen),
            "tn:tInt, tid:tInt, msg[~]:tIntSet, token(col:{white,black}, pos:tInt)");
  EXPECT_EQ(pretty_decls(i2->module->write), "id:sInt, c:{white,black}, active:sBool");
}

TEST(Pretty, ProtocolRoundTripIsFixpoint) {
  ProgP p = parse_program(slurp("corpus/termination.agapia"));
  std::string once = pretty(p);
  ProgP q = parse_program(once);
  EXPECT_TRUE(prog_equal(p, q));
  EXPECT_EQ(pretty(q), once);
}

TEST(ForS, ExpandsToWhileS) {
  std::string src =
      "P = for_s(i=0;i<2;i++){R};\n"
      "R = module{listen i:tInt, x:tInt}{read nil}{x = x + i}{speak i, x}{write nil};";
  ProgP p = expand_for_s(parse_program(src));
  EXPECT_EQ(nospace(outline(p)), "i=0##while_s(i<2){R##i++}");
  ASSERT_EQ(p->kind, PK::HComp);
  const Module& init = *p->a->module;
  EXPECT_TRUE(init.read.empty() && init.write.empty());
  EXPECT_EQ(pretty_decls(init.listen), "i:tInt, x:tInt");
  EXPECT_EQ(pretty_decls(init.speak), "i:tInt, x:tInt");
  const Module& inc = *p->b->a->b->module;
  EXPECT_EQ(pretty_stmts(inc.body), "i++;\n");
}

TEST(ForS, MissingVariableIsMacroError) {
  ProgP p = parse_program("for_s(i=0;i<2;i++){module{listen x}{read nil}{nil}{speak x}{write nil}}");
  try {
    expand_for_s(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind, ErrorKind::Macro);
  }
}

TEST(ForS, MacroFreeUnchangedAndIdempotent) {
  ProgP p = parse_program("nil ## while_s(true){nil # nil}");
  EXPECT_EQ(expand_for_s(p), p);
  ProgP q = expand_for_s(parse_program(slurp("corpus/termination.agapia")));
  EXPECT_TRUE(prog_equal(expand_for_s(q), q));
}

TEST(ForS, NestedInnermostFirst) {
  std::string src =
      "for_s(i=0;i<2;i++){ for_s(j=0;j<3;j++){ module{listen i,j}{read nil}{nil}{speak i,j}{write nil} } }";
  ProgP p = expand_for_s(parse_program(src));
  std::function<bool(const ProgP&)> has_for = [&](const ProgP& q) -> bool {
    return q && (q->kind == PK::ForS || has_for(q->a) || has_for(q->b));
  };
  EXPECT_FALSE(has_for(p));
  EXPECT_EQ(nospace(outline(p)), "i=0##while_s(i<2){j=0##while_s(j<3){M##j++}##i++}");
  // printing the expansion and parsing it back gives the same tree
  EXPECT_TRUE(prog_equal(parse_program(pretty(p)), p));
}

TEST(Json, HasSpansAndKinds) {
  auto j = to_json(parse_program("nil ## nil"));
  EXPECT_EQ(j["kind"], "hcomp");
  EXPECT_EQ(j["b"]["span"][1], 8);
  auto e = to_json(parse_expr("x + 1"));
  EXPECT_EQ(e["op"], "+");
}

// ---------- random AST round trip ----------

namespace {

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(uint64_t s) : rng(s) {}
  int pick(int n) { return static_cast<int>(rng() % n); }
  std::string var() {
    static const char* v[] = {"x", "y", "tn", "msg", "token", "k"};
    return v[pick(6)];
  }

  ExprP lit() {
    switch (pick(6)) {
      case 0: return e_int(pick(20) - 5);
      case 1: return e_bool(pick(2));
      case 2: {
        auto e = std::make_shared<Expr>();
        e->kind = EK::Color;
        e->num = pick(2);
        return e;
      }
      case 3: {
        auto e = std::make_shared<Expr>();
        e->kind = EK::Null;
        return e;
      }
      default: return e_var(var());
    }
  }

  ExprP expr(int d) {
    if (d <= 0) return lit();
    auto mk = [](EK k, std::vector<ExprP> kids) {
      auto e = std::make_shared<Expr>();
      e->kind = k;
      e->kids = std::move(kids);
      return e;
    };
    switch (pick(12)) {
      case 0: return lit();
      case 1: return e_un(pick(2) ? Op::Not : Op::Neg, expr(d - 1));
      case 2:
      case 3:
      case 4: return e_bin(static_cast<Op>(pick(static_cast<int>(Op::Subset) + 1)), expr(d - 1), expr(d - 1));
      case 5: return e_field(expr(d - 1), pick(2) ? "col" : "pos");
      case 6: return e_index(expr(d - 1), expr(d - 1));
      case 7: {
        std::vector<ExprP> a;
        for (int i = pick(3); i > 0; --i) a.push_back(expr(d - 1));
        return pick(2) ? e_call("random", a) : mk(EK::SetLit, a);
      }
      case 8: {
        std::vector<ExprP> a;
        for (int i = 2 + pick(2); i > 0; --i) a.push_back(expr(d - 1));
        return mk(EK::TupleLit, a);
      }
      case 9: {
        auto e = mk(EK::Interval, {expr(d - 1), expr(d - 1)});
        static const int bits[] = {0, 2, 3};
        e->num = bits[pick(3)];
        return e;
      }
      case 10: {
        auto e = mk(EK::Quant, {expr(d - 1), expr(d - 1)});
        e->forall = pick(2);
        e->name = "q";
        return e;
      }
      default: return mk(EK::Mod, {expr(d - 1), expr(d - 1)});
    }
  }

  ExprP lvalue(int d) {
    ExprP e = e_var(var());
    for (int i = pick(3); i > 0; --i) e = pick(2) ? e_field(e, "pos") : e_index(e, expr(d));
    return e;
  }

  LeafType leaf(Axis side) {
    LeafType t;
    t.leaf = static_cast<Leaf>(pick(4));
    t.axis = t.leaf == Leaf::Color ? side : (pick(2) ? Axis::Spatial : Axis::Temporal);
    return t;
  }

  std::vector<StmtP> stmts(int d) {
    std::vector<StmtP> out;
    for (int i = pick(4); i > 0; --i) out.push_back(stmt(d));
    return out;
  }

  StmtP stmt(int d) {
    auto s = std::make_shared<Stmt>();
    int k = d <= 0 ? pick(5) : pick(9);
    switch (k) {
      case 0: s->kind = SK::Nil; break;
      case 1:
        s->kind = SK::New;
        s->name = "v";
        s->new_type = leaf(Axis::Spatial);
        s->new_type->array = pick(2);
        break;
      case 2:
      case 3:
        s->kind = SK::Assign;
        s->target = lvalue(d - 1);
        s->value = expr(d);
        break;
      case 4:
        s->kind = SK::Incr;
        s->target = lvalue(d - 1);
        break;
      case 5:
        s->kind = SK::If;
        s->value = expr(d - 1);
        s->body = stmts(d - 1);
        if (pick(2)) s->els = stmts(d - 1);
        break;
      case 6:
        s->kind = SK::While;
        s->value = expr(d - 1);
        s->body = stmts(d - 1);
        break;
      case 7: {
        s->kind = SK::For;
        s->init = stmt(0);
        while (s->init->kind != SK::Assign) s->init = stmt(0);
        s->value = expr(d - 1);
        s->step = stmt(0);
        while (s->step->kind != SK::Incr && s->step->kind != SK::Assign) s->step = stmt(0);
        s->body = stmts(d - 1);
        break;
      }
      default:
        if (pick(2)) {
          s->kind = SK::Delay;
          s->target = expr(d - 1);
        } else {
          s->kind = SK::Block;
          s->body = stmts(d - 1);
        }
    }
    return s;
  }

  std::vector<Decl> decls(Axis side) {
    std::vector<Decl> out;
    static const char* names[] = {"a", "b", "c", "d"};
    for (int i = pick(4); i > 0; --i) {
      Decl d;
      d.name = names[out.size()];
      d.shape = static_cast<Shape>(pick(3));
      int n = d.shape == Shape::Record ? 1 + pick(2) : 1;
      for (int f = 0; f < n; ++f) {
        if (d.shape == Shape::Record) d.fields.push_back(f ? "pos" : "col");
        d.types.push_back(pick(2) ? std::optional<LeafType>(leaf(side)) : std::nullopt);
      }
      out.push_back(d);
    }
    return out;
  }

  ProgP prog(int d) {
    auto p = std::make_shared<Prog>();
    int k = d <= 0 ? pick(2) : pick(9);
    switch (k) {
      case 0: p->kind = PK::Nil; break;
      case 1: {
        p->kind = PK::Module;
        p->module = std::make_shared<Module>();
        p->module->listen = decls(Axis::Temporal);
        p->module->read = decls(Axis::Spatial);
        p->module->speak = decls(Axis::Temporal);
        p->module->write = decls(Axis::Spatial);
        p->module->body = stmts(2);
        break;
      }
      case 2:
        p->kind = PK::If;
        p->cond = expr(2);
        p->a = prog(d - 1);
        p->b = prog(d - 1);
        break;
      case 3:
      case 4:
      case 5:
        p->kind = static_cast<PK>(static_cast<int>(PK::VComp) + pick(3));
        p->a = prog(d - 1);
        p->b = prog(d - 1);
        break;
      case 6:
      case 7:
        p->kind = static_cast<PK>(static_cast<int>(PK::WhileT) + pick(3));
        p->cond = expr(2);
        p->a = prog(d - 1);
        break;
      default:
        p->kind = PK::ForS;
        p->name = "i";
        p->init = expr(1);
        p->cond = expr(2);
        p->a = prog(d - 1);
    }
    return p;
  }
};

}  // namespace

TEST(Pretty, RandomAstRoundTrip) {
  Gen g(20261015);
  int ok = 0;
  for (int i = 0; i < 500; ++i) {
    ProgP p = g.prog(5);
    // the parser fills untyped occurrences from typed ones; apply the same step to the generated tree
    SourceFile sf;
    sf.main = p;
    p = resolve(sf);
    std::string text = pretty(p);
    ProgP q;
    try {
      q = parse_program(text);
    } catch (const Error& e) {
      ADD_FAILURE() << e.what() << "\n" << text;
      continue;
    }
    if (prog_equal(p, q)) ++ok;
    else ADD_FAILURE() << text << "\n---\n" << pretty(q);
  }
  EXPECT_EQ(ok, 500);
}

TEST(Pretty, RandomExprRoundTrip) {
  Gen g(7);
  for (int i = 0; i < 2000; ++i) {
    ExprP e = g.expr(4);
    std::string t = pretty(e);
    ExprP f;
    try {
      f = parse_expr(t);
    } catch (const Error& err) {
      ADD_FAILURE() << err.what() << "\n" << t;
      continue;
    }
    EXPECT_TRUE(expr_equal(e, f)) << t << "\n" << pretty(f);
  }
}
