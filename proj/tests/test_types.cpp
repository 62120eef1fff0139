#include <gtest/gtest.h>

#include <functional>
#include <random>
#include <set>

#include "agapia/types.hpp"

using namespace agapia;

namespace {

std::string txt(const Type& t, Axis a = Axis::Spatial) { return to_text(t, a); }
Type sp(const char* s) { return parse_type(s).root; }

}  // namespace

TEST(NilNormalize, Examples) {
  EXPECT_EQ(txt(nil_normalize(sp("sn;nil;sn"))), "sn;sn");
  EXPECT_EQ(nil_normalize(sp("nil"))->kind, TKind::Nil);
  EXPECT_EQ(txt(nil_normalize(sp("sn;sn"))), "sn;sn");
}

TEST(EqualUpToNil, Examples) {
  auto p = equal_up_to_nil(sp("sn;nil;sn"), sp("sn;sn"));
  ASSERT_TRUE(p);
  EXPECT_TRUE(p->insert_left.empty());
  EXPECT_EQ(p->insert_right, std::vector<size_t>{1});

  EXPECT_FALSE(equal_up_to_nil(sp("sn"), sp("sb")));

  auto q = equal_up_to_nil(parse_type("nil;tn").root, parse_type("tn;nil").root);
  ASSERT_TRUE(q);
  EXPECT_EQ(q->merged_size, 3u);
  EXPECT_EQ(q->insert_left, std::vector<size_t>{2});
  EXPECT_EQ(q->insert_right, std::vector<size_t>{0});
}

// Independent oracle: brute-force all ways to insert nils (up to 3) into both sides and keep
// the shortest common result; the plan must produce one of those.
TEST(EqualUpToNil, PlanIsMinimalAgainstBruteForce) {
  std::vector<std::string> atoms = {"nil", "tn", "tb"};
  std::vector<std::vector<std::string>> lists;
  for (int len = 1; len <= 3; ++len) {
    std::vector<int> idx(len, 0);
    while (true) {
      std::vector<std::string> l;
      for (int i : idx) l.push_back(atoms[i]);
      lists.push_back(l);
      int k = 0;
      while (k < len && ++idx[k] == 3) idx[k++] = 0;
      if (k == len) break;
    }
  }
  auto join = [](const std::vector<std::string>& l) {
    std::string s;
    for (size_t i = 0; i < l.size(); ++i) s += (i ? ";" : "") + l[i];
    return s;
  };
  auto strip = [](std::vector<std::string> l) {
    l.erase(std::remove(l.begin(), l.end(), "nil"), l.end());
    return l;
  };
  auto apply = [](std::vector<std::string> l, const std::vector<size_t>& ins) {
    for (size_t pos : ins) l.insert(l.begin() + static_cast<long>(pos), "nil");
    return l;
  };
  for (auto& a : lists)
    for (auto& b : lists) {
      auto plan = equal_up_to_nil(parse_type(join(a)).root, parse_type(join(b)).root);
      ASSERT_EQ(plan.has_value(), strip(a) == strip(b)) << join(a) << " vs " << join(b);
      if (!plan) continue;
      auto ra = apply(a, plan->insert_left), rb = apply(b, plan->insert_right);
      EXPECT_EQ(ra, rb);
      // brute force: insert up to 3 nils anywhere on each side, smallest equal result
      std::function<void(std::vector<std::string>, int, std::set<std::vector<std::string>>&)> grow =
          [&](std::vector<std::string> l, int left, std::set<std::vector<std::string>>& out) {
            out.insert(l);
            if (left == 0) return;
            for (size_t pos = 0; pos <= l.size(); ++pos) {
              auto c = l;
              c.insert(c.begin() + static_cast<long>(pos), "nil");
              grow(c, left - 1, out);
            }
          };
      std::set<std::vector<std::string>> ga, gb;
      grow(a, 3, ga);
      grow(b, 3, gb);
      size_t best = 99;
      for (auto& x : ga)
        if (gb.count(x)) best = std::min(best, x.size());
      EXPECT_EQ(ra.size(), best);
    }
}

TEST(TypeMatch, Examples) {
  auto m = type_match(sp("(sn | sb)"), sp("sn"));
  ASSERT_TRUE(m);
  EXPECT_EQ(txt(*m), "sn");
  EXPECT_FALSE(type_match(sp("sn"), sp("sb")));
  auto s = type_match(sp("(sn;)*"), sp("sn;sn"));
  ASSERT_TRUE(s);
  EXPECT_EQ(txt(*s), "sn;sn");
}

TEST(TypeMatch, StarStarIsPredicate) {
  auto m = type_match(sp("(sn;)*"), sp("((sn | sb);)*"));
  ASSERT_TRUE(m);
  EXPECT_TRUE(value_has_type(make_list({make_int(1), make_int(2)}), *m));
  EXPECT_FALSE(value_has_type(make_list({make_bool(true)}), *m));
  EXPECT_FALSE(type_match(sp("sn;(sn;)*"), sp("(sb;)*")));
}

TEST(ValueHasType, Examples) {
  EXPECT_TRUE(value_has_type(make_int(5), sp("sn")));
  EXPECT_TRUE(value_has_type(make_list({make_bool(true), make_int(3)}), sp("sb;sn")));
  EXPECT_TRUE(value_has_type(nullptr, sp("(sn;)*")));
  EXPECT_FALSE(value_has_type(make_int(5), sp("sb")));
  EXPECT_FALSE(value_has_type(make_list({make_int(3), make_bool(true)}), sp("sb;sn")));
}

TEST(ValueHasType, RecordsAndSets) {
  Type voice = parse_type("(tn, tn, (tset)*, (tb, tn))").root;
  Value v = make_tuple({make_int(3), make_int(0), make_seq({make_set({1}), make_set({})}),
                        make_tuple({make_bool(true), make_int(0)})});
  EXPECT_TRUE(value_has_type(v, voice));
  EXPECT_FALSE(value_has_type(make_tuple({make_int(3)}), voice));
}

TEST(TypeText, RoundTrip) {
  for (const char* s : {"nil", "sn;nil;sn", "(sn | sb)", "(sn;)*", "((sn | sb);)*", "(sn, sb)*", "(sn)",
                        "(sn, (sb, sn))", "(sset)*", "(sn;sb | sn)", "((sn))*", "((sn, sb);sn;)*"}) {
    Type t = sp(s);
    EXPECT_EQ(txt(t), s);
    EXPECT_TRUE(type_equal(sp(txt(t).c_str()), t)) << s;
  }
  EXPECT_EQ(to_text(parse_type("(tn, tb)").root, Axis::Temporal), "(tn, tb)");
  EXPECT_THROW(parse_type("(sn, tn)"), std::exception);
  EXPECT_THROW(parse_type("sn;;"), std::exception);
}

// ---------- properties over random types ----------

namespace {

struct Gen {
  std::mt19937_64 rng;
  int pick(int n) { return static_cast<int>(rng() % static_cast<uint64_t>(n)); }
  Type item(int depth) {
    int k = depth <= 0 ? pick(3) : pick(6);
    switch (k) {
      case 0: return t_int();
      case 1: return t_bool();
      case 2: return t_set();
      case 3: return t_union({item(depth - 1), item(depth - 1)});
      case 4: return t_tuple({item(depth - 1), item(depth - 1)});
      default: return t_star(item(depth - 1));
    }
  }
  Type list(int depth) {
    int k = depth <= 0 ? pick(2) : pick(5);
    switch (k) {
      case 0: return t_nil();
      case 1: return item(depth - 1);
      case 2: return t_list({list(depth - 1), list(depth - 1), list(depth - 1)});
      case 3: return t_union({list(depth - 1), list(depth - 1)});
      default: return t_list_star(item(depth - 1));
    }
  }
  Value value(int depth) {
    int k = depth <= 0 ? pick(4) : pick(7);
    switch (k) {
      case 0: return nullptr;
      case 1: return make_int(pick(3));
      case 2: return make_bool(pick(2));
      case 3: return make_set({pick(3)});
      case 4: return make_tuple({value(depth - 1), value(depth - 1)});
      case 5: return make_seq({value(depth - 1)});
      default: return make_list({value(depth - 1), value(depth - 1)});
    }
  }
};

}  // namespace

TEST(TypeProperties, NilNormalizeIdempotent) {
  Gen g{std::mt19937_64(7)};
  for (int i = 0; i < 500; ++i) {
    Type t = g.list(4);
    Type n = nil_normalize(t);
    EXPECT_TRUE(type_equal(nil_normalize(n), n)) << txt(t);
  }
}

TEST(TypeProperties, PlanPresentIffNormalFormsEqual) {
  Gen g{std::mt19937_64(11)};
  for (int i = 0; i < 400; ++i) {
    Type t = g.list(2), u = g.pick(2) ? g.list(2) : t_list({t, t_nil()});
    bool same = type_equal(nil_normalize(t), nil_normalize(u));
    EXPECT_EQ(equal_up_to_nil(t, u).has_value(), same) << txt(t) << " / " << txt(u);
  }
}

TEST(TypeProperties, MatchCommutesOnMembership) {
  Gen g{std::mt19937_64(13)};
  for (int i = 0; i < 200; ++i) {
    Type t = g.list(3), u = g.list(3);
    auto a = type_match(t, u), b = type_match(u, t);
    ASSERT_EQ(a.has_value(), b.has_value()) << txt(t) << " / " << txt(u);
    if (!a) continue;
    for (int j = 0; j < 40; ++j) {
      Value v = g.value(3);
      bool in_a = value_has_type(v, *a), in_b = value_has_type(v, *b);
      EXPECT_EQ(in_a, in_b);
      EXPECT_EQ(in_a, value_has_type(v, t) && value_has_type(v, u)) << txt(t) << " / " << txt(u) << " " << to_text(v);
    }
  }
}
