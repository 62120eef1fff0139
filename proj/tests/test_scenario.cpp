#include <gtest/gtest.h>

#include <random>

#include "agapia/error.hpp"
#include "agapia/scenario.hpp"

using namespace agapia;

namespace {

Value I(int64_t x) { return make_int(x); }

Scenario cell(const std::string& label, Value w, Value n, Value e, Value s) {
  return Scenario::single(Cell{label, w, n, e, s});
}

// Independent layout of the diagonal formula, built only from hcomp/vcomp of constant cells.
Scenario dcomp_by_formula(const Scenario& f1, const Scenario& f2) {
  Value e = f1.east()[0], s = f1.south()[0];
  Scenario R1 = cell(kLabelRecorder, e, nullptr, nullptr, e);
  Scenario L = cell(kLabelEmpty, nullptr, nullptr, nullptr, nullptr);
  Scenario S2 = cell(kLabelSpeaker, nullptr, s, s, nullptr);
  Scenario Id = Scenario::identity({s}, {e});
  Scenario R2 = cell(kLabelRecorder, s, nullptr, nullptr, s);
  Scenario S1 = cell(kLabelSpeaker, nullptr, e, e, nullptr);
  return vcomp(vcomp(hcomp(hcomp(f1, R1), L), hcomp(hcomp(S2, Id), R2)), hcomp(hcomp(L, S1), f2));
}

void expect_adjacent(const Scenario& s) {
  std::string why;
  EXPECT_TRUE(s.adjacency_ok(&why)) << why;
}

}  // namespace

TEST(Hcomp, TwoCells) {
  Scenario a = cell("A", I(1), I(2), I(3), I(4));
  Scenario b = cell("B", I(3), I(5), I(6), I(7));
  Scenario r = hcomp(a, b);
  EXPECT_EQ(r.rows(), 1u);
  EXPECT_EQ(r.cols(), 2u);
  EXPECT_EQ(r.at(0, 1).label, "B");
  expect_adjacent(r);
  EXPECT_THROW(hcomp(b, a), Error);
}

TEST(Hcomp, NilPaddingAddsDummyRowOnRight) {
  Scenario top = cell("A", I(0), I(1), I(9), I(2));
  Scenario bot = cell("B", I(0), I(2), nullptr, I(3));
  Scenario left = vcomp(top, bot);  // east = 9;nil
  Scenario right = cell("C", I(9), I(4), I(5), I(6));
  Scenario r = hcomp(left, right);
  EXPECT_EQ(r.rows(), 2u);
  EXPECT_EQ(r.cols(), 2u);
  EXPECT_FALSE(r.dummy_rows()[1]);  // only the right half of row 1 is padding
  Cell d = r.at(1, 1);
  EXPECT_EQ(d.label, kLabelDummy);
  EXPECT_TRUE(value_equal(d.n, I(6)));
  EXPECT_TRUE(value_equal(d.s, I(6)));
  EXPECT_EQ(r.east()[1], nullptr);
  expect_adjacent(r);
}

TEST(Vcomp, TwoCellsAndPadding) {
  Scenario a = cell("A", I(1), I(2), I(3), I(4));
  Scenario b = cell("B", I(5), I(4), I(6), I(7));
  Scenario r = vcomp(a, b);
  EXPECT_EQ(r.rows(), 2u);
  EXPECT_EQ(r.cols(), 1u);
  expect_adjacent(r);

  Scenario wide = hcomp(cell("A", I(0), I(1), I(0), I(8)), cell("B", I(0), I(1), I(0), nullptr));  // south 8;nil
  Scenario below = cell("C", I(3), I(8), I(4), I(5));
  Scenario v = vcomp(wide, below);
  EXPECT_EQ(v.cols(), 2u);
  EXPECT_EQ(v.at(1, 1).label, kLabelDummy);
  expect_adjacent(v);
}

TEST(Dcomp, UnitCellsGiveThreeByThreePerFormula) {
  Scenario f1 = cell("F", I(0), I(1), I(2), I(0));
  Scenario f2 = cell("G", I(2), I(0), I(1), I(1));
  Scenario d = dcomp(f1, f2);
  EXPECT_EQ(d.rows(), 3u);
  EXPECT_EQ(d.cols(), 3u);
  expect_adjacent(d);
  EXPECT_TRUE(scenario_equal(d, dcomp_by_formula(f1, f2)));
  auto g = d.grid();
  std::vector<std::vector<std::string>> want = {{"F", kLabelRecorder, kLabelEmpty},
                                                {kLabelSpeaker, kLabelId, kLabelRecorder},
                                                {kLabelEmpty, kLabelSpeaker, "G"}};
  EXPECT_EQ(g.letters, want);
}

TEST(Dcomp, MismatchNamesAxis) {
  Scenario f1 = cell("F", I(0), I(1), I(2), I(0));
  try {
    dcomp(f1, cell("G", I(1), I(0), I(1), I(1)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind, ErrorKind::Border);
    EXPECT_NE(std::string(e.what()).find("east/west"), std::string::npos);
  }
  try {
    dcomp(f1, cell("G", I(2), I(2), I(1), I(1)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("south/north"), std::string::npos);
  }
}

TEST(Dcomp, IdentityRoutesBordersThrough) {
  Scenario f = hcomp(cell("A", I(0), I(1), I(2), I(0)), cell("B", I(2), I(2), I(1), I(2)));
  Scenario id = Scenario::identity(f.east(), f.south());
  Scenario d = dcomp(f, id);
  expect_adjacent(d);
  EXPECT_TRUE(items_equal(normalize_items(d.east()), normalize_items(f.east())));
  EXPECT_TRUE(items_equal(normalize_items(d.south()), normalize_items(f.south())));
  EXPECT_TRUE(items_equal(normalize_items(d.west()), normalize_items(f.west())));
  EXPECT_TRUE(items_equal(normalize_items(d.north()), normalize_items(f.north())));
}

TEST(ScenarioLaws, IdentitiesForHcompAndVcomp) {
  Scenario f = vcomp(cell("A", I(0), I(1), I(2), I(0)), cell("B", I(1), I(0), I(1), I(2)));
  Scenario ih = Scenario::identity(f.east(), {});
  EXPECT_TRUE(scenario_equal(hcomp(f, ih), f));
  EXPECT_TRUE(scenario_equal(hcomp(Scenario::identity(f.west(), {}), f), f));
  Scenario iv = Scenario::identity({}, f.south());
  EXPECT_TRUE(scenario_equal(vcomp(f, iv), f));
  EXPECT_TRUE(scenario_equal(vcomp(Scenario::identity({}, f.north()), f), f));
}

TEST(ScenarioLaws, InterchangeOnUnitCells) {
  int checked = 0;
  auto all = [](const char* l) {
    std::vector<Scenario> v;
    for (int w = 0; w < 2; ++w)
      for (int n = 0; n < 2; ++n)
        for (int e = 0; e < 2; ++e)
          for (int s = 0; s < 2; ++s) v.push_back(cell(l, I(w), I(n), I(e), I(s)));
    return v;
  };
  auto A = all("a"), B = all("b"), C = all("c"), D = all("d");
  for (auto& a : A)
    for (auto& b : B) {
      if (!value_equal(a.east()[0], b.west()[0])) continue;
      for (auto& c : C) {
        if (!value_equal(a.south()[0], c.north()[0])) continue;
        for (auto& d : D) {
          if (!value_equal(c.east()[0], d.west()[0]) || !value_equal(b.south()[0], d.north()[0])) continue;
          EXPECT_TRUE(scenario_equal(vcomp(hcomp(a, b), hcomp(c, d)), hcomp(vcomp(a, c), vcomp(b, d))));
          ++checked;
        }
      }
    }
  EXPECT_GT(checked, 100);
}

TEST(ScenarioLaws, AssociativityWithPaddingRandom) {
  std::mt19937_64 rng(5);
  auto rv = [&]() -> Value { return rng() % 3 == 0 ? nullptr : I(static_cast<int64_t>(rng() % 2)); };
  auto rcell = [&](const char* l) { return cell(l, rv(), rv(), rv(), rv()); };
  int ok = 0;
  for (int it = 0; it < 4000; ++it) {
    Scenario a = rcell("a"), b = rcell("b"), c = rcell("c");
    bool t1 = true, t2 = true;
    Scenario x, y;
    try {
      x = hcomp(hcomp(a, b), c);
    } catch (const Error&) {
      t1 = false;
    }
    try {
      y = hcomp(a, hcomp(b, c));
    } catch (const Error&) {
      t2 = false;
    }
    if (t1 && t2) {
      EXPECT_TRUE(scenario_equal(x, y)) << render_ascii(x) << render_ascii(y);
      expect_adjacent(x);
      ++ok;
    }
    try {
      x = vcomp(vcomp(a, b), c);
      y = vcomp(a, vcomp(b, c));
      EXPECT_TRUE(scenario_equal(x, y));
    } catch (const Error&) {
    }
  }
  EXPECT_GT(ok, 100);
}

TEST(ScenarioLaws, DcompBordersOnSmallInstances) {
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) {
        Scenario f1 = hcomp(cell("A", I(a), I(b), I(c), I(a)), cell("B", I(c), I(a), I(b), nullptr));
        Scenario f2 = cell("C", I(b), I(a), I(c), I(b));
        Scenario d = dcomp(f1, f2);
        expect_adjacent(d);
        EXPECT_TRUE(items_equal(normalize_items(d.west()), normalize_items(f1.west())));
        EXPECT_TRUE(items_equal(normalize_items(d.north()), normalize_items(f1.north())));
        EXPECT_TRUE(items_equal(normalize_items(d.east()), normalize_items(f2.east())));
        EXPECT_TRUE(items_equal(normalize_items(d.south()), normalize_items(f2.south())));
      }
}

TEST(ScenarioJson, RoundTrip) {
  Scenario d = dcomp(cell("F", I(0), I(1), I(2), make_set({1, 2})), cell("G", I(2), make_set({1, 2}), I(1), I(1)));
  Scenario back = scenario_from_json(to_json(d));
  EXPECT_TRUE(scenario_equal(d, back));
  EXPECT_EQ(to_json(back).dump(), to_json(d).dump());
  EXPECT_NE(render_ascii(d).find("|Fr.|"), std::string::npos);
  EXPECT_NE(render_svg(d).find("<svg"), std::string::npos);
}

TEST(SpecRelation, HcompExample) {
  SpecRelation s1{1, 1, 1, 1, {}}, s2{1, 1, 1, 1, {}};
  s1.add({{1}, {2}, {3}, {4}});
  s2.add({{3}, {5}, {6}, {7}});
  SpecRelation r = spec_hcomp(s1, s2);
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_EQ(r.rows[0], (SpecRelation::Row{{1}, {2, 5}, {6}, {4, 7}}));
  EXPECT_EQ(r.p, 2u);
  EXPECT_EQ(r.q, 2u);
}

TEST(SpecRelation, IdentityAndEmpty) {
  SpecRelation s1{1, 1, 1, 1, {}};
  s1.add({{1}, {2}, {2}, {0}});
  s1.add({{0}, {1}, {1}, {1}});
  SpecRelation id = SpecRelation::identity(1, 0, 0, 3);
  SpecRelation r = spec_hcomp(s1, id);
  EXPECT_EQ(r.rows, s1.rows);
  SpecRelation empty{1, 1, 1, 1, {}};
  EXPECT_TRUE(spec_hcomp(s1, empty).rows.empty());
  SpecRelation wrong{2, 0, 1, 0, {}};
  EXPECT_THROW(spec_hcomp(s1, wrong), Error);
  EXPECT_THROW(s1.add({{1, 2}, {2}, {2}, {0}}), Error);
}

TEST(SpecRelation, VcompComposesRegisters) {
  SpecRelation s1{1, 1, 1, 1, {}}, s2{1, 1, 1, 1, {}};
  s1.add({{1}, {2}, {3}, {4}});
  s2.add({{5}, {4}, {6}, {7}});
  SpecRelation r = spec_vcomp(s1, s2);
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_EQ(r.rows[0], (SpecRelation::Row{{1, 5}, {2}, {3, 6}, {7}}));
}
