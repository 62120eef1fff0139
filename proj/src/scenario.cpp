#include "agapia/scenario.hpp"

#include <algorithm>
#include <sstream>

#include "agapia/error.hpp"
#include "agapia/types.hpp"

namespace agapia {

namespace {

uint64_t key(size_t r, size_t c) { return (static_cast<uint64_t>(r) << 32) | static_cast<uint64_t>(c); }

bool empty_cell(const Cell& c) { return c.label == kLabelEmpty && !c.w && !c.n && !c.e && !c.s; }

bool cell_equal(const Cell& a, const Cell& b) {
  return a.label == b.label && value_equal(a.w, b.w) && value_equal(a.n, b.n) && value_equal(a.e, b.e) &&
         value_equal(a.s, b.s);
}

std::optional<InsertionPlan> seam_plan(const std::vector<Value>& a, const std::vector<Value>& b) {
  return plan_up_to_nil(
      a, b, [](const Value& v) { return v == nullptr; }, [](const Value& x, const Value& y) { return value_equal(x, y); });
}

[[noreturn]] void mismatch(const char* seam, const std::vector<Value>& a, const std::vector<Value>& b) {
  fail(ErrorKind::Border, std::string(seam) + " mismatch: [" + items_text(a) + "] vs [" + items_text(b) + "]");
}

}  // namespace

void Scenario::put(size_t r, size_t c, Cell cell) {
  if (empty_cell(cell)) return;
  cells_.push_back(Placed{static_cast<uint32_t>(r), static_cast<uint32_t>(c), std::move(cell)});
  index_.reset();
}

Scenario Scenario::single(Cell c) {
  Scenario s;
  s.rows_ = s.cols_ = 1;
  s.west_ = {c.w};
  s.north_ = {c.n};
  s.east_ = {c.e};
  s.south_ = {c.s};
  s.dummy_row_ = {0};
  s.dummy_col_ = {0};
  s.put(0, 0, std::move(c));
  return s;
}

Scenario Scenario::from_parts(size_t rows, size_t cols, std::vector<Placed> cells, std::vector<Value> west,
                              std::vector<Value> north, std::vector<Value> east, std::vector<Value> south,
                              std::vector<char> dummy_rows, std::vector<char> dummy_cols) {
  Scenario s;
  s.rows_ = rows;
  s.cols_ = cols;
  if (west.size() != rows || east.size() != rows || north.size() != cols || south.size() != cols ||
      dummy_rows.size() != rows || dummy_cols.size() != cols)
    fail(ErrorKind::Border, "scenario border sizes do not fit the grid");
  for (auto& p : cells) {
    if (p.row >= rows || p.col >= cols) fail(ErrorKind::Border, "cell outside the grid");
    s.put(p.row, p.col, std::move(p.cell));
  }
  s.west_ = std::move(west);
  s.north_ = std::move(north);
  s.east_ = std::move(east);
  s.south_ = std::move(south);
  s.dummy_row_ = std::move(dummy_rows);
  s.dummy_col_ = std::move(dummy_cols);
  return s;
}

Scenario Scenario::identity(const std::vector<Value>& temporal, const std::vector<Value>& spatial) {
  Scenario s;
  s.rows_ = temporal.size();
  s.cols_ = spatial.size();
  s.west_ = s.east_ = temporal;
  s.north_ = s.south_ = spatial;
  s.dummy_row_.assign(s.rows_, 0);
  s.dummy_col_.assign(s.cols_, 0);
  for (size_t r = 0; r < s.rows_; ++r)
    for (size_t c = 0; c < s.cols_; ++c)
      if (temporal[r] || spatial[c]) s.put(r, c, Cell{kLabelId, temporal[r], spatial[c], temporal[r], spatial[c]});
  return s;
}

void Scenario::index_build() const {
  if (index_) return;
  auto m = std::make_shared<std::unordered_map<uint64_t, size_t>>();
  m->reserve(cells_.size() * 2);
  for (size_t i = 0; i < cells_.size(); ++i) (*m)[key(cells_[i].row, cells_[i].col)] = i;
  index_ = m;
}

Cell Scenario::at(size_t r, size_t c) const {
  index_build();
  auto it = index_->find(key(r, c));
  if (it == index_->end()) return Cell{};
  return cells_[it->second].cell;
}

Grid Scenario::grid() const {
  Grid g;
  g.rows = rows_;
  g.cols = cols_;
  g.letters.assign(rows_, std::vector<std::string>(cols_, kLabelEmpty));
  for (auto& p : cells_) g.letters[p.row][p.col] = p.cell.label;
  return g;
}

bool Scenario::adjacency_ok(std::string* why) const {
  index_build();
  auto bad = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  auto get = [&](size_t r, size_t c) { return at(r, c); };
  for (auto& p : cells_) {
    size_t r = p.row, c = p.col;
    const Cell& x = p.cell;
    Value left = c == 0 ? west_[r] : get(r, c - 1).e;
    Value right = c + 1 == cols_ ? east_[r] : get(r, c + 1).w;
    Value up = r == 0 ? north_[c] : get(r - 1, c).s;
    Value down = r + 1 == rows_ ? south_[c] : get(r + 1, c).n;
    std::string at_ = " at (" + std::to_string(r) + "," + std::to_string(c) + ")";
    if (!value_equal(left, x.w)) return bad("west" + at_);
    if (!value_equal(right, x.e)) return bad("east" + at_);
    if (!value_equal(up, x.n)) return bad("north" + at_);
    if (!value_equal(down, x.s)) return bad("south" + at_);
  }
  if (west_.size() != rows_ || east_.size() != rows_ || north_.size() != cols_ || south_.size() != cols_)
    return bad("outer border sizes");
  for (size_t r = 0; r < rows_; ++r) {
    if (cols_ == 0) {
      if (!value_equal(west_[r], east_[r])) return bad("zero-width row " + std::to_string(r));
      continue;
    }
    if (!value_equal(west_[r], get(r, 0).w)) return bad("outer west row " + std::to_string(r));
    if (!value_equal(east_[r], get(r, cols_ - 1).e)) return bad("outer east row " + std::to_string(r));
  }
  for (size_t c = 0; c < cols_; ++c) {
    if (rows_ == 0) {
      if (!value_equal(north_[c], south_[c])) return bad("zero-height column " + std::to_string(c));
      continue;
    }
    if (!value_equal(north_[c], get(0, c).n)) return bad("outer north col " + std::to_string(c));
    if (!value_equal(south_[c], get(rows_ - 1, c).s)) return bad("outer south col " + std::to_string(c));
  }
  return true;
}

void Scenario::transpose_in_place() {
  std::swap(rows_, cols_);
  std::swap(west_, north_);
  std::swap(east_, south_);
  std::swap(dummy_row_, dummy_col_);
  for (auto& p : cells_) {
    std::swap(p.row, p.col);
    std::swap(p.cell.w, p.cell.n);
    std::swap(p.cell.e, p.cell.s);
  }
  index_.reset();
}

Scenario Scenario::transposed() const {
  Scenario s = *this;
  s.transpose_in_place();
  return s;
}

void Scenario::insert_dummy_rows(const std::vector<size_t>& ins, size_t merged) {
  if (ins.empty()) return;
  index_build();
  std::vector<size_t> old_to_new;
  std::vector<long> above(merged, -1);  // last old row placed before each new position
  size_t k = 0, old = 0;
  long last = -1;
  for (size_t pos = 0; pos < merged; ++pos) {
    if (k < ins.size() && ins[k] == pos) {
      above[pos] = last;
      ++k;
    } else {
      old_to_new.push_back(pos);
      last = static_cast<long>(old++);
    }
  }
  std::vector<Placed> added;
  for (size_t q : ins) {
    for (size_t c = 0; c < cols_; ++c) {
      Value v = above[q] < 0 ? north_[c] : at(static_cast<size_t>(above[q]), c).s;
      added.push_back(Placed{static_cast<uint32_t>(q), static_cast<uint32_t>(c), Cell{kLabelDummy, nullptr, v, nullptr, v}});
    }
  }
  for (auto& p : cells_) p.row = static_cast<uint32_t>(old_to_new[p.row]);
  cells_.insert(cells_.end(), added.begin(), added.end());
  std::vector<Value> w(merged), e(merged);
  std::vector<char> d(merged, 1);
  for (size_t r = 0; r < rows_; ++r) {
    w[old_to_new[r]] = west_[r];
    e[old_to_new[r]] = east_[r];
    d[old_to_new[r]] = dummy_row_[r];
  }
  west_ = std::move(w);
  east_ = std::move(e);
  dummy_row_ = std::move(d);
  rows_ = merged;
  index_.reset();
}

Scenario hcomp_impl(Scenario f1, Scenario f2, const char* seam) {
  auto plan = seam_plan(f1.east_, f2.west_);
  if (!plan) mismatch(seam, f1.east_, f2.west_);
  f1.insert_dummy_rows(plan->insert_left, plan->merged_size);
  f2.insert_dummy_rows(plan->insert_right, plan->merged_size);
  size_t off = f1.cols_;
  f1.cells_.reserve(f1.cells_.size() + f2.cells_.size());
  for (auto& p : f2.cells_) f1.cells_.push_back(Placed{p.row, static_cast<uint32_t>(p.col + off), std::move(p.cell)});
  f1.cols_ += f2.cols_;
  f1.rows_ = plan->merged_size;
  f1.north_.insert(f1.north_.end(), f2.north_.begin(), f2.north_.end());
  f1.south_.insert(f1.south_.end(), f2.south_.begin(), f2.south_.end());
  f1.dummy_col_.insert(f1.dummy_col_.end(), f2.dummy_col_.begin(), f2.dummy_col_.end());
  f1.east_ = std::move(f2.east_);
  // a row stays a dummy row only if it is dummy on both sides of the seam
  for (size_t r = 0; r < f1.rows_; ++r) f1.dummy_row_[r] = f1.dummy_row_[r] && f2.dummy_row_[r];
  f1.index_.reset();
  return f1;
}

Scenario hcomp(Scenario f1, Scenario f2) { return hcomp_impl(std::move(f1), std::move(f2), "east/west"); }

Scenario vcomp(Scenario f1, Scenario f2) {
  f1.transpose_in_place();
  f2.transpose_in_place();
  Scenario r = hcomp_impl(std::move(f1), std::move(f2), "south/north");
  r.transpose_in_place();
  return r;
}

// (f1 ## R1 ## L) # (S2 ## Id ## R2) # (L ## S1 ## f2), with each constant block sized to the
// number of aligned lines on its seam. Recorders turn a temporal line south, speakers turn a
// spatial line east; every other routing cell is a crossing.
Scenario dcomp(Scenario f1, Scenario f2) {
  auto pe = seam_plan(f1.east_, f2.west_);
  if (!pe) mismatch("diagonal east/west", f1.east_, f2.west_);
  auto ps = seam_plan(f1.south_, f2.north_);
  if (!ps) mismatch("diagonal south/north", f1.south_, f2.north_);
  const size_t R1 = f1.rows_, C1 = f1.cols_, R2 = f2.rows_, C2 = f2.cols_;
  const size_t A = pe->pairs.size(), B = ps->pairs.size();

  struct Route {
    Value h, v;
    char kind = 0;
  };
  std::unordered_map<uint64_t, Route> m;
  auto hset = [&](size_t r, size_t c, const Value& x) { m[key(r, c)].h = x; };
  auto vset = [&](size_t r, size_t c, const Value& x) { m[key(r, c)].v = x; };
  auto turn = [&](size_t r, size_t c, const Value& x, char k) {
    auto& t = m[key(r, c)];
    t.kind = k;
    t.h = t.v = x;
  };
  for (size_t q = 0; q < A; ++q) {
    auto [i, j] = pe->pairs[q];
    const Value& val = f1.east_[i];
    if (!val) continue;
    for (size_t c = C1; c < C1 + q; ++c) hset(i, c, val);
    turn(i, C1 + q, val, 'R');
    for (size_t r = i + 1; r < R1 + B + j; ++r) vset(r, C1 + q, val);
    turn(R1 + B + j, C1 + q, val, 'S');
    for (size_t c = C1 + q + 1; c < C1 + A; ++c) hset(R1 + B + j, c, val);
  }
  for (size_t p = 0; p < B; ++p) {
    auto [c0, d] = ps->pairs[p];
    const Value& val = f1.south_[c0];
    if (!val) continue;
    for (size_t r = R1; r < R1 + p; ++r) vset(r, c0, val);
    turn(R1 + p, c0, val, 'S');
    for (size_t c = c0 + 1; c < C1 + A + d; ++c) hset(R1 + p, c, val);
    turn(R1 + p, C1 + A + d, val, 'R');
    for (size_t r = R1 + p + 1; r < R1 + B; ++r) vset(r, C1 + A + d, val);
  }

  Scenario out = std::move(f1);
  std::vector<std::pair<uint64_t, Route>> routed(m.begin(), m.end());
  std::sort(routed.begin(), routed.end(), [](auto& a, auto& b) { return a.first < b.first; });
  for (auto& [k, rt] : routed) {
    size_t r = k >> 32, c = k & 0xffffffffu;
    if (rt.kind == 'R')
      out.put(r, c, Cell{kLabelRecorder, rt.h, nullptr, nullptr, rt.h});
    else if (rt.kind == 'S')
      out.put(r, c, Cell{kLabelSpeaker, nullptr, rt.v, rt.v, nullptr});
    else
      out.put(r, c, Cell{kLabelId, rt.h, rt.v, rt.h, rt.v});
  }
  for (auto& p : f2.cells_)
    out.cells_.push_back(
        Placed{static_cast<uint32_t>(p.row + R1 + B), static_cast<uint32_t>(p.col + C1 + A), std::move(p.cell)});
  out.rows_ = R1 + B + R2;
  out.cols_ = C1 + A + C2;
  out.west_.resize(R1 + B + R2);
  out.north_.resize(C1 + A + C2);
  std::vector<Value> east(R1 + B, nullptr), south(C1 + A, nullptr);
  east.insert(east.end(), f2.east_.begin(), f2.east_.end());
  south.insert(south.end(), f2.south_.begin(), f2.south_.end());
  out.east_ = std::move(east);
  out.south_ = std::move(south);
  out.dummy_row_.resize(R1 + B, 0);
  out.dummy_row_.insert(out.dummy_row_.end(), f2.dummy_row_.begin(), f2.dummy_row_.end());
  out.dummy_col_.resize(C1 + A, 0);
  out.dummy_col_.insert(out.dummy_col_.end(), f2.dummy_col_.begin(), f2.dummy_col_.end());
  out.index_.reset();
  return out;
}

Scenario Scenario::normalized() const {
  Scenario s;
  std::vector<long> rmap(rows_, -1), cmap(cols_, -1);
  for (size_t r = 0; r < rows_; ++r)
    if (!dummy_row_[r]) {
      rmap[r] = static_cast<long>(s.rows_++);
      s.west_.push_back(west_[r]);
      s.east_.push_back(east_[r]);
      s.dummy_row_.push_back(0);
    }
  for (size_t c = 0; c < cols_; ++c)
    if (!dummy_col_[c]) {
      cmap[c] = static_cast<long>(s.cols_++);
      s.north_.push_back(north_[c]);
      s.south_.push_back(south_[c]);
      s.dummy_col_.push_back(0);
    }
  for (auto& p : cells_)
    if (rmap[p.row] >= 0 && cmap[p.col] >= 0)
      s.put(static_cast<size_t>(rmap[p.row]), static_cast<size_t>(cmap[p.col]), p.cell);
  return s;
}

bool scenario_equal(const Scenario& a0, const Scenario& b0) {
  Scenario a = a0.normalized(), b = b0.normalized();
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  if (a.cells().size() != b.cells().size()) return false;
  for (auto& p : a.cells())
    if (!cell_equal(p.cell, b.at(p.row, p.col))) return false;
  return items_equal(normalize_items(a.west()), normalize_items(b.west())) &&
         items_equal(normalize_items(a.north()), normalize_items(b.north())) &&
         items_equal(normalize_items(a.east()), normalize_items(b.east())) &&
         items_equal(normalize_items(a.south()), normalize_items(b.south()));
}

// ---------- rendering ----------

namespace {

char glyph(const std::string& label) {
  if (label == kLabelId) return '+';
  if (label == kLabelRecorder) return 'r';
  if (label == kLabelSpeaker) return 's';
  if (label == kLabelDummy) return ':';
  if (label == kLabelEmpty || label.empty()) return '.';
  return label[0];
}

std::vector<const Placed*> sorted_cells(const Scenario& s) {
  std::vector<const Placed*> v;
  for (auto& p : s.cells()) v.push_back(&p);
  std::sort(v.begin(), v.end(), [](auto* a, auto* b) { return std::tie(a->row, a->col) < std::tie(b->row, b->col); });
  return v;
}

std::string xml_escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '<') o += "&lt;";
    else if (c == '>') o += "&gt;";
    else if (c == '&') o += "&amp;";
    else if (c == '"') o += "&quot;";
    else o += c;
  }
  return o;
}

}  // namespace

std::string render_ascii(const Scenario& s, bool with_borders) {
  std::ostringstream os;
  os << "scenario " << s.rows() << "x" << s.cols() << "\n";
  std::vector<std::string> rows(s.rows(), std::string(s.cols(), '.'));
  for (auto& p : s.cells()) rows[p.row][p.col] = glyph(p.cell.label);
  for (size_t r = 0; r < s.rows(); ++r) {
    os << "|" << rows[r] << "|";
    if (with_borders && (s.west()[r] || s.east()[r]))
      os << "  w=" << to_text(s.west()[r]) << "  e=" << to_text(s.east()[r]);
    os << "\n";
  }
  if (with_borders) {
    for (size_t c = 0; c < s.cols(); ++c)
      if (s.north()[c]) os << "north[" << c << "] = " << to_text(s.north()[c]) << "\n";
    for (size_t c = 0; c < s.cols(); ++c)
      if (s.south()[c]) os << "south[" << c << "] = " << to_text(s.south()[c]) << "\n";
  }
  return os.str();
}

std::string render_svg(const Scenario& s) {
  const int u = 36;
  std::ostringstream os;
  size_t W = s.cols() * u + 2 * u, H = s.rows() * u + 2 * u;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"monospace\" font-size=\"10\">\n";
  os << "<rect x=\"" << u << "\" y=\"" << u << "\" width=\"" << s.cols() * u << "\" height=\"" << s.rows() * u
     << "\" fill=\"#f7f7f7\" stroke=\"#999\"/>\n";
  for (auto* p : sorted_cells(s)) {
    const Cell& c = p->cell;
    int x = u + static_cast<int>(p->col) * u, y = u + static_cast<int>(p->row) * u;
    bool constant = c.label.size() > 1 && c.label[0] == '<';
    os << "<g><title>" << xml_escape(c.label) << " w=" << xml_escape(to_text(c.w)) << " n=" << xml_escape(to_text(c.n))
       << " e=" << xml_escape(to_text(c.e)) << " s=" << xml_escape(to_text(c.s)) << "</title>";
    os << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << u << "\" height=\"" << u << "\" fill=\""
       << (constant ? "#e8eef7" : "#ffe9b3") << "\" stroke=\"#555\"/>";
    os << "<text x=\"" << x + u / 2 << "\" y=\"" << y + u / 2 + 4 << "\" text-anchor=\"middle\">" << xml_escape(c.label)
       << "</text></g>\n";
  }
  for (size_t r = 0; r < s.rows(); ++r) {
    if (s.west()[r])
      os << "<text x=\"2\" y=\"" << u + static_cast<int>(r) * u + u / 2 << "\">" << xml_escape(to_text(s.west()[r]))
         << "</text>\n";
  }
  for (size_t c = 0; c < s.cols(); ++c) {
    if (s.north()[c])
      os << "<text x=\"" << u + static_cast<int>(c) * u << "\" y=\"" << u - 4 << "\">" << xml_escape(to_text(s.north()[c]))
         << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

nlohmann::json to_json(const Scenario& s) {
  using nlohmann::json;
  json j{{"version", 1}, {"rows", s.rows()}, {"cols", s.cols()}};
  json cells = json::array();
  for (auto* p : sorted_cells(s)) {
    const Cell& c = p->cell;
    cells.push_back(json{{"row", p->row}, {"col", p->col}, {"label", c.label}, {"w", to_json(c.w)}, {"n", to_json(c.n)},
                         {"e", to_json(c.e)}, {"s", to_json(c.s)}});
  }
  j["cells"] = cells;
  auto border = [](const std::vector<Value>& b) {
    json a = json::array();
    for (auto& v : b) a.push_back(to_json(v));
    return a;
  };
  j["west"] = border(s.west());
  j["north"] = border(s.north());
  j["east"] = border(s.east());
  j["south"] = border(s.south());
  std::vector<size_t> dr, dc;
  for (size_t i = 0; i < s.rows(); ++i)
    if (s.dummy_rows()[i]) dr.push_back(i);
  for (size_t i = 0; i < s.cols(); ++i)
    if (s.dummy_cols()[i]) dc.push_back(i);
  j["dummy_rows"] = dr;
  j["dummy_cols"] = dc;
  return j;
}

Scenario scenario_from_json(const nlohmann::json& j) {
  size_t rows = j.at("rows"), cols = j.at("cols");
  auto border = [](const nlohmann::json& a) {
    std::vector<Value> b;
    for (auto& v : a) b.push_back(value_from_json(v));
    return b;
  };
  std::vector<Placed> cells;
  for (auto& c : j.at("cells"))
    cells.push_back(Placed{c.at("row").get<uint32_t>(), c.at("col").get<uint32_t>(),
                           Cell{c.at("label").get<std::string>(), value_from_json(c.at("w")), value_from_json(c.at("n")),
                                value_from_json(c.at("e")), value_from_json(c.at("s"))}});
  std::vector<char> dr(rows, 0), dc(cols, 0);
  for (size_t i : j.at("dummy_rows").get<std::vector<size_t>>()) dr.at(i) = 1;
  for (size_t i : j.at("dummy_cols").get<std::vector<size_t>>()) dc.at(i) = 1;
  Scenario s = Scenario::from_parts(rows, cols, std::move(cells), border(j.at("west")), border(j.at("north")),
                                    border(j.at("east")), border(j.at("south")), std::move(dr), std::move(dc));
  std::string why;
  if (!s.adjacency_ok(&why)) fail(ErrorKind::Border, "scenario json violates adjacency: " + why);
  return s;
}

// ---------- relations ----------

void SpecRelation::add(Row row) {
  if (row.v.size() != m || row.r.size() != p || row.v2.size() != n || row.r2.size() != q)
    fail(ErrorKind::Usage, "ArityMismatch: tuple does not fit (" + std::to_string(m) + "," + std::to_string(p) + ")->(" +
                               std::to_string(n) + "," + std::to_string(q) + ")");
  auto it = std::lower_bound(rows.begin(), rows.end(), row);
  if (it != rows.end() && *it == row) return;
  rows.insert(it, std::move(row));
}

bool SpecRelation::operator==(const SpecRelation& o) const {
  return m == o.m && p == o.p && n == o.n && q == o.q && rows == o.rows;
}

SpecRelation SpecRelation::identity(size_t m, size_t p, int64_t lo, int64_t hi) {
  SpecRelation s{m, p, m, p, {}};
  size_t k = m + p;
  std::vector<int64_t> cur(k, lo);
  while (true) {
    Row r;
    r.v.assign(cur.begin(), cur.begin() + static_cast<long>(m));
    r.r.assign(cur.begin() + static_cast<long>(m), cur.end());
    r.v2 = r.v;
    r.r2 = r.r;
    s.add(r);
    size_t i = 0;
    while (i < k && ++cur[i] == hi) cur[i++] = lo;
    if (i == k) break;
  }
  return s;
}

SpecRelation spec_hcomp(const SpecRelation& s1, const SpecRelation& s2) {
  if (s1.n != s2.m)
    fail(ErrorKind::Usage, "ArityMismatch: voice arity " + std::to_string(s1.n) + " vs " + std::to_string(s2.m));
  SpecRelation out{s1.m, s1.p + s2.p, s2.n, s1.q + s2.q, {}};
  for (auto& a : s1.rows)
    for (auto& b : s2.rows) {
      if (a.v2 != b.v) continue;
      SpecRelation::Row r;
      r.v = a.v;
      r.r = a.r;
      r.r.insert(r.r.end(), b.r.begin(), b.r.end());
      r.v2 = b.v2;
      r.r2 = a.r2;
      r.r2.insert(r.r2.end(), b.r2.begin(), b.r2.end());
      out.add(std::move(r));
    }
  return out;
}

SpecRelation spec_vcomp(const SpecRelation& s1, const SpecRelation& s2) {
  if (s1.q != s2.p)
    fail(ErrorKind::Usage, "ArityMismatch: register arity " + std::to_string(s1.q) + " vs " + std::to_string(s2.p));
  SpecRelation out{s1.m + s2.m, s1.p, s1.n + s2.n, s2.q, {}};
  for (auto& a : s1.rows)
    for (auto& b : s2.rows) {
      if (a.r2 != b.r) continue;
      SpecRelation::Row r;
      r.v = a.v;
      r.v.insert(r.v.end(), b.v.begin(), b.v.end());
      r.r = a.r;
      r.v2 = a.v2;
      r.v2.insert(r.v2.end(), b.v2.begin(), b.v2.end());
      r.r2 = b.r2;
      out.add(std::move(r));
    }
  return out;
}

}  // namespace agapia
