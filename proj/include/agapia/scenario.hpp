#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "agapia/value.hpp"

namespace agapia {

// Reserved labels for constant cells.
inline const std::string kLabelId = "<Id>";
inline const std::string kLabelRecorder = "<R>";
inline const std::string kLabelSpeaker = "<S>";
inline const std::string kLabelEmpty = "<L>";
inline const std::string kLabelDummy = "<d>";

struct Cell {
  std::string label = kLabelEmpty;
  Value w, n, e, s;
};

struct Placed {
  uint32_t row, col;
  Cell cell;
};

struct Grid {
  size_t rows = 0, cols = 0;
  std::vector<std::vector<std::string>> letters;
};

// Rows are time, columns are processes. Only cells that are not empty (label <L>, all borders nil)
// are stored; everything else reads back as the empty cell.
class Scenario {
 public:
  Scenario() = default;

  static Scenario single(Cell c);
  // Id(m,p): m temporal lines crossing p spatial lines.
  static Scenario identity(const std::vector<Value>& temporal, const std::vector<Value>& spatial);
  // Raw assembly (deserialisation); call adjacency_ok() afterwards to validate.
  static Scenario from_parts(size_t rows, size_t cols, std::vector<Placed> cells, std::vector<Value> west,
                             std::vector<Value> north, std::vector<Value> east, std::vector<Value> south,
                             std::vector<char> dummy_rows, std::vector<char> dummy_cols);

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  const std::vector<Value>& west() const { return west_; }
  const std::vector<Value>& north() const { return north_; }
  const std::vector<Value>& east() const { return east_; }
  const std::vector<Value>& south() const { return south_; }
  const std::vector<char>& dummy_rows() const { return dummy_row_; }
  const std::vector<char>& dummy_cols() const { return dummy_col_; }
  const std::vector<Placed>& cells() const { return cells_; }

  Cell at(size_t r, size_t c) const;
  Grid grid() const;

  // Every internal border agrees with its neighbour and the outer borders agree with edge cells.
  bool adjacency_ok(std::string* why = nullptr) const;
  Scenario transposed() const;
  Scenario normalized() const;  // dummy rows and columns removed

  friend Scenario hcomp(Scenario f1, Scenario f2);
  friend Scenario vcomp(Scenario f1, Scenario f2);
  friend Scenario dcomp(Scenario f1, Scenario f2);

 private:
  void transpose_in_place();
  void put(size_t r, size_t c, Cell cell);
  friend Scenario hcomp_impl(Scenario f1, Scenario f2, const char* seam);
  void insert_dummy_rows(const std::vector<size_t>& merged_positions, size_t merged_size);
  void index_build() const;

  size_t rows_ = 0, cols_ = 0;
  std::vector<Placed> cells_;
  std::vector<Value> west_, north_, east_, south_;
  std::vector<char> dummy_row_, dummy_col_;
  mutable std::shared_ptr<std::unordered_map<uint64_t, size_t>> index_;
};

// Raises BorderMismatch when the seam is not equal up to nil insertion.
Scenario hcomp(Scenario f1, Scenario f2);
Scenario vcomp(Scenario f1, Scenario f2);
Scenario dcomp(Scenario f1, Scenario f2);

// Structural equality after removing dummy rows/columns and nils on the outer borders.
bool scenario_equal(const Scenario& a, const Scenario& b);

std::string render_ascii(const Scenario& s, bool with_borders = true);
std::string render_svg(const Scenario& s);
nlohmann::json to_json(const Scenario& s);
Scenario scenario_from_json(const nlohmann::json& j);

// Finite relational specifications over integer tuples: (voices, registers) -> (voices, registers).
struct SpecRelation {
  size_t m = 0, p = 0, n = 0, q = 0;  // (m,p) -> (n,q)
  struct Row {
    std::vector<int64_t> v, r, v2, r2;
    auto operator<=>(const Row&) const = default;
  };
  std::vector<Row> rows;
  void add(Row row);  // checks arity, keeps rows sorted and unique
  bool operator==(const SpecRelation& o) const;
  static SpecRelation identity(size_t m, size_t p, int64_t lo, int64_t hi);
};

// Voices composed relationally, registers side by side. ArityMismatch (UsageError) when n1 != m2.
SpecRelation spec_hcomp(const SpecRelation& s1, const SpecRelation& s2);
// Dual: registers composed relationally, voices side by side.
SpecRelation spec_vcomp(const SpecRelation& s1, const SpecRelation& s2);

}  // namespace agapia
