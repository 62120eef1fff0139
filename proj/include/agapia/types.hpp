#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "agapia/value.hpp"

namespace agapia {

// Interface types. Item level: leaves, tuples ("," inside one module), item stars and item unions.
// List level: ";" lists, "(X;)*" list stars, unions of lists. Nil is the empty list.
enum class TKind : uint8_t { Nil, Int, Bool, Set, Union, Tuple, Star, List, ListStar, Inter, Never };
enum class Axis : uint8_t { Spatial, Temporal };

struct TypeNode;
using Type = std::shared_ptr<const TypeNode>;

struct TypeNode {
  TKind kind;
  std::vector<Type> kids;
  std::vector<std::string> names;  // tuple field names (may be empty)
};

struct InterfaceType {
  Axis axis = Axis::Spatial;
  Type root;
};

Type t_nil();
Type t_int();
Type t_bool();
Type t_set();
Type t_never();
Type t_union(std::vector<Type> arms);  // dedups equal arms, drops Never
Type t_tuple(std::vector<Type> kids, std::vector<std::string> names = {});
Type t_star(Type elem);
Type t_list(std::vector<Type> kids);  // flattens nested lists
Type t_list_star(Type body);
Type t_inter(Type a, Type b);

bool type_equal(const Type& a, const Type& b);
bool is_item_type(const Type& t);

// Canonical text. Leaves are printed with the axis prefix (sn/tn, sb/tb, sset/tset).
std::string to_text(const Type& t, Axis axis, bool with_names = false);
std::string to_text(const InterfaceType& t, bool with_names = false);
InterfaceType parse_type(std::string_view text);  // axis inferred from leaves; mixed axes rejected
Type parse_type_on(std::string_view text, Axis axis);

// Top-level list elements (nil elements kept).
std::vector<Type> list_elements(const Type& t);

Type nil_normalize(const Type& t);

// Insertion plan making two element lists equal by inserting nils. Indices are positions in the
// merged list, ascending, where the side receives a nil. Nils facing each other are paired.
struct InsertionPlan {
  std::vector<size_t> insert_left;
  std::vector<size_t> insert_right;
  std::vector<std::pair<size_t, size_t>> pairs;  // (left index, right index) aligned without insertion
  size_t merged_size = 0;
};

template <class T, class IsNil, class Eq>
std::optional<InsertionPlan> plan_up_to_nil(const std::vector<T>& l, const std::vector<T>& r, IsNil is_nil,
                                            Eq eq) {
  InsertionPlan p;
  size_t i = 0, j = 0, pos = 0;
  while (i < l.size() || j < r.size()) {
    bool ln = i < l.size() && is_nil(l[i]), rn = j < r.size() && is_nil(r[j]);
    if (ln && rn) {
      p.pairs.push_back({i, j});
      ++i, ++j, ++pos;
    } else if (ln) {
      p.insert_right.push_back(pos++);
      ++i;
    } else if (rn) {
      p.insert_left.push_back(pos++);
      ++j;
    } else if (i < l.size() && j < r.size()) {
      if (!eq(l[i], r[j])) return std::nullopt;
      p.pairs.push_back({i, j});
      ++i, ++j, ++pos;
    } else {
      return std::nullopt;
    }
  }
  p.merged_size = pos;
  return p;
}

std::optional<InsertionPlan> equal_up_to_nil(const Type& t, const Type& u);

// Nonempty intersection or nullopt.
std::optional<Type> type_match(const Type& t, const Type& u);

bool value_has_type(const Value& v, const Type& t);
bool items_have_type(const std::vector<Value>& items, const Type& t);
bool item_has_type(const Value& v, const Type& item_type);

Value default_value(const Type& t);

// Item-type sequences of length <= max_len accepted by a list type.
std::vector<std::vector<Type>> expand_paths(const Type& t, size_t max_len);

// Per-line item types for n lines carved from a list type (longest paths, padded with nil).
std::vector<Type> line_types(const Type& list_type, size_t n);

nlohmann::json to_json(const Type& t);
Type type_from_json(const nlohmann::json& j);

}  // namespace agapia
