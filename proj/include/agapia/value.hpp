#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace agapia {

// Border values. nil is the null pointer; everything else is an immutable shared node.
enum class VKind : uint8_t { Int, Bool, Set, Tuple, Seq, List };

struct ValueNode;
using Value = std::shared_ptr<const ValueNode>;

struct ValueNode {
  VKind kind;
  int64_t num = 0;                 // Int payload, Bool as 0/1
  std::vector<int64_t> set;        // sorted, unique
  std::vector<Value> kids;         // Tuple components, Seq elements, List items
  std::vector<std::string> names;  // Tuple field names, empty when positional
  size_t hash = 0;
};

inline bool is_nil(const Value& v) { return v == nullptr; }

Value make_int(int64_t x);
Value make_bool(bool b);
Value make_set(std::vector<int64_t> elems);
Value make_tuple(std::vector<Value> kids, std::vector<std::string> names = {});
Value make_seq(std::vector<Value> kids);
Value make_list(std::vector<Value> kids);

bool value_equal(const Value& a, const Value& b);  // field names are not compared
int value_compare(const Value& a, const Value& b);
size_t value_hash(const Value& v);

struct ValueHash {
  size_t operator()(const Value& v) const { return value_hash(v); }
};
struct ValueEq {
  bool operator()(const Value& a, const Value& b) const { return value_equal(a, b); }
};

bool items_equal(const std::vector<Value>& a, const std::vector<Value>& b);
size_t items_hash(const std::vector<Value>& a);

// Drop nils and flatten nested lists.
std::vector<Value> normalize_items(const std::vector<Value>& items);
std::vector<Value> value_items(const Value& v);

// Field lookup on a tuple; returns false when the field is absent.
bool tuple_field(const Value& v, std::string_view name, Value* out);

std::string to_text(const Value& v);
std::string items_text(const std::vector<Value>& items);

// Text syntax: nil, 3, -2, true, false, white, black, {1,2}, [a, b] (sequence),
// (a, b) or (x: a, y: b) tuples. A border list separates items by ';'.
Value parse_value(std::string_view text);
std::vector<Value> parse_items(std::string_view text);

nlohmann::json to_json(const Value& v);
Value value_from_json(const nlohmann::json& j);

}  // namespace agapia
