#include "agapia/value.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "agapia/error.hpp"

namespace agapia {

namespace {

size_t mix(size_t h, size_t x) {
  h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

std::shared_ptr<ValueNode> node(VKind k) {
  auto n = std::make_shared<ValueNode>();
  n->kind = k;
  return n;
}

void seal(ValueNode& n) {
  size_t h = static_cast<size_t>(n.kind) * 1315423911u;
  h = mix(h, std::hash<int64_t>()(n.num));
  for (auto x : n.set) h = mix(h, std::hash<int64_t>()(x));
  for (auto& k : n.kids) h = mix(h, value_hash(k));
  n.hash = h;
}

std::vector<Value> small_ints() {
  std::vector<Value> out;
  for (int64_t i = -16; i <= 256; ++i) {
    auto n = node(VKind::Int);
    n->num = i;
    seal(*n);
    out.push_back(n);
  }
  return out;
}

}  // namespace

Value make_int(int64_t x) {
  static const std::vector<Value> cache = small_ints();
  if (x >= -16 && x <= 256) return cache[static_cast<size_t>(x + 16)];
  auto n = node(VKind::Int);
  n->num = x;
  seal(*n);
  return n;
}

Value make_bool(bool b) {
  static const Value t = [] {
    auto n = node(VKind::Bool);
    n->num = 1;
    seal(*n);
    return Value(n);
  }();
  static const Value f = [] {
    auto n = node(VKind::Bool);
    seal(*n);
    return Value(n);
  }();
  return b ? t : f;
}

Value make_set(std::vector<int64_t> elems) {
  std::sort(elems.begin(), elems.end());
  elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
  auto n = node(VKind::Set);
  n->set = std::move(elems);
  seal(*n);
  return n;
}

Value make_tuple(std::vector<Value> kids, std::vector<std::string> names) {
  auto n = node(VKind::Tuple);
  n->kids = std::move(kids);
  n->names = std::move(names);
  seal(*n);
  return n;
}

Value make_seq(std::vector<Value> kids) {
  auto n = node(VKind::Seq);
  n->kids = std::move(kids);
  seal(*n);
  return n;
}

Value make_list(std::vector<Value> kids) {
  auto n = node(VKind::List);
  n->kids = std::move(kids);
  seal(*n);
  return n;
}

size_t value_hash(const Value& v) { return v ? v->hash : 0x51ed27; }

bool value_equal(const Value& a, const Value& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind || a->hash != b->hash || a->num != b->num) return false;
  if (a->set != b->set || a->kids.size() != b->kids.size()) return false;
  for (size_t i = 0; i < a->kids.size(); ++i)
    if (!value_equal(a->kids[i], b->kids[i])) return false;
  return true;
}

int value_compare(const Value& a, const Value& b) {
  if (a == b) return 0;
  if (!a) return -1;
  if (!b) return 1;
  if (a->kind != b->kind) return a->kind < b->kind ? -1 : 1;
  if (a->num != b->num) return a->num < b->num ? -1 : 1;
  if (a->set != b->set) return a->set < b->set ? -1 : 1;
  size_t n = std::min(a->kids.size(), b->kids.size());
  for (size_t i = 0; i < n; ++i) {
    int c = value_compare(a->kids[i], b->kids[i]);
    if (c) return c;
  }
  if (a->kids.size() != b->kids.size()) return a->kids.size() < b->kids.size() ? -1 : 1;
  return 0;
}

bool items_equal(const std::vector<Value>& a, const std::vector<Value>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!value_equal(a[i], b[i])) return false;
  return true;
}

size_t items_hash(const std::vector<Value>& a) {
  size_t h = a.size();
  for (auto& v : a) h = mix(h, value_hash(v));
  return h;
}

static void flatten_into(const Value& v, std::vector<Value>& out) {
  if (!v) return;
  if (v->kind == VKind::List) {
    for (auto& k : v->kids) flatten_into(k, out);
    return;
  }
  out.push_back(v);
}

std::vector<Value> normalize_items(const std::vector<Value>& items) {
  std::vector<Value> out;
  for (auto& v : items) flatten_into(v, out);
  return out;
}

std::vector<Value> value_items(const Value& v) {
  std::vector<Value> out;
  flatten_into(v, out);
  return out;
}

bool tuple_field(const Value& v, std::string_view name, Value* out) {
  if (!v || v->kind != VKind::Tuple) return false;
  for (size_t i = 0; i < v->names.size() && i < v->kids.size(); ++i) {
    if (v->names[i] == name) {
      *out = v->kids[i];
      return true;
    }
  }
  return false;
}

std::string to_text(const Value& v) {
  if (!v) return "nil";
  std::ostringstream os;
  switch (v->kind) {
    case VKind::Int: os << v->num; break;
    case VKind::Bool: os << (v->num ? "true" : "false"); break;
    case VKind::Set: {
      os << '{';
      for (size_t i = 0; i < v->set.size(); ++i) os << (i ? "," : "") << v->set[i];
      os << '}';
      break;
    }
    case VKind::Tuple: {
      os << '(';
      for (size_t i = 0; i < v->kids.size(); ++i) {
        if (i) os << ", ";
        if (i < v->names.size() && !v->names[i].empty()) os << v->names[i] << ": ";
        os << to_text(v->kids[i]);
      }
      os << ')';
      break;
    }
    case VKind::Seq: {
      os << '[';
      for (size_t i = 0; i < v->kids.size(); ++i) os << (i ? ", " : "") << to_text(v->kids[i]);
      os << ']';
      break;
    }
    case VKind::List: {
      os << '<';
      for (size_t i = 0; i < v->kids.size(); ++i) os << (i ? "; " : "") << to_text(v->kids[i]);
      os << '>';
      break;
    }
  }
  return os.str();
}

std::string items_text(const std::vector<Value>& items) {
  if (items.empty()) return "nil";
  std::string s;
  for (size_t i = 0; i < items.size(); ++i) {
    if (i) s += "; ";
    s += to_text(items[i]);
  }
  return s;
}

namespace {

struct ValueReader {
  std::string_view s;
  size_t p = 0;

  [[noreturn]] void bad(const std::string& why) {
    fail(ErrorKind::Parse, "bad value at offset " + std::to_string(p) + ": " + why);
  }
  void ws() {
    while (p < s.size() && std::isspace(static_cast<unsigned char>(s[p]))) ++p;
  }
  bool eat(char c) {
    ws();
    if (p < s.size() && s[p] == c) {
      ++p;
      return true;
    }
    return false;
  }
  std::string word() {
    ws();
    size_t b = p;
    while (p < s.size() && (std::isalnum(static_cast<unsigned char>(s[p])) || s[p] == '_')) ++p;
    return std::string(s.substr(b, p - b));
  }
  int64_t integer() {
    ws();
    size_t b = p;
    if (p < s.size() && s[p] == '-') ++p;
    while (p < s.size() && std::isdigit(static_cast<unsigned char>(s[p]))) ++p;
    if (b == p || (s[b] == '-' && p == b + 1)) bad("expected integer");
    try {
      return std::stoll(std::string(s.substr(b, p - b)));
    } catch (...) {
      bad("integer out of range");
    }
  }

  Value item() {
    ws();
    if (p >= s.size()) bad("unexpected end");
    char c = s[p];
    if (c == '(') {
      ++p;
      std::vector<Value> kids;
      std::vector<std::string> names;
      bool any_name = false;
      if (eat(')')) return make_tuple({}, {});
      do {
        ws();
        size_t save = p;
        std::string nm = word();
        if (!nm.empty() && eat(':')) {
          any_name = true;
        } else {
          p = save;
          nm.clear();
        }
        names.push_back(nm);
        kids.push_back(item());
      } while (eat(','));
      if (!eat(')')) bad("expected ')'");
      if (!any_name) names.clear();
      return make_tuple(std::move(kids), std::move(names));
    }
    if (c == '{') {
      ++p;
      std::vector<int64_t> el;
      if (!eat('}')) {
        do el.push_back(integer());
        while (eat(','));
        if (!eat('}')) bad("expected '}'");
      }
      return make_set(std::move(el));
    }
    if (c == '[') {
      ++p;
      std::vector<Value> kids;
      if (!eat(']')) {
        do kids.push_back(item());
        while (eat(','));
        if (!eat(']')) bad("expected ']'");
      }
      return make_seq(std::move(kids));
    }
    if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) return make_int(integer());
    std::string w = word();
    if (w == "nil") return nullptr;
    if (w == "true" || w == "black") return make_bool(true);
    if (w == "false" || w == "white") return make_bool(false);
    if (w == "null") return make_set({});
    bad("unexpected token '" + w + "'");
  }
};

}  // namespace

Value parse_value(std::string_view text) {
  ValueReader r{text};
  Value v = r.item();
  r.ws();
  if (r.p != text.size()) r.bad("trailing input");
  return v;
}

std::vector<Value> parse_items(std::string_view text) {
  ValueReader r{text};
  std::vector<Value> out;
  r.ws();
  if (r.p == text.size()) return out;
  do out.push_back(r.item());
  while (r.eat(';'));
  r.ws();
  if (r.p != text.size()) r.bad("trailing input");
  return normalize_items(out);
}

nlohmann::json to_json(const Value& v) {
  using nlohmann::json;
  if (!v) return nullptr;
  switch (v->kind) {
    case VKind::Int: return json{{"int", v->num}};
    case VKind::Bool: return json{{"bool", v->num != 0}};
    case VKind::Set: return json{{"set", v->set}};
    case VKind::Tuple: {
      json kids = json::array();
      for (auto& k : v->kids) kids.push_back(to_json(k));
      json j{{"tuple", kids}};
      if (!v->names.empty()) j["names"] = v->names;
      return j;
    }
    case VKind::Seq: {
      json kids = json::array();
      for (auto& k : v->kids) kids.push_back(to_json(k));
      return json{{"seq", kids}};
    }
    case VKind::List: {
      json kids = json::array();
      for (auto& k : v->kids) kids.push_back(to_json(k));
      return json{{"list", kids}};
    }
  }
  return nullptr;
}

Value value_from_json(const nlohmann::json& j) {
  if (j.is_null()) return nullptr;
  if (j.contains("int")) return make_int(j["int"].get<int64_t>());
  if (j.contains("bool")) return make_bool(j["bool"].get<bool>());
  if (j.contains("set")) return make_set(j["set"].get<std::vector<int64_t>>());
  auto kids_of = [](const nlohmann::json& a) {
    std::vector<Value> out;
    for (auto& k : a) out.push_back(value_from_json(k));
    return out;
  };
  if (j.contains("tuple")) {
    std::vector<std::string> names;
    if (j.contains("names")) names = j["names"].get<std::vector<std::string>>();
    return make_tuple(kids_of(j["tuple"]), names);
  }
  if (j.contains("seq")) return make_seq(kids_of(j["seq"]));
  if (j.contains("list")) return make_list(kids_of(j["list"]));
  fail(ErrorKind::Parse, "bad value json");
}

}  // namespace agapia
