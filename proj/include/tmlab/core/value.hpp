#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace tmlab {

/// Contents of a base object or t-object.
///
/// The domain is small integers, booleans, the distinguished bottom value, and
/// tuples of values (lock words, process-face pairs, value/version cells).
/// Bottom compares unequal to every other value.
class Value {
 public:
  enum class Kind : std::uint8_t { kBottom, kBool, kInt, kTuple };

  Value() = default;

  static Value bottom() { return Value(); }
  static Value boolean(bool b) {
    Value v;
    v.kind_ = Kind::kBool;
    v.scalar_ = b ? 1 : 0;
    return v;
  }
  static Value integer(std::int64_t i) {
    Value v;
    v.kind_ = Kind::kInt;
    v.scalar_ = i;
    return v;
  }
  static Value tuple(std::vector<Value> items) {
    Value v;
    v.kind_ = Kind::kTuple;
    v.items_ = std::move(items);
    return v;
  }
  static Value tuple(std::initializer_list<Value> items) {
    return tuple(std::vector<Value>(items));
  }

  Kind kind() const { return kind_; }
  bool isBottom() const { return kind_ == Kind::kBottom; }
  bool isBool() const { return kind_ == Kind::kBool; }
  bool isInt() const { return kind_ == Kind::kInt; }
  bool isTuple() const { return kind_ == Kind::kTuple; }

  bool asBool() const { return scalar_ != 0; }
  std::int64_t asInt() const { return scalar_; }
  const std::vector<Value>& items() const { return items_; }
  const Value& at(std::size_t i) const { return items_.at(i); }

  friend bool operator==(const Value& a, const Value& b) {
    if (a.kind_ != b.kind_) return false;
    switch (a.kind_) {
      case Kind::kBottom:
        return true;
      case Kind::kBool:
      case Kind::kInt:
        return a.scalar_ == b.scalar_;
      case Kind::kTuple:
        return a.items_ == b.items_;
    }
    return false;
  }
  friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }

  /// Appends a self-delimiting integer encoding; equal values encode equally.
  void encode(std::vector<std::int64_t>& out) const {
    out.push_back(static_cast<std::int64_t>(kind_));
    switch (kind_) {
      case Kind::kBottom:
        break;
      case Kind::kBool:
      case Kind::kInt:
        out.push_back(scalar_);
        break;
      case Kind::kTuple:
        out.push_back(static_cast<std::int64_t>(items_.size()));
        for (const auto& item : items_) item.encode(out);
        break;
    }
  }

  std::size_t hash() const {
    std::vector<std::int64_t> words;
    encode(words);
    std::size_t h = 1469598103934665603ull;
    for (auto w : words) {
      h ^= std::hash<std::int64_t>{}(w) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }

  std::string toString() const {
    std::ostringstream os;
    os << *this;
    return os.str();
  }

  friend std::ostream& operator<<(std::ostream& os, const Value& v) {
    switch (v.kind_) {
      case Kind::kBottom:
        return os << "⊥";
      case Kind::kBool:
        return os << (v.asBool() ? "true" : "false");
      case Kind::kInt:
        return os << v.scalar_;
      case Kind::kTuple: {
        os << '[';
        for (std::size_t i = 0; i < v.items_.size(); ++i) {
          if (i) os << ',';
          os << v.items_[i];
        }
        return os << ']';
      }
    }
    return os;
  }

 private:
  Kind kind_ = Kind::kBottom;
  std::int64_t scalar_ = 0;
  std::vector<Value> items_;
};

struct ValueHash {
  std::size_t operator()(const Value& v) const { return v.hash(); }
};

}  // namespace tmlab
