#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>

#include "tmlab/core/error.hpp"
#include "tmlab/core/ids.hpp"
#include "tmlab/core/value.hpp"

namespace tmlab {

enum class TOpKind : std::uint8_t { kRead, kWrite, kTryCommit };

inline std::string_view topKindName(TOpKind k) {
  switch (k) {
    case TOpKind::kRead:
      return "read";
    case TOpKind::kWrite:
      return "write";
    case TOpKind::kTryCommit:
      return "tryC";
  }
  return "?";
}

inline TOpKind parseTOpKind(std::string_view s) {
  if (s == "read") return TOpKind::kRead;
  if (s == "write") return TOpKind::kWrite;
  if (s == "tryC") return TOpKind::kTryCommit;
  throw Error("unknown t-operation kind: " + std::string(s));
}

/// Invocation of a t-operation: read(X), write(X, v) or tryC.
struct TOpCall {
  TOpKind kind = TOpKind::kRead;
  TObjectId object;
  Value arg;

  static TOpCall read(TObjectId x) { return {TOpKind::kRead, x, {}}; }
  static TOpCall write(TObjectId x, Value v) { return {TOpKind::kWrite, x, std::move(v)}; }
  static TOpCall tryCommit() { return {TOpKind::kTryCommit, {}, {}}; }

  friend bool operator==(const TOpCall&, const TOpCall&) = default;
};

/// Response of a t-operation: a value, ok, C_k, A_k, or none yet.
struct Outcome {
  enum class Kind : std::uint8_t { kValue, kOk, kCommit, kAbort, kPending };

  Kind kind = Kind::kPending;
  Value value;

  static Outcome of(Value v) { return {Kind::kValue, std::move(v)}; }
  static Outcome ok() { return {Kind::kOk, {}}; }
  static Outcome commit() { return {Kind::kCommit, {}}; }
  static Outcome abort() { return {Kind::kAbort, {}}; }
  static Outcome pending() { return {Kind::kPending, {}}; }

  bool isAbort() const { return kind == Kind::kAbort; }
  bool isCommit() const { return kind == Kind::kCommit; }
  bool isValue() const { return kind == Kind::kValue; }
  bool isPending() const { return kind == Kind::kPending; }

  /// Whether this outcome is in the response domain of `k`.
  bool matches(TOpKind k) const {
    switch (k) {
      case TOpKind::kRead:
        return kind == Kind::kValue || kind == Kind::kAbort;
      case TOpKind::kWrite:
        return kind == Kind::kOk || kind == Kind::kAbort;
      case TOpKind::kTryCommit:
        return kind == Kind::kCommit || kind == Kind::kAbort;
    }
    return false;
  }

  friend bool operator==(const Outcome&, const Outcome&) = default;

  friend std::ostream& operator<<(std::ostream& os, const Outcome& o) {
    switch (o.kind) {
      case Kind::kValue:
        return os << o.value;
      case Kind::kOk:
        return os << "ok";
      case Kind::kCommit:
        return os << 'C';
      case Kind::kAbort:
        return os << 'A';
      case Kind::kPending:
        return os << "pending";
    }
    return os;
  }
};

}  // namespace tmlab
