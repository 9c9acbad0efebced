#pragma once

#include <array>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "tmlab/core/error.hpp"
#include "tmlab/core/value.hpp"

namespace tmlab {

enum class PrimitiveKind : std::uint8_t { kRead, kWrite, kCas, kLl, kSc, kFetchAdd };

inline constexpr std::array<PrimitiveKind, 6> kAllPrimitiveKinds = {
    PrimitiveKind::kRead, PrimitiveKind::kWrite, PrimitiveKind::kCas,
    PrimitiveKind::kLl,   PrimitiveKind::kSc,    PrimitiveKind::kFetchAdd};

inline std::string_view primitiveName(PrimitiveKind k) {
  switch (k) {
    case PrimitiveKind::kRead:
      return "READ";
    case PrimitiveKind::kWrite:
      return "WRITE";
    case PrimitiveKind::kCas:
      return "CAS";
    case PrimitiveKind::kLl:
      return "LL";
    case PrimitiveKind::kSc:
      return "SC";
    case PrimitiveKind::kFetchAdd:
      return "FETCH_ADD";
  }
  return "?";
}

inline PrimitiveKind parsePrimitiveKind(std::string_view s) {
  for (auto k : kAllPrimitiveKinds) {
    if (primitiveName(k) == s) return k;
  }
  throw Error("unknown primitive: " + std::string(s));
}

/// Trivial primitives never change the object they are applied to.
constexpr bool isTrivial(PrimitiveKind k) { return k == PrimitiveKind::kRead || k == PrimitiveKind::kLl; }

/// Conditional primitives may fail to install the value they intend to write.
constexpr bool isConditional(PrimitiveKind k) { return k == PrimitiveKind::kCas || k == PrimitiveKind::kSc; }

/// One application of an RMW primitive <g, h> with its operands.
///
/// Operands by kind: WRITE(v), CAS(expected, desired), SC(v), FETCH_ADD(delta);
/// READ and LL take none.
struct PrimitiveOp {
  PrimitiveKind kind = PrimitiveKind::kRead;
  Value first;
  Value second;

  static PrimitiveOp read() { return {PrimitiveKind::kRead, {}, {}}; }
  static PrimitiveOp write(Value v) { return {PrimitiveKind::kWrite, std::move(v), {}}; }
  static PrimitiveOp cas(Value expected, Value desired) {
    return {PrimitiveKind::kCas, std::move(expected), std::move(desired)};
  }
  static PrimitiveOp ll() { return {PrimitiveKind::kLl, {}, {}}; }
  static PrimitiveOp sc(Value v) { return {PrimitiveKind::kSc, std::move(v), {}}; }
  static PrimitiveOp fetchAdd(std::int64_t delta) {
    return {PrimitiveKind::kFetchAdd, Value::integer(delta), {}};
  }

  std::size_t operandCount() const {
    switch (kind) {
      case PrimitiveKind::kRead:
      case PrimitiveKind::kLl:
        return 0;
      case PrimitiveKind::kCas:
        return 2;
      default:
        return 1;
    }
  }

  friend bool operator==(const PrimitiveOp&, const PrimitiveOp&) = default;
};

/// State-before and operands in, state-after and response out.
/// `linkValid` is the caller's LL reservation on the object (SC only).
struct PrimitiveResult {
  Value after;
  Value response;
  bool changed = false;
};

/// Update function g: the object state after applying `op` to `before`.
inline Value updateFunction(const PrimitiveOp& op, const Value& before, bool linkValid) {
  switch (op.kind) {
    case PrimitiveKind::kRead:
    case PrimitiveKind::kLl:
      return before;
    case PrimitiveKind::kWrite:
      return op.first;
    case PrimitiveKind::kCas:
      return before == op.first ? op.second : before;
    case PrimitiveKind::kSc:
      return linkValid ? op.first : before;
    case PrimitiveKind::kFetchAdd: {
      if (!before.isInt() || !op.first.isInt()) throw Error("FETCH_ADD on a non-integer value");
      return Value::integer(before.asInt() + op.first.asInt());
    }
  }
  return before;
}

/// Response function h.
inline Value responseFunction(const PrimitiveOp& op, const Value& before, bool linkValid) {
  switch (op.kind) {
    case PrimitiveKind::kRead:
    case PrimitiveKind::kLl:
    case PrimitiveKind::kFetchAdd:
      return before;
    case PrimitiveKind::kWrite:
      return Value::boolean(true);
    case PrimitiveKind::kCas:
      return Value::boolean(before == op.first);
    case PrimitiveKind::kSc:
      return Value::boolean(linkValid);
  }
  return Value::bottom();
}

/// The value a successful application would install; used to separate
/// conditional failures from idempotent writes.
inline std::optional<Value> intendedValue(const PrimitiveOp& op, const Value& before) {
  switch (op.kind) {
    case PrimitiveKind::kRead:
    case PrimitiveKind::kLl:
      return std::nullopt;
    case PrimitiveKind::kWrite:
    case PrimitiveKind::kSc:
      return op.first;
    case PrimitiveKind::kCas:
      return op.second;
    case PrimitiveKind::kFetchAdd:
      return updateFunction(op, before, false);
  }
  return std::nullopt;
}

inline PrimitiveResult applyPrimitiveTo(const PrimitiveOp& op, const Value& before, bool linkValid) {
  PrimitiveResult r;
  r.after = updateFunction(op, before, linkValid);
  r.response = responseFunction(op, before, linkValid);
  r.changed = r.after != before;
  return r;
}

}  // namespace tmlab
