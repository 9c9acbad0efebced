#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>

namespace tmlab {

struct ProcessId {
  std::uint32_t value = 0;

  friend auto operator<=>(const ProcessId&, const ProcessId&) = default;
  friend std::ostream& operator<<(std::ostream& os, ProcessId p) { return os << 'p' << p.value; }
};

/// Index of a shared base object (a memory cell).
struct BaseObjectId {
  std::uint32_t index = 0;

  friend auto operator<=>(const BaseObjectId&, const BaseObjectId&) = default;
  friend std::ostream& operator<<(std::ostream& os, BaseObjectId b) { return os << 'b' << b.index; }
};

/// Abstract data item accessed by transactions. Never aliases a base object.
struct TObjectId {
  std::uint32_t index = 0;

  friend auto operator<=>(const TObjectId&, const TObjectId&) = default;
  friend std::ostream& operator<<(std::ostream& os, TObjectId x) { return os << 'X' << x.index; }
};

struct TxnId {
  std::uint64_t k = 0;
  ProcessId process;

  friend bool operator==(const TxnId& a, const TxnId& b) { return a.k == b.k; }
  friend std::strong_ordering operator<=>(const TxnId& a, const TxnId& b) { return a.k <=> b.k; }
  friend std::ostream& operator<<(std::ostream& os, const TxnId& t) { return os << 'T' << t.k; }
};

}  // namespace tmlab

template <>
struct std::hash<tmlab::ProcessId> {
  std::size_t operator()(tmlab::ProcessId p) const noexcept { return std::hash<std::uint32_t>{}(p.value); }
};
template <>
struct std::hash<tmlab::BaseObjectId> {
  std::size_t operator()(tmlab::BaseObjectId b) const noexcept { return std::hash<std::uint32_t>{}(b.index); }
};
template <>
struct std::hash<tmlab::TObjectId> {
  std::size_t operator()(tmlab::TObjectId x) const noexcept { return std::hash<std::uint32_t>{}(x.index); }
};
template <>
struct std::hash<tmlab::TxnId> {
  std::size_t operator()(const tmlab::TxnId& t) const noexcept { return std::hash<std::uint64_t>{}(t.k); }
};
