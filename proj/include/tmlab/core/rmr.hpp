#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "tmlab/core/error.hpp"
#include "tmlab/core/ids.hpp"

namespace tmlab {

enum class MemoryModel : std::uint8_t { kWriteThrough = 0, kWriteBack = 1, kDsm = 2 };

inline constexpr std::array<MemoryModel, 3> kAllMemoryModels = {
    MemoryModel::kWriteThrough, MemoryModel::kWriteBack, MemoryModel::kDsm};

inline std::string_view modelName(MemoryModel m) {
  switch (m) {
    case MemoryModel::kWriteThrough:
      return "wt";
    case MemoryModel::kWriteBack:
      return "wb";
    case MemoryModel::kDsm:
      return "dsm";
  }
  return "?";
}

inline MemoryModel parseMemoryModel(std::string_view s) {
  for (auto m : kAllMemoryModels) {
    if (modelName(m) == s) return m;
  }
  throw Error("unknown memory model: " + std::string(s));
}

enum class CacheState : std::uint8_t { kAbsent, kShared, kExclusive, kInvalidated };

/// Whether an access happened inside a t-operation (TM) or outside (non-TM).
enum class Attribution : std::uint8_t { kTm, kNonTm };

enum class RmrFilter : std::uint8_t { kAll, kNonTmOnly, kTmOnly };

/// Remote-memory-reference accounting for one memory model.
///
/// Caches are unbounded and start empty, so a process's first access to an
/// object is always remote under both cache-coherent models.
class RmrLedger {
 public:
  explicit RmrLedger(MemoryModel model) : model_(model) {}

  MemoryModel model() const { return model_; }

  void setOwner(BaseObjectId b, ProcessId owner) {
    if (owners_.size() <= b.index) owners_.resize(b.index + 1);
    owners_[b.index] = owner;
  }

  std::optional<ProcessId> owner(BaseObjectId b) const {
    return b.index < owners_.size() ? owners_[b.index] : std::nullopt;
  }

  /// Records one access and returns true iff it is remote.
  bool access(ProcessId p, BaseObjectId b, bool isWrite, Attribution attribution) {
    bool remote = false;
    switch (model_) {
      case MemoryModel::kDsm: {
        auto o = owner(b);
        if (!o) throw Error("DSM access to an object without an owner");
        remote = *o != p;
        break;
      }
      case MemoryModel::kWriteThrough:
        remote = isWrite ? writeThroughWrite(p, b) : writeThroughRead(p, b);
        break;
      case MemoryModel::kWriteBack:
        remote = isWrite ? writeBackWrite(p, b) : writeBackRead(p, b);
        break;
    }
    if (remote) {
      auto& c = countsFor(p);
      (attribution == Attribution::kTm ? c.tm : c.nonTm) += 1;
    }
    return remote;
  }

  CacheState cacheState(ProcessId p, BaseObjectId b) const {
    if (b.index >= caches_.size() || p.value >= caches_[b.index].size()) return CacheState::kAbsent;
    return caches_[b.index][p.value];
  }

  std::size_t exclusiveHolders(BaseObjectId b) const {
    if (b.index >= caches_.size()) return 0;
    std::size_t n = 0;
    for (auto s : caches_[b.index]) n += s == CacheState::kExclusive ? 1 : 0;
    return n;
  }

  std::uint64_t count(ProcessId p, RmrFilter filter = RmrFilter::kAll) const {
    if (p.value >= counts_.size()) return 0;
    const auto& c = counts_[p.value];
    switch (filter) {
      case RmrFilter::kAll:
        return c.tm + c.nonTm;
      case RmrFilter::kNonTmOnly:
        return c.nonTm;
      case RmrFilter::kTmOnly:
        return c.tm;
    }
    return 0;
  }

  std::size_t processCount() const { return counts_.size(); }

 private:
  struct Counts {
    std::uint64_t tm = 0;
    std::uint64_t nonTm = 0;
  };

  Counts& countsFor(ProcessId p) {
    if (counts_.size() <= p.value) counts_.resize(p.value + 1);
    return counts_[p.value];
  }

  CacheState& slot(ProcessId p, BaseObjectId b) {
    if (caches_.size() <= b.index) caches_.resize(b.index + 1);
    auto& row = caches_[b.index];
    if (row.size() <= p.value) row.resize(p.value + 1, CacheState::kAbsent);
    return row[p.value];
  }

  void invalidateAll(BaseObjectId b, bool exclusiveOnly, std::optional<ProcessId> except) {
    if (b.index >= caches_.size()) return;
    auto& row = caches_[b.index];
    for (std::size_t q = 0; q < row.size(); ++q) {
      if (except && except->value == q) continue;
      auto& s = row[q];
      if (s == CacheState::kAbsent || s == CacheState::kInvalidated) continue;
      if (exclusiveOnly && s != CacheState::kExclusive) continue;
      s = CacheState::kInvalidated;
    }
  }

  // Write-through: a read hits iff the copy was not invalidated since the
  // reader's previous read; every write goes to memory and invalidates every
  // cached copy, the writer's included.
  bool writeThroughRead(ProcessId p, BaseObjectId b) {
    auto& s = slot(p, b);
    if (s == CacheState::kShared) return false;
    s = CacheState::kShared;
    return true;
  }
  bool writeThroughWrite(ProcessId p, BaseObjectId b) {
    slot(p, b);
    invalidateAll(b, false, std::nullopt);
    return true;
  }

  bool writeBackRead(ProcessId p, BaseObjectId b) {
    auto& s = slot(p, b);
    if (s == CacheState::kShared || s == CacheState::kExclusive) return false;
    invalidateAll(b, true, p);
    slot(p, b) = CacheState::kShared;
    return true;
  }
  bool writeBackWrite(ProcessId p, BaseObjectId b) {
    auto& s = slot(p, b);
    if (s == CacheState::kExclusive) return false;
    invalidateAll(b, false, p);
    slot(p, b) = CacheState::kExclusive;
    return true;
  }

  MemoryModel model_;
  std::vector<std::optional<ProcessId>> owners_;
  std::vector<std::vector<CacheState>> caches_;
  std::vector<Counts> counts_;
};

}  // namespace tmlab
