#pragma once

#include <cstdint>
#include <vector>

#include "tmlab/core/execution.hpp"
#include "tmlab/tm/history.hpp"

namespace tmlab::check {

enum class InvisibleMode : std::uint8_t { kWeak, kStrong };

struct InvisibleReadViolation {
  TxnId txn;
  std::uint32_t top = 0;  // index of the t-read within its transaction
  std::uint64_t eventSeq = 0;
};

/// Nontrivial events inside t-reads.
/// kStrong: t-reads of every read-only transaction.
/// kWeak: t-reads of transactions with a nonempty read set that are
/// concurrent with no other transaction.
inline std::vector<InvisibleReadViolation> checkInvisibleReads(const Execution& e, InvisibleMode mode) {
  const History h = deriveHistory(e);
  std::vector<InvisibleReadViolation> out;
  for (const auto& t : h.txns()) {
    bool applies = false;
    if (mode == InvisibleMode::kStrong) {
      applies = t.readOnly();
    } else if (!t.rset.empty()) {
      applies = true;
      for (const auto& o : h.txns()) {
        if (o.id != t.id && concurrent(h, t.id, o.id)) {
          applies = false;
          break;
        }
      }
    }
    if (!applies) continue;
    for (const auto& ev : e.events) {
      if (!ev.isNontrivial() || !ev.txn || *ev.txn != t.id || !ev.top) continue;
      if (t.ops.at(*ev.top).call.kind == TOpKind::kRead) out.push_back({t.id, *ev.top, ev.seq});
    }
  }
  return out;
}

}  // namespace tmlab::check
