#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>

#include "tmlab/check/serialization.hpp"

namespace tmlab::check {

/// Replays a witness t-sequentially and reports the first problem found.
/// Kept separate from the search so that a bug in one is not shared by the
/// other.
inline std::optional<std::string> validateWitness(const History& h, const SerializationWitness& w,
                                                  Criterion criterion) {
  auto finalStatus = [&](const TxnView& t) -> TxnStatus {
    if (t.commitPending()) {
      auto it = w.completions.find(t.id.k);
      if (it == w.completions.end()) return TxnStatus::kTIncomplete;
      return it->second == Completion::kCommit ? TxnStatus::kCommitted : TxnStatus::kAborted;
    }
    return t.committed() ? TxnStatus::kCommitted : TxnStatus::kAborted;
  };

  std::set<std::uint64_t> expected;
  for (const auto& t : h.txns()) {
    const auto s = finalStatus(t);
    if (s == TxnStatus::kTIncomplete) return "no completion chosen for commit-pending T" + std::to_string(t.id.k);
    if (criterion == Criterion::kOpacity || s == TxnStatus::kCommitted) expected.insert(t.id.k);
  }
  std::set<std::uint64_t> seen;
  for (const auto& id : w.order) {
    if (!h.contains(id)) return "unknown T" + std::to_string(id.k);
    if (!seen.insert(id.k).second) return "T" + std::to_string(id.k) + " appears twice";
  }
  if (seen != expected) return "witness covers the wrong set of transactions";

  for (std::size_t i = 0; i < w.order.size(); ++i) {
    for (std::size_t j = i + 1; j < w.order.size(); ++j) {
      if (realTimePrecedes(h, w.order[j], w.order[i])) {
        return "T" + std::to_string(w.order[j].k) + " precedes T" + std::to_string(w.order[i].k) + " in real time";
      }
    }
  }

  std::map<TObjectId, Value> store;
  auto current = [&](TObjectId x) {
    auto it = store.find(x);
    return it != store.end() ? it->second : h.initialValue(x);
  };
  for (const auto& id : w.order) {
    const auto& t = h.txn(id);
    std::map<TObjectId, Value> local;
    for (const auto& op : t.ops) {
      if (op.call.kind == TOpKind::kWrite && op.outcome.kind == Outcome::Kind::kOk) local[op.call.object] = op.call.arg;
      if (op.call.kind != TOpKind::kRead || !op.outcome.isValue()) continue;
      auto own = local.find(op.call.object);
      const Value latest = own != local.end() ? own->second : current(op.call.object);
      if (latest != op.outcome.value) {
        return "T" + std::to_string(id.k) + " reads " + op.outcome.value.toString() + " from X" +
               std::to_string(op.call.object.index) + " where the latest written value is " + latest.toString();
      }
    }
    if (finalStatus(t) == TxnStatus::kCommitted) {
      for (auto& [x, v] : local) store[x] = v;
    }
  }
  return std::nullopt;
}

}  // namespace tmlab::check
