#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "tmlab/core/error.hpp"
#include "tmlab/core/execution.hpp"
#include "tmlab/core/ids.hpp"
#include "tmlab/core/top.hpp"

namespace tmlab {

/// Invocation or response of a t-operation, positioned in its execution.
struct HistoryEvent {
  std::uint64_t seq = 0;
  ProcessId process;
  TxnId txn;
  std::uint32_t top = 0;
  bool invoke = true;
  TOpCall call;
  Outcome outcome;  // responses only
};

struct TOp {
  TxnId txn;
  std::uint32_t index = 0;
  TOpCall call;
  std::uint64_t invSeq = 0;
  std::optional<std::uint64_t> respSeq;
  Outcome outcome;  // pending while respSeq is empty
};

enum class TxnStatus : std::uint8_t { kCommitted, kAborted, kTIncomplete };

struct TxnView {
  TxnId id;
  std::vector<TOp> ops;
  std::set<TObjectId> rset;
  std::set<TObjectId> wset;
  std::set<TObjectId> dset;
  std::map<TObjectId, Value> readsReturned;
  TxnStatus status = TxnStatus::kTIncomplete;
  std::uint64_t firstSeq = 0;
  std::uint64_t lastSeq = 0;

  bool readOnly() const { return wset.empty(); }
  bool updating() const { return !wset.empty(); }
  bool tComplete() const { return status != TxnStatus::kTIncomplete; }
  bool committed() const { return status == TxnStatus::kCommitted; }
  bool aborted() const { return status == TxnStatus::kAborted; }
  /// Every invoked t-operation has a response.
  bool complete() const { return ops.empty() || ops.back().respSeq.has_value(); }
  /// tryC invoked without a response yet.
  bool commitPending() const {
    return !ops.empty() && ops.back().call.kind == TOpKind::kTryCommit && !ops.back().respSeq;
  }
};

/// Projection of an execution onto t-operation invocations and responses,
/// with per-transaction views. Construction enforces well-formedness.
class History {
 public:
  History() = default;

  static History fromEvents(std::vector<HistoryEvent> events, std::vector<std::pair<TObjectId, Value>> initial = {}) {
    History h;
    std::stable_sort(events.begin(), events.end(),
                     [](const HistoryEvent& a, const HistoryEvent& b) { return a.seq < b.seq; });
    h.events_ = std::move(events);
    for (auto& [x, v] : initial) h.initial_[x] = v;
    h.build();
    return h;
  }

  const std::vector<HistoryEvent>& events() const { return events_; }
  const std::vector<TxnView>& txns() const { return txns_; }
  bool empty() const { return events_.empty(); }
  bool contains(TxnId t) const { return index_.count(t.k) != 0; }

  const TxnView& txn(TxnId t) const {
    auto it = index_.find(t.k);
    if (it == index_.end()) throw Error("unknown transaction T" + std::to_string(t.k));
    return txns_[it->second];
  }

  /// Initial value of a t-object; integer 0 unless recorded otherwise.
  Value initialValue(TObjectId x) const {
    auto it = initial_.find(x);
    return it == initial_.end() ? Value::integer(0) : it->second;
  }
  const std::map<TObjectId, Value>& initialValues() const { return initial_; }

 private:
  void build() {
    std::unordered_map<std::uint32_t, std::uint64_t> lastTxnOfProcess;
    for (const auto& e : events_) {
      auto it = index_.find(e.txn.k);
      if (it == index_.end()) {
        if (!e.invoke) throw Error("T" + std::to_string(e.txn.k) + " begins with a response");
        auto prev = lastTxnOfProcess.find(e.process.value);
        if (prev != lastTxnOfProcess.end() && !txns_[index_.at(prev->second)].tComplete()) {
          throw Error("process p" + std::to_string(e.process.value) + " starts T" + std::to_string(e.txn.k) +
                      " before its previous transaction is t-complete");
        }
        lastTxnOfProcess[e.process.value] = e.txn.k;
        index_[e.txn.k] = txns_.size();
        TxnView v;
        v.id = e.txn;
        v.firstSeq = e.seq;
        txns_.push_back(std::move(v));
        it = index_.find(e.txn.k);
      }
      TxnView& v = txns_[it->second];
      if (v.id.process != e.process) {
        throw Error("T" + std::to_string(e.txn.k) + " has events from two processes");
      }
      if (v.tComplete()) throw Error("event of T" + std::to_string(e.txn.k) + " after its commit or abort");
      if (e.invoke) {
        if (!v.complete()) throw Error("T" + std::to_string(e.txn.k) + " invokes while a t-operation is open");
        TOp op;
        op.txn = v.id;
        op.index = static_cast<std::uint32_t>(v.ops.size());
        op.call = e.call;
        op.invSeq = e.seq;
        op.outcome = Outcome::pending();
        v.ops.push_back(op);
        if (e.call.kind == TOpKind::kRead) v.rset.insert(e.call.object);
        if (e.call.kind == TOpKind::kWrite) v.wset.insert(e.call.object);
        if (e.call.kind != TOpKind::kTryCommit) v.dset.insert(e.call.object);
      } else {
        if (v.complete()) throw Error("response of T" + std::to_string(e.txn.k) + " without an open t-operation");
        TOp& op = v.ops.back();
        if (!e.outcome.matches(op.call.kind)) {
          throw Error("response of T" + std::to_string(e.txn.k) + " does not match its t-operation kind");
        }
        op.respSeq = e.seq;
        op.outcome = e.outcome;
        if (e.outcome.isValue()) v.readsReturned[op.call.object] = e.outcome.value;
        if (e.outcome.isAbort()) v.status = TxnStatus::kAborted;
        if (e.outcome.isCommit()) v.status = TxnStatus::kCommitted;
      }
      v.lastSeq = e.seq;
    }
  }

  std::vector<HistoryEvent> events_;
  std::vector<TxnView> txns_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
  std::map<TObjectId, Value> initial_;
};

/// Projects an execution to its history; throws on malformed nesting.
inline History deriveHistory(const Execution& e) {
  std::vector<HistoryEvent> hev;
  for (const auto& ev : e.events) {
    if (ev.kind != EventKind::kInvoke && ev.kind != EventKind::kRespond) continue;
    if (!ev.txn || !ev.top) throw Error("t-operation marker without a transaction tag");
    HistoryEvent h;
    h.seq = ev.seq;
    h.process = ev.process;
    h.txn = *ev.txn;
    h.top = *ev.top;
    h.invoke = ev.kind == EventKind::kInvoke;
    h.call = ev.call;
    h.outcome = ev.outcome;
    hev.push_back(h);
  }
  return History::fromEvents(std::move(hev), e.tobjectInitial);
}

/// a ≺RT b: a is t-complete and its last event precedes b's first event.
inline bool realTimePrecedes(const History& h, TxnId a, TxnId b) {
  const auto& ta = h.txn(a);
  const auto& tb = h.txn(b);
  return ta.tComplete() && ta.lastSeq < tb.firstSeq;
}

inline bool concurrent(const History& h, TxnId a, TxnId b) {
  return !realTimePrecedes(h, a, b) && !realTimePrecedes(h, b, a);
}

/// T-objects X in Dset(a) ∩ Dset(b) with X in Wset(a) ∪ Wset(b).
inline std::set<TObjectId> conflicts(const History& h, TxnId a, TxnId b) {
  const auto& ta = h.txn(a);
  const auto& tb = h.txn(b);
  std::set<TObjectId> out;
  for (const auto& x : ta.dset) {
    if (tb.dset.count(x) && (ta.wset.count(x) || tb.wset.count(x))) out.insert(x);
  }
  return out;
}

struct WholeScope {};
struct TxnScope {
  TxnId txn;
};
struct TOpScope {
  TxnId txn;
  std::uint32_t top = 0;
};
using ContentionScope = std::variant<WholeScope, TxnScope, TOpScope>;

namespace detail {

template <typename Pred>
bool contiguous(const Execution& e, Pred belongs) {
  std::optional<std::size_t> first;
  std::size_t last = 0, count = 0;
  for (std::size_t i = 0; i < e.events.size(); ++i) {
    if (!belongs(e.events[i])) continue;
    if (!first) first = i;
    last = i;
    ++count;
  }
  return !first || last - *first + 1 == count;
}

}  // namespace detail

/// Whether the events of the scope are contiguous in `e`.
inline bool stepContentionFree(const Execution& e, const ContentionScope& scope) {
  if (const auto* t = std::get_if<TxnScope>(&scope)) {
    return detail::contiguous(e, [&](const Event& ev) { return ev.txn && *ev.txn == t->txn; });
  }
  if (const auto* op = std::get_if<TOpScope>(&scope)) {
    return detail::contiguous(e, [&](const Event& ev) { return ev.txn && *ev.txn == op->txn && ev.top == op->top; });
  }
  std::set<std::uint64_t> ks;
  for (const auto& ev : e.events) {
    if (ev.txn) ks.insert(ev.txn->k);
  }
  for (auto k : ks) {
    if (!detail::contiguous(e, [&](const Event& ev) { return ev.txn && ev.txn->k == k; })) return false;
  }
  return true;
}

enum class QuiescenceKind : std::uint8_t { kQuiescent, kTQuiescent };

/// Whether the configuration after `e` is quiescent (every transaction
/// complete) or t-quiescent (every transaction t-complete).
inline bool quiescence(const Execution& e, QuiescenceKind kind) {
  const History h = deriveHistory(e);
  for (const auto& t : h.txns()) {
    if (kind == QuiescenceKind::kQuiescent ? !t.complete() : !t.tComplete()) return false;
  }
  return true;
}

}  // namespace tmlab
