#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tmlab/tm/history.hpp"

namespace tmlab::check {

enum class Criterion : std::uint8_t { kStrictSerializability, kOpacity };

enum class Completion : std::uint8_t { kCommit, kAbort };

/// A legal t-sequential order plus how each commit-pending tryC was completed.
struct SerializationWitness {
  std::vector<TxnId> order;
  std::map<std::uint64_t, Completion> completions;  // keyed by txn k
};

enum class Verdict : std::uint8_t { kWitness, kNone, kRefused };

struct SerializationResult {
  Verdict verdict = Verdict::kNone;
  std::optional<SerializationWitness> witness;
  std::string reason;

  bool holds() const { return verdict == Verdict::kWitness; }
};

inline constexpr std::size_t kDefaultSerializationBound = 8;

namespace detail {

/// Exhaustive search for a serialization. Completion of H: a commit-pending
/// transaction is completed either way (both searched); any other
/// t-incomplete transaction is aborted. Aborted transactions take part in an
/// opaque serialization as observers only: their reads must be legal, their
/// writes are never visible.
class SerializationSearch {
 public:
  SerializationSearch(const History& h, Criterion criterion) : h_(h), criterion_(criterion) {
    for (const auto& t : h.txns()) {
      for (const auto& x : t.dset) slotOf_.emplace(x.index, 0);
    }
    std::uint32_t next = 0;
    for (auto& [x, slot] : slotOf_) slot = next++;
    initial_.resize(slotOf_.size());
    for (const auto& [x, slot] : slotOf_) initial_[slot] = h.initialValue(TObjectId{x});

    std::vector<const TxnView*> all;
    for (const auto& t : h.txns()) all.push_back(&t);
    // Finding a witness is fastest when earlier-finishing transactions are
    // tried first; the verdict does not depend on this order.
    std::stable_sort(all.begin(), all.end(), [](const TxnView* a, const TxnView* b) { return a->lastSeq < b->lastSeq; });
    txns_ = std::move(all);
  }

  std::optional<SerializationWitness> run() {
    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < txns_.size(); ++i) {
      if (txns_[i]->commitPending()) pending.push_back(i);
    }
    const std::uint64_t choices = std::uint64_t{1} << pending.size();
    for (std::uint64_t c = 0; c < choices; ++c) {
      visible_.assign(txns_.size(), false);
      included_.assign(txns_.size(), false);
      std::map<std::uint64_t, Completion> completion;
      for (std::size_t i = 0; i < txns_.size(); ++i) {
        if (txns_[i]->committed()) visible_[i] = true;
      }
      for (std::size_t bit = 0; bit < pending.size(); ++bit) {
        const bool commit = ((c >> bit) & 1u) != 0;
        visible_[pending[bit]] = commit;
        completion[txns_[pending[bit]]->id.k] = commit ? Completion::kCommit : Completion::kAbort;
      }
      for (std::size_t i = 0; i < txns_.size(); ++i) {
        included_[i] = criterion_ == Criterion::kOpacity || visible_[i];
      }
      computePredecessors();
      failed_.clear();
      order_.clear();
      if (dfs(0, initial_)) {
        SerializationWitness w;
        for (auto i : order_) w.order.push_back(txns_[i]->id);
        w.completions = std::move(completion);
        return w;
      }
    }
    return std::nullopt;
  }

 private:
  using State = std::vector<Value>;

  void computePredecessors() {
    preds_.assign(txns_.size(), 0);
    for (std::size_t i = 0; i < txns_.size(); ++i) {
      if (!included_[i]) continue;
      for (std::size_t j = 0; j < txns_.size(); ++j) {
        if (i != j && included_[j] && realTimePrecedes(h_, txns_[j]->id, txns_[i]->id)) {
          preds_[i] |= std::uint64_t{1} << j;
        }
      }
    }
  }

  /// Replays t's reads against `state`; returns false on an illegal read.
  bool legal(const TxnView& t, const State& state) const {
    std::map<std::uint32_t, Value> own;
    for (const auto& op : t.ops) {
      const auto slot = op.call.kind == TOpKind::kTryCommit ? 0 : slotOf_.at(op.call.object.index);
      if (op.call.kind == TOpKind::kWrite && op.outcome.kind == Outcome::Kind::kOk) {
        own[slot] = op.call.arg;
      } else if (op.call.kind == TOpKind::kRead && op.outcome.isValue()) {
        auto it = own.find(slot);
        const Value& expected = it != own.end() ? it->second : state[slot];
        if (expected != op.outcome.value) return false;
      }
    }
    return true;
  }

  void applyWrites(const TxnView& t, State& state) const {
    for (const auto& op : t.ops) {
      if (op.call.kind == TOpKind::kWrite && op.outcome.kind == Outcome::Kind::kOk) {
        state[slotOf_.at(op.call.object.index)] = op.call.arg;
      }
    }
  }

  bool dfs(std::uint64_t placed, const State& state) {
    bool done = true;
    for (std::size_t i = 0; i < txns_.size(); ++i) {
      if (included_[i] && !(placed & (std::uint64_t{1} << i))) done = false;
    }
    if (done) return true;

    std::vector<std::int64_t> key{static_cast<std::int64_t>(placed)};
    for (const auto& v : state) v.encode(key);
    if (failed_.count(key)) return false;

    for (std::size_t i = 0; i < txns_.size(); ++i) {
      const std::uint64_t bit = std::uint64_t{1} << i;
      if (!included_[i] || (placed & bit) || (preds_[i] & ~placed)) continue;
      if (!legal(*txns_[i], state)) continue;
      order_.push_back(i);
      if (visible_[i]) {
        State next = state;
        applyWrites(*txns_[i], next);
        if (dfs(placed | bit, next)) return true;
      } else if (dfs(placed | bit, state)) {
        return true;
      }
      order_.pop_back();
    }
    failed_.insert(std::move(key));
    return false;
  }

  const History& h_;
  Criterion criterion_;
  std::map<std::uint32_t, std::uint32_t> slotOf_;
  State initial_;
  std::vector<const TxnView*> txns_;
  std::vector<bool> visible_;
  std::vector<bool> included_;
  std::vector<std::uint64_t> preds_;
  std::vector<std::size_t> order_;
  std::set<std::vector<std::int64_t>> failed_;
};

inline SerializationResult search(const History& h, Criterion criterion, std::size_t bound) {
  SerializationResult r;
  if (h.txns().size() > bound || h.txns().size() > 63) {
    r.verdict = Verdict::kRefused;
    r.reason = std::to_string(h.txns().size()) + " transactions exceed the bound of " + std::to_string(bound);
    return r;
  }
  SerializationSearch s(h, criterion);
  r.witness = s.run();
  r.verdict = r.witness ? Verdict::kWitness : Verdict::kNone;
  if (!r.witness) r.reason = "no legal serialization respects real-time order";
  return r;
}

}  // namespace detail

/// Committed transactions (after completing H) admit a legal t-sequential
/// order that respects real-time order.
inline SerializationResult checkStrictSerializability(const History& h,
                                                      std::size_t bound = kDefaultSerializationBound) {
  return detail::search(h, Criterion::kStrictSerializability, bound);
}

/// Every transaction, aborted and incomplete ones included, fits one legal
/// t-sequential order that respects real-time order.
inline SerializationResult checkOpacity(const History& h, std::size_t bound = kDefaultSerializationBound) {
  return detail::search(h, Criterion::kOpacity, bound);
}

}  // namespace tmlab::check
