#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "tmlab/core/execution.hpp"
#include "tmlab/tm/history.hpp"

namespace tmlab::check {

/// A history cut at a sequence number: everything with seq < cutoff.
class HistoryPrefix {
 public:
  HistoryPrefix(const History& h, std::uint64_t cutoff = std::numeric_limits<std::uint64_t>::max())
      : h_(h), cutoff_(cutoff) {}

  bool participates(const TxnView& t) const { return t.firstSeq < cutoff_; }

  bool tComplete(const TxnView& t) const {
    if (!t.tComplete()) return false;
    return t.ops.back().respSeq && *t.ops.back().respSeq < cutoff_;
  }

  std::uint64_t lastSeq(const TxnView& t) const {
    std::uint64_t last = t.firstSeq;
    for (const auto& op : t.ops) {
      if (op.invSeq < cutoff_) last = std::max(last, op.invSeq);
      if (op.respSeq && *op.respSeq < cutoff_) last = std::max(last, *op.respSeq);
    }
    return last;
  }

  std::set<TObjectId> dset(const TxnView& t) const {
    std::set<TObjectId> out;
    for (const auto& op : t.ops) {
      if (op.invSeq < cutoff_ && op.call.kind != TOpKind::kTryCommit) out.insert(op.call.object);
    }
    return out;
  }

  bool precedes(const TxnView& a, const TxnView& b) const { return tComplete(a) && lastSeq(a) < b.firstSeq; }
  bool concurrent(const TxnView& a, const TxnView& b) const { return !precedes(a, b) && !precedes(b, a); }

  const History& history() const { return h_; }

 private:
  const History& h_;
  std::uint64_t cutoff_;
};

/// G(Ti, Tj, E): t-objects of every transaction in τ(Ti, Tj), joined when
/// some transaction of τ accesses both.
struct ConflictGraph {
  std::set<TObjectId> vertices;
  std::set<std::pair<TObjectId, TObjectId>> edges;  // stored with first < second

  bool connected(const std::set<TObjectId>& a, const std::set<TObjectId>& b) const {
    std::set<TObjectId> reached;
    std::vector<TObjectId> frontier;
    for (const auto& x : a) {
      if (vertices.count(x) && reached.insert(x).second) frontier.push_back(x);
    }
    while (!frontier.empty()) {
      const auto x = frontier.back();
      frontier.pop_back();
      if (b.count(x)) return true;
      for (const auto& [u, v] : edges) {
        if (u == x && reached.insert(v).second) frontier.push_back(v);
        if (v == x && reached.insert(u).second) frontier.push_back(u);
      }
    }
    return false;
  }

  bool operator==(const ConflictGraph& o) const { return vertices == o.vertices && edges == o.edges; }
};

/// τ(Ti, Tj): Ti, Tj and every transaction concurrent with either.
inline std::vector<const TxnView*> tau(const HistoryPrefix& p, TxnId i, TxnId j) {
  const auto& ti = p.history().txn(i);
  const auto& tj = p.history().txn(j);
  std::vector<const TxnView*> out;
  for (const auto& t : p.history().txns()) {
    if (!p.participates(t)) continue;
    if (t.id == i || t.id == j || p.concurrent(t, ti) || p.concurrent(t, tj)) out.push_back(&t);
  }
  return out;
}

inline ConflictGraph conflictGraph(const HistoryPrefix& p, TxnId i, TxnId j) {
  ConflictGraph g;
  for (const TxnView* t : tau(p, i, j)) {
    const auto d = p.dset(*t);
    for (auto x = d.begin(); x != d.end(); ++x) {
      g.vertices.insert(*x);
      for (auto y = std::next(x); y != d.end(); ++y) g.edges.emplace(*x, *y);
    }
  }
  return g;
}

inline ConflictGraph conflictGraph(const History& h, TxnId i, TxnId j) { return conflictGraph(HistoryPrefix(h), i, j); }

/// No path joins Dset(Ti) and Dset(Tj) in G(Ti, Tj, E).
inline bool disjointAccess(const HistoryPrefix& p, TxnId i, TxnId j) {
  const auto g = conflictGraph(p, i, j);
  return !g.connected(p.dset(p.history().txn(i)), p.dset(p.history().txn(j)));
}

struct DapViolation {
  TxnId first;
  TxnId second;
  BaseObjectId object;
  std::size_t prefixLength = 0;  // events of E before the contention
};

namespace detail {

struct Poised {
  TxnId txn;
  BaseObjectId object;
  bool nontrivial = false;
};

}  // namespace detail

/// Pairs of transactions that concurrently contend on a base object after
/// some prefix of `e` while being disjoint-access with no common t-object.
inline std::vector<DapViolation> checkWeakDap(const Execution& e) {
  const History h = deriveHistory(e);
  std::vector<DapViolation> out;
  if (h.txns().size() < 2) return out;

  // For each transaction, the positions of its rmw events in e.
  std::map<std::uint64_t, std::vector<std::size_t>> steps;
  for (std::size_t i = 0; i < e.events.size(); ++i) {
    if (e.events[i].txn) steps[e.events[i].txn->k].push_back(i);
  }
  std::map<std::uint64_t, detail::Poised> last;
  for (const auto& ps : e.finalPoised) {
    if (ps.txn) last[ps.txn->k] = {*ps.txn, ps.object, !isTrivial(ps.kind)};
  }

  std::set<std::pair<std::uint64_t, std::uint64_t>> reported;
  for (std::size_t t = 0; t <= e.events.size(); ++t) {
    const std::uint64_t cutoff = t < e.events.size() ? e.events[t].seq : std::numeric_limits<std::uint64_t>::max();
    const HistoryPrefix prefix(h, cutoff);
    std::vector<detail::Poised> poised;
    for (const auto& view : h.txns()) {
      if (!prefix.participates(view) || prefix.tComplete(view)) continue;
      const auto& mine = steps[view.id.k];
      auto it = std::lower_bound(mine.begin(), mine.end(), t);
      if (it != mine.end()) {
        const Event& next = e.events[*it];
        if (next.isRmw()) poised.push_back({view.id, next.object, next.isNontrivial()});
      } else if (auto f = last.find(view.id.k); f != last.end()) {
        poised.push_back(f->second);
      }
    }
    for (std::size_t a = 0; a < poised.size(); ++a) {
      for (std::size_t b = a + 1; b < poised.size(); ++b) {
        const auto& pa = poised[a];
        const auto& pb = poised[b];
        if (pa.object != pb.object || !(pa.nontrivial || pb.nontrivial)) continue;
        const auto da = prefix.dset(h.txn(pa.txn));
        const auto db = prefix.dset(h.txn(pb.txn));
        const bool shared = std::any_of(da.begin(), da.end(), [&](const TObjectId& x) { return db.count(x) != 0; });
        if (shared || !disjointAccess(prefix, pa.txn, pb.txn)) continue;
        const auto key = std::minmax(pa.txn.k, pb.txn.k);
        if (reported.insert(key).second) out.push_back({pa.txn, pb.txn, pa.object, t});
      }
    }
  }
  return out;
}

}  // namespace tmlab::check
