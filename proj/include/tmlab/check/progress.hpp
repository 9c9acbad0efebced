#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "tmlab/check/serialization.hpp"
#include "tmlab/tm/history.hpp"

namespace tmlab::check {

/// Aborted transactions with no concurrent conflicting transaction.
inline std::vector<TxnId> checkProgressiveness(const History& h) {
  std::vector<TxnId> orphans;
  for (const auto& t : h.txns()) {
    if (!t.aborted()) continue;
    const bool witnessed = std::any_of(h.txns().begin(), h.txns().end(), [&](const TxnView& o) {
      return o.id != t.id && concurrent(h, t.id, o.id) && !conflicts(h, t.id, o.id).empty();
    });
    if (!witnessed) orphans.push_back(t.id);
  }
  return orphans;
}

/// A conflict-closed set whose members all aborted although they conflict on
/// at most one t-object.
struct StrongProgressViolation {
  std::vector<TxnId> members;
  std::set<TObjectId> cobj;
};

struct StrongProgressResult {
  bool refused = false;
  std::string reason;
  std::vector<StrongProgressViolation> violations;

  bool holds() const { return !refused && violations.empty(); }
};

inline constexpr std::size_t kDefaultStrongProgressBound = 12;

/// CObj_H(Q): t-objects on which a member of Q conflicts with some
/// transaction of H.
inline std::set<TObjectId> conflictObjects(const History& h, const std::vector<TxnId>& q) {
  std::set<TObjectId> out;
  for (const auto& a : q) {
    for (const auto& b : h.txns()) {
      if (b.id == a) continue;
      for (const auto& x : conflicts(h, a, b.id)) out.insert(x);
    }
  }
  return out;
}

/// Every conflict-closed Q is a union of connected components of the
/// conflict relation, so only unions of components are enumerated.
inline StrongProgressResult checkStrongProgressiveness(const History& h,
                                                       std::size_t bound = kDefaultStrongProgressBound) {
  StrongProgressResult r;
  const auto& txns = h.txns();
  if (txns.size() > bound) {
    r.refused = true;
    r.reason = std::to_string(txns.size()) + " transactions exceed the bound of " + std::to_string(bound);
    return r;
  }
  std::vector<std::size_t> parent(txns.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < txns.size(); ++i) {
    for (std::size_t j = i + 1; j < txns.size(); ++j) {
      if (!conflicts(h, txns[i].id, txns[j].id).empty()) parent[find(i)] = find(j);
    }
  }
  std::vector<std::vector<std::size_t>> components;
  std::vector<std::size_t> componentOf(txns.size(), SIZE_MAX);
  for (std::size_t i = 0; i < txns.size(); ++i) {
    const auto root = find(i);
    if (componentOf[root] == SIZE_MAX) {
      componentOf[root] = components.size();
      components.emplace_back();
    }
    components[componentOf[root]].push_back(i);
  }

  const std::uint64_t subsets = std::uint64_t{1} << components.size();
  for (std::uint64_t mask = 1; mask < subsets; ++mask) {
    std::vector<TxnId> q;
    bool allAborted = true;
    for (std::size_t c = 0; c < components.size() && allAborted; ++c) {
      if (!((mask >> c) & 1u)) continue;
      for (auto i : components[c]) {
        allAborted = allAborted && txns[i].aborted();
        q.push_back(txns[i].id);
      }
    }
    if (!allAborted) continue;
    auto cobj = conflictObjects(h, q);
    if (cobj.size() <= 1) r.violations.push_back({std::move(q), std::move(cobj)});
  }
  return r;
}

}  // namespace tmlab::check
