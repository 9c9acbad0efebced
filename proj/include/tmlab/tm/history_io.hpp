#pragma once

#include "tmlab/core/io.hpp"
#include "tmlab/tm/history.hpp"

namespace tmlab {

/// One record per t-operation: {txn, kind, object, arg, outcome, invSeq, respSeq}.
inline Json historyToJson(const History& h) {
  std::vector<const TOp*> ops;
  for (const auto& t : h.txns()) {
    for (const auto& op : t.ops) ops.push_back(&op);
  }
  std::sort(ops.begin(), ops.end(), [](const TOp* a, const TOp* b) { return a->invSeq < b->invSeq; });
  Json arr = Json::array();
  for (const TOp* op : ops) {
    Json r;
    r["txn"] = op->txn.k;
    r["kind"] = std::string(topKindName(op->call.kind));
    r["object"] = op->call.kind == TOpKind::kTryCommit ? Json(nullptr) : Json(op->call.object.index);
    r["arg"] = toJson(op->call.arg);
    r["outcome"] = toJson(op->outcome);
    r["invSeq"] = op->invSeq;
    r["respSeq"] = op->respSeq ? Json(*op->respSeq) : Json(nullptr);
    r["process"] = op->txn.process.value;
    arr.push_back(r);
  }
  return arr;
}

inline bool looksLikeHistoryJson(const Json& j) {
  return j.is_array() && !j.empty() && j.front().is_object() && j.front().contains("invSeq");
}

inline History historyFromJson(const Json& arr, std::vector<std::pair<TObjectId, Value>> initial = {}) {
  std::vector<HistoryEvent> events;
  std::unordered_map<std::uint64_t, std::uint32_t> nextTop;
  for (const auto& r : arr) {
    HistoryEvent inv;
    inv.txn = TxnId{r.at("txn").get<std::uint64_t>(), ProcessId{r.value("process", 0u)}};
    inv.process = inv.txn.process;
    inv.top = nextTop[inv.txn.k]++;
    inv.seq = r.at("invSeq").get<std::uint64_t>();
    inv.call.kind = parseTOpKind(r.at("kind").get<std::string>());
    if (r.contains("object") && !r["object"].is_null()) inv.call.object = TObjectId{r["object"].get<std::uint32_t>()};
    if (r.contains("arg")) inv.call.arg = valueFromJson(r["arg"]);
    events.push_back(inv);
    if (r.contains("respSeq") && !r["respSeq"].is_null()) {
      HistoryEvent resp = inv;
      resp.invoke = false;
      resp.seq = r["respSeq"].get<std::uint64_t>();
      resp.outcome = outcomeFromJson(r.at("outcome"));
      events.push_back(resp);
    }
  }
  return History::fromEvents(std::move(events), std::move(initial));
}

}  // namespace tmlab
