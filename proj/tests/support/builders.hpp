#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tmlab/core/memory.hpp"
#include "tmlab/tm/history.hpp"

namespace tmlab::fixtures {

/// Builds histories event by event. Transaction k runs on process k unless
/// told otherwise; every event gets the next sequence number.
class HistoryBuilder {
 public:
  HistoryBuilder& init(std::uint32_t x, std::int64_t v) {
    initial_.emplace_back(TObjectId{x}, Value::integer(v));
    return *this;
  }
  HistoryBuilder& on(std::uint64_t k, std::uint32_t process) {
    process_[k] = process;
    return *this;
  }

  HistoryBuilder& invoke(std::uint64_t k, TOpCall call) {
    HistoryEvent e;
    e.seq = seq_++;
    e.txn = id(k);
    e.process = e.txn.process;
    e.top = nextTop_[k]++;
    e.call = std::move(call);
    open_[k] = e;
    events_.push_back(e);
    return *this;
  }
  HistoryBuilder& respond(std::uint64_t k, Outcome o) {
    HistoryEvent e = open_.at(k);
    e.seq = seq_++;
    e.invoke = false;
    e.outcome = std::move(o);
    events_.push_back(e);
    open_.erase(k);
    return *this;
  }

  HistoryBuilder& read(std::uint64_t k, std::uint32_t x, std::int64_t v) {
    return invoke(k, TOpCall::read(TObjectId{x})).respond(k, Outcome::of(Value::integer(v)));
  }
  HistoryBuilder& readAbort(std::uint64_t k, std::uint32_t x) {
    return invoke(k, TOpCall::read(TObjectId{x})).respond(k, Outcome::abort());
  }
  HistoryBuilder& write(std::uint64_t k, std::uint32_t x, std::int64_t v) {
    return invoke(k, TOpCall::write(TObjectId{x}, Value::integer(v))).respond(k, Outcome::ok());
  }
  HistoryBuilder& commit(std::uint64_t k) { return invoke(k, TOpCall::tryCommit()).respond(k, Outcome::commit()); }
  HistoryBuilder& abort(std::uint64_t k) { return invoke(k, TOpCall::tryCommit()).respond(k, Outcome::abort()); }
  /// tryC invoked, never answered.
  HistoryBuilder& commitPending(std::uint64_t k) { return invoke(k, TOpCall::tryCommit()); }

  History build() const { return History::fromEvents(events_, initial_); }

 private:
  TxnId id(std::uint64_t k) const {
    auto it = process_.find(k);
    return TxnId{k, ProcessId{it == process_.end() ? static_cast<std::uint32_t>(k) : it->second}};
  }

  std::uint64_t seq_ = 0;
  std::vector<HistoryEvent> events_;
  std::vector<std::pair<TObjectId, Value>> initial_;
  std::map<std::uint64_t, std::uint32_t> process_;
  std::map<std::uint64_t, std::uint32_t> nextTop_;
  std::map<std::uint64_t, HistoryEvent> open_;
};

/// Hand-built executions: t-operation markers plus primitives applied to a
/// real memory, so responses and RMR verdicts stay genuine.
class ExecutionBuilder {
 public:
  explicit ExecutionBuilder(std::uint32_t objects, ProcessId owner = ProcessId{0}) {
    for (std::uint32_t i = 0; i < objects; ++i) mem_.allocate(Value::integer(0), owner);
  }

  ExecutionBuilder& invoke(std::uint32_t p, std::uint64_t k, TOpCall call) {
    Event e;
    e.kind = EventKind::kInvoke;
    e.process = ProcessId{p};
    e.txn = TxnId{k, ProcessId{p}};
    e.top = tops_[k];
    e.call = std::move(call);
    mem_.record(e);
    return *this;
  }
  ExecutionBuilder& respond(std::uint32_t p, std::uint64_t k, Outcome o) {
    Event e;
    e.kind = EventKind::kRespond;
    e.process = ProcessId{p};
    e.txn = TxnId{k, ProcessId{p}};
    e.top = tops_[k]++;
    e.outcome = std::move(o);
    mem_.record(e);
    return *this;
  }
  /// Primitive inside the open t-operation of T_k.
  ExecutionBuilder& step(std::uint32_t p, std::uint64_t k, std::uint32_t b, PrimitiveOp op) {
    mem_.apply(ProcessId{p}, BaseObjectId{b}, op, TxnId{k, ProcessId{p}}, tops_[k]);
    return *this;
  }

  Execution build() { return mem_.takeLog(); }

 private:
  Memory mem_;
  std::map<std::uint64_t, std::uint32_t> tops_;
};

}  // namespace tmlab::fixtures
