#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tmlab/core/ids.hpp"
#include "tmlab/core/primitive.hpp"
#include "tmlab/core/rmr.hpp"
#include "tmlab/core/top.hpp"
#include "tmlab/core/value.hpp"

namespace tmlab {

enum class EventKind : std::uint8_t {
  kRmw,      // primitive applied to a base object
  kInvoke,   // t-operation invocation
  kRespond,  // t-operation response
  kMarker,   // anything else a machine reports (mutex Entry/Exit, critical section)
};

/// RMR verdict of one event under each memory model; empty when the model is off.
using RmrVector = std::array<std::optional<std::uint8_t>, 3>;

struct Event {
  EventKind kind = EventKind::kRmw;
  std::uint64_t seq = 0;
  ProcessId process;
  std::optional<TxnId> txn;
  std::optional<std::uint32_t> top;  // index of the t-operation within its transaction

  // kRmw
  BaseObjectId object;
  PrimitiveOp primitive;
  Value response;
  RmrVector rmr;

  // kInvoke / kRespond
  TOpCall call;
  Outcome outcome;

  // kMarker, or a free-form label on an rmw event (e.g. "spin")
  std::string label;

  bool isRmw() const { return kind == EventKind::kRmw; }
  bool isNontrivial() const { return isRmw() && !isTrivial(primitive.kind); }
  bool isTm() const { return top.has_value(); }
  Attribution attribution() const { return isTm() ? Attribution::kTm : Attribution::kNonTm; }
  std::uint8_t rmrUnder(MemoryModel m) const { return rmr[static_cast<std::size_t>(m)].value_or(0); }
};

struct ObjectInit {
  BaseObjectId id;
  Value initial;
  std::optional<ProcessId> owner;
};

/// A scheduled process that had nothing enabled; not an event of the execution.
struct SkipRecord {
  std::size_t scheduleIndex = 0;
  ProcessId process;
};

/// A primitive a transaction was poised to apply when the run stopped.
struct PoisedStep {
  ProcessId process;
  std::optional<TxnId> txn;
  BaseObjectId object;
  PrimitiveKind kind = PrimitiveKind::kRead;
};

/// Ground truth of a run: the initial configuration plus the event sequence.
struct Execution {
  std::vector<MemoryModel> models;
  std::vector<ObjectInit> initialObjects;
  std::vector<std::pair<TObjectId, Value>> tobjectInitial;
  std::vector<Event> events;
  std::vector<SkipRecord> skips;
  std::vector<PoisedStep> finalPoised;
  bool truncated = false;

  std::size_t rmwCount() const {
    std::size_t n = 0;
    for (const auto& e : events) n += e.isRmw() ? 1 : 0;
    return n;
  }
};

}  // namespace tmlab
