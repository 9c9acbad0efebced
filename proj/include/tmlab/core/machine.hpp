#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tmlab/core/ids.hpp"
#include "tmlab/core/primitive.hpp"
#include "tmlab/core/top.hpp"

namespace tmlab {

/// The next thing a process wants to do.
///
/// A scheduler turn consumes at most one kPrimitive or kStep. Opening
/// boundaries (kInvoke, kOpen) only start a turn, closing ones (kRespond,
/// kClose) are emitted eagerly, so a t-operation's response lands next to its
/// last step and its invocation next to its first.
struct Action {
  enum class Kind : std::uint8_t {
    kPrimitive,  // apply `op` to `object`
    kInvoke,     // invoke t-operation `call` as operation `top` of `txn`
    kRespond,    // respond `outcome` to the open t-operation
    kOpen,       // opening marker `label` (e.g. mutex Entry invocation)
    kClose,      // closing marker `label`
    kStep,       // a local step that occupies a turn (marker `label`)
    kHalt,       // nothing left to do
  };

  Kind kind = Kind::kHalt;
  BaseObjectId object;
  PrimitiveOp op;
  std::optional<TxnId> txn;
  std::uint32_t top = 0;
  TOpCall call;
  Outcome outcome;
  std::string label;

  static Action primitive(BaseObjectId b, PrimitiveOp op, std::string label = {}) {
    Action a;
    a.kind = Kind::kPrimitive;
    a.object = b;
    a.op = std::move(op);
    a.label = std::move(label);
    return a;
  }
  static Action invoke(TxnId t, std::uint32_t top, TOpCall call) {
    Action a;
    a.kind = Kind::kInvoke;
    a.txn = t;
    a.top = top;
    a.call = std::move(call);
    return a;
  }
  static Action respond(Outcome o) {
    Action a;
    a.kind = Kind::kRespond;
    a.outcome = std::move(o);
    return a;
  }
  static Action marker(Kind k, std::string label) {
    Action a;
    a.kind = k;
    a.label = std::move(label);
    return a;
  }
  static Action halt() { return {}; }
};

/// A simulated process: a resumable, copyable state machine.
class StepMachine {
 public:
  virtual ~StepMachine() = default;

  /// The enabled action; must not change state.
  virtual Action next() const = 0;

  /// Moves past the action returned by next(). `response` is the primitive's
  /// response for kPrimitive and bottom otherwise.
  virtual void advance(const Value& response) = 0;

  virtual std::unique_ptr<StepMachine> clone() const = 0;

  /// Exact encoding of the local state, used to detect revisited states.
  virtual void encode(std::vector<std::int64_t>& out) const = 0;
};

}  // namespace tmlab
