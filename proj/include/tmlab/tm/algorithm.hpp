#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "tmlab/core/machine.hpp"
#include "tmlab/core/memory.hpp"
#include "tmlab/core/simulation.hpp"
#include "tmlab/core/top.hpp"

namespace tmlab {

/// What a TM client wants next inside the current t-operation.
struct TmRequest {
  bool done = false;
  Outcome outcome;  // when done
  BaseObjectId object;
  PrimitiveOp op;
  std::string label;

  static TmRequest finish(Outcome o) {
    TmRequest r;
    r.done = true;
    r.outcome = std::move(o);
    return r;
  }
  static TmRequest apply(BaseObjectId b, PrimitiveOp op, std::string label = {}) {
    TmRequest r;
    r.object = b;
    r.op = std::move(op);
    r.label = std::move(label);
    return r;
  }
};

/// Per-process side of a TM implementation: runs one t-operation at a time
/// as a state machine over primitives.
class TmClient {
 public:
  virtual ~TmClient() = default;
  virtual std::unique_ptr<TmClient> clone() const = 0;

  /// Starts a new transaction; the previous one is t-complete.
  virtual void begin(TxnId txn) = 0;
  virtual void invoke(const TOpCall& call) = 0;
  virtual TmRequest poll() const = 0;
  virtual void deliver(const Value& response) = 0;
  virtual void encode(std::vector<std::int64_t>& out) const = 0;
};

/// A TM installed in one memory: the base-object layout of its t-objects.
class TmBinding {
 public:
  virtual ~TmBinding() = default;
  virtual std::unique_ptr<TmClient> makeClient(ProcessId p) const = 0;
  /// Base objects that represent `x`.
  virtual std::vector<BaseObjectId> footprint(TObjectId x) const = 0;
};

/// A TM implementation, selectable by name.
class TmAlgorithm {
 public:
  virtual ~TmAlgorithm() = default;
  virtual std::string name() const = 0;

  /// Allocates base objects for t-objects X0..X(n-1) holding `initial`.
  /// Under DSM every allocated object is owned by `home`.
  virtual std::shared_ptr<const TmBinding> install(Memory& mem, const std::vector<Value>& initial,
                                                   ProcessId home = ProcessId{0}) const = 0;
};

inline void recordTObjectInitial(Memory& mem, const std::vector<Value>& initial) {
  for (std::uint32_t i = 0; i < initial.size(); ++i) mem.log().tobjectInitial.emplace_back(TObjectId{i}, initial[i]);
}

/// A transaction's t-operations, in order. Without a trailing tryC the
/// transaction is left t-incomplete and the process stops after it.
struct TxnScript {
  TxnId id;
  std::vector<TOpCall> ops;
};

/// Step machine that issues a sequence of scripted transactions through a TM
/// client. After A_k the rest of that transaction's script is dropped.
class TxnProgramMachine final : public StepMachine {
 public:
  TxnProgramMachine(std::unique_ptr<TmClient> client, std::vector<TxnScript> program)
      : client_(std::move(client)), program_(std::move(program)) {
    skipEmpty();
  }
  TxnProgramMachine(const TxnProgramMachine& o)
      : client_(o.client_->clone()),
        program_(o.program_),
        txn_(o.txn_),
        op_(o.op_),
        running_(o.running_),
        stuck_(o.stuck_),
        completedOps_(o.completedOps_),
        outcomes_(o.outcomes_) {}

  Action next() const override {
    if (stuck_ || txn_ >= program_.size()) return Action::halt();
    const auto& script = program_[txn_];
    if (!running_) return Action::invoke(script.id, op_, script.ops[op_]);
    TmRequest r = client_->poll();
    if (r.done) return Action::respond(r.outcome);
    return Action::primitive(r.object, r.op, r.label);
  }

  void advance(const Value& response) override {
    const auto& script = program_[txn_];
    if (!running_) {
      if (op_ == 0) client_->begin(script.id);
      client_->invoke(script.ops[op_]);
      running_ = true;
      return;
    }
    TmRequest r = client_->poll();
    if (!r.done) {
      client_->deliver(response);
      return;
    }
    running_ = false;
    ++completedOps_;
    outcomes_.push_back(r.outcome);
    const bool ends = r.outcome.isAbort() || script.ops[op_].kind == TOpKind::kTryCommit;
    ++op_;
    if (ends) {
      ++txn_;
      op_ = 0;
      skipEmpty();
    } else if (op_ >= script.ops.size()) {
      stuck_ = true;
    }
  }

  std::unique_ptr<StepMachine> clone() const override { return std::make_unique<TxnProgramMachine>(*this); }

  void encode(std::vector<std::int64_t>& out) const override {
    out.push_back(static_cast<std::int64_t>(txn_));
    out.push_back(op_);
    out.push_back(running_ ? 1 : 0);
    out.push_back(stuck_ ? 1 : 0);
    client_->encode(out);
  }

  std::size_t completedOps() const { return completedOps_; }
  const std::vector<Outcome>& outcomes() const { return outcomes_; }

 private:
  void skipEmpty() {
    while (txn_ < program_.size() && program_[txn_].ops.empty()) ++txn_;
  }

  std::unique_ptr<TmClient> client_;
  std::vector<TxnScript> program_;
  std::size_t txn_ = 0;
  std::uint32_t op_ = 0;
  bool running_ = false;
  bool stuck_ = false;
  std::size_t completedOps_ = 0;
  std::vector<Outcome> outcomes_;
};

/// Fresh simulation with `tm` installed and one scripted program per process.
inline Simulation makeTmSimulation(const TmAlgorithm& tm, const std::vector<Value>& initial,
                                   const std::vector<std::vector<TxnScript>>& programs,
                                   std::vector<MemoryModel> models = allMemoryModels()) {
  Memory mem(std::move(models));
  auto binding = tm.install(mem, initial);
  Simulation sim(std::move(mem));
  for (std::uint32_t p = 0; p < programs.size(); ++p) {
    sim.setMachine(ProcessId{p}, std::make_unique<TxnProgramMachine>(binding->makeClient(ProcessId{p}), programs[p]));
  }
  return sim;
}

}  // namespace tmlab
