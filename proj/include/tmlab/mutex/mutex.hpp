#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tmlab/tm/sp1_tm.hpp"

namespace tmlab::mutex {

inline const Value kLocked = Value::integer(1);
inline const Value kUnlocked = Value::integer(0);

/// [p, face] as stored in X.
inline Value faceValue(ProcessId p, int face) {
  return Value::tuple({Value::integer(p.value), Value::integer(face)});
}

/// Registers of the lock plus the single t-object X (initially bottom).
/// Under DSM, Done[p][*], Succ[p][*] and Lock[p][*] are owned by p; the
/// TM cell is owned by p0.
struct MutexShared {
  std::uint32_t n = 0;
  std::vector<std::array<BaseObjectId, 2>> done;
  std::vector<std::array<BaseObjectId, 2>> succ;
  // lock[i][j]; the diagonal is used when a process finds its own previous
  // face in X.
  std::vector<std::vector<BaseObjectId>> lock;
  std::shared_ptr<const Sp1TmBinding> tm;

  static MutexShared install(Memory& mem, std::uint32_t n) {
    if (n < 2) throw Error("the mutex needs at least two processes");
    MutexShared s;
    s.n = n;
    const bool dsm = mem.modelActive(MemoryModel::kDsm);
    auto owner = [&](std::uint32_t p) { return dsm ? std::optional<ProcessId>(ProcessId{p}) : std::nullopt; };
    auto binding = Sp1Tm().install(mem, {Value::bottom()}, ProcessId{0});
    s.tm = std::static_pointer_cast<const Sp1TmBinding>(binding);
    s.done.resize(n);
    s.succ.resize(n);
    s.lock.assign(n, std::vector<BaseObjectId>(n));
    for (std::uint32_t p = 0; p < n; ++p) {
      for (int f = 0; f < 2; ++f) {
        s.done[p][f] = mem.allocate(Value::boolean(true), owner(p));
        s.succ[p][f] = mem.allocate(Value::bottom(), owner(p));
      }
      for (std::uint32_t q = 0; q < n; ++q) s.lock[p][q] = mem.allocate(kUnlocked, owner(p));
    }
    return s;
  }
};

/// One process of the lock: `passes` rounds of Entry, critical section, Exit.
///
/// Markers: open "enter", close "enter-ok", step "cs", open "exit",
/// close "exit-ok". Spin reads carry the label "spin".
class MutexMachine final : public StepMachine {
 public:
  MutexMachine(std::shared_ptr<const MutexShared> shared, ProcessId self, std::uint32_t passes)
      : shared_(std::move(shared)), self_(self), passes_(passes), client_(shared_->tm->makeClient(self)) {}

  MutexMachine(const MutexMachine& o)
      : shared_(o.shared_),
        self_(o.self_),
        passes_(o.passes_),
        client_(o.client_->clone()),
        pc_(o.pc_),
        face_(o.face_),
        done_(o.done_),
        txnSeq_(o.txnSeq_),
        top_(o.top_),
        inTop_(o.inTop_),
        funcValue_(o.funcValue_),
        prev_(o.prev_),
        succ_(o.succ_),
        attempts_(o.attempts_) {}

  Action next() const override {
    const auto& s = *shared_;
    switch (pc_) {
      case Pc::kIdle:
        return done_ >= passes_ ? Action::halt() : Action::marker(Action::Kind::kOpen, "enter");
      case Pc::kDoneFalse:
        return Action::primitive(s.done[self_.value][face_], PrimitiveOp::write(Value::boolean(false)));
      case Pc::kSuccBottom:
        return Action::primitive(s.succ[self_.value][face_], PrimitiveOp::write(Value::bottom()));
      case Pc::kFunc:
        return funcAction();
      case Pc::kLock:
        return Action::primitive(s.lock[self_.value][prevPid()], PrimitiveOp::write(kLocked));
      case Pc::kSetSucc:
        return Action::primitive(s.succ[prevPid()][prevFace()], PrimitiveOp::write(Value::integer(self_.value)));
      case Pc::kReadDone:
        return Action::primitive(s.done[prevPid()][prevFace()], PrimitiveOp::read());
      case Pc::kSpin:
        return Action::primitive(s.lock[self_.value][prevPid()], PrimitiveOp::read(), "spin");
      case Pc::kEntered:
        return Action::marker(Action::Kind::kClose, "enter-ok");
      case Pc::kCs:
        return Action::marker(Action::Kind::kStep, "cs");
      case Pc::kExit:
        return Action::marker(Action::Kind::kOpen, "exit");
      case Pc::kDoneTrue:
        return Action::primitive(s.done[self_.value][face_], PrimitiveOp::write(Value::boolean(true)));
      case Pc::kReadSucc:
        return Action::primitive(s.succ[self_.value][face_], PrimitiveOp::read());
      case Pc::kUnlock:
        return Action::primitive(s.lock[static_cast<std::uint32_t>(succ_.asInt())][self_.value],
                                 PrimitiveOp::write(kUnlocked));
      case Pc::kExited:
        return Action::marker(Action::Kind::kClose, "exit-ok");
    }
    throw Error("mutex machine in an unknown state");
  }

  void advance(const Value& response) override {
    switch (pc_) {
      case Pc::kIdle:
        face_ = 1 - face_;
        attempts_ = 0;
        pc_ = Pc::kDoneFalse;
        return;
      case Pc::kDoneFalse:
        pc_ = Pc::kSuccBottom;
        return;
      case Pc::kSuccBottom:
        pc_ = Pc::kFunc;
        top_ = 0;
        inTop_ = false;
        return;
      case Pc::kFunc:
        return funcAdvance(response);
      case Pc::kLock:
        pc_ = Pc::kSetSucc;
        return;
      case Pc::kSetSucc:
        pc_ = Pc::kReadDone;
        return;
      case Pc::kReadDone:
        pc_ = response == Value::boolean(false) ? Pc::kSpin : Pc::kEntered;
        return;
      case Pc::kSpin:
        if (response == kUnlocked) pc_ = Pc::kEntered;
        return;
      case Pc::kEntered:
        pc_ = Pc::kCs;
        return;
      case Pc::kCs:
        pc_ = Pc::kExit;
        return;
      case Pc::kExit:
        pc_ = Pc::kDoneTrue;
        return;
      case Pc::kDoneTrue:
        pc_ = Pc::kReadSucc;
        return;
      case Pc::kReadSucc:
        succ_ = response;
        pc_ = response.isBottom() ? Pc::kExited : Pc::kUnlock;
        return;
      case Pc::kUnlock:
        pc_ = Pc::kExited;
        return;
      case Pc::kExited:
        ++done_;
        pc_ = Pc::kIdle;
        return;
    }
  }

  std::unique_ptr<StepMachine> clone() const override { return std::make_unique<MutexMachine>(*this); }

  void encode(std::vector<std::int64_t>& out) const override {
    out.push_back(static_cast<std::int64_t>(pc_));
    out.push_back(face_);
    out.push_back(done_);
    out.push_back(top_);
    out.push_back(inTop_);
    funcValue_.encode(out);
    prev_.encode(out);
    succ_.encode(out);
    // Transaction ids are not part of the state that matters for safety, so
    // they are left out and retries fold into one state.
    std::vector<std::int64_t> client;
    client_->encode(client);
    out.insert(out.end(), client.begin() + 1, client.end());
  }

  /// Between "enter-ok" and the "exit" invocation.
  bool inCriticalSection() const { return pc_ == Pc::kCs || pc_ == Pc::kExit; }
  std::uint32_t passesDone() const { return done_; }
  /// func calls in the current or last Entry.
  std::uint32_t attempts() const { return attempts_; }

 private:
  enum class Pc : std::uint8_t {
    kIdle,
    kDoneFalse,
    kSuccBottom,
    kFunc,
    kLock,
    kSetSucc,
    kReadDone,
    kSpin,
    kEntered,
    kCs,
    kExit,
    kDoneTrue,
    kReadSucc,
    kUnlock,
    kExited,
  };

  TxnId txn() const { return TxnId{(self_.value + 1ull) * 1'000'000ull + txnSeq_, self_}; }
  TOpCall call() const {
    switch (top_) {
      case 0:
        return TOpCall::read(TObjectId{0});
      case 1:
        return TOpCall::write(TObjectId{0}, faceValue(self_, face_));
      default:
        return TOpCall::tryCommit();
    }
  }
  std::uint32_t prevPid() const { return static_cast<std::uint32_t>(prev_.at(0).asInt()); }
  int prevFace() const { return static_cast<int>(prev_.at(1).asInt()); }

  // func(): read X, write [p, face], tryC; false on abort.
  Action funcAction() const {
    if (!inTop_) return Action::invoke(txn(), top_, call());
    TmRequest r = client_->poll();
    if (r.done) return Action::respond(r.outcome);
    return Action::primitive(r.object, r.op, r.label);
  }

  void funcAdvance(const Value& response) {
    if (!inTop_) {
      if (top_ == 0) {
        client_->begin(txn());
        ++attempts_;
      }
      client_->invoke(call());
      inTop_ = true;
      return;
    }
    TmRequest r = client_->poll();
    if (!r.done) {
      client_->deliver(response);
      return;
    }
    inTop_ = false;
    if (top_ == 0 && r.outcome.isValue()) funcValue_ = r.outcome.value;
    if (r.outcome.isAbort()) {
      ++txnSeq_;
      top_ = 0;
      return;
    }
    if (++top_ < 3) return;
    ++txnSeq_;
    prev_ = funcValue_;
    pc_ = prev_.isBottom() ? Pc::kEntered : Pc::kLock;
  }

  std::shared_ptr<const MutexShared> shared_;
  ProcessId self_;
  std::uint32_t passes_ = 0;
  std::unique_ptr<TmClient> client_;
  Pc pc_ = Pc::kIdle;
  int face_ = 0;
  std::uint32_t done_ = 0;
  std::uint64_t txnSeq_ = 0;
  std::uint32_t top_ = 0;
  bool inTop_ = false;
  Value funcValue_;
  Value prev_;
  Value succ_;
  std::uint32_t attempts_ = 0;
};

}  // namespace tmlab::mutex
