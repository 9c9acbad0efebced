#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "tmlab/tm/algorithm.hpp"

namespace tmlab {

/// Lock word of a REF-TM cell: (version, locked, owner txn or -1).
struct VersionLock {
  std::int64_t version = 0;
  bool locked = false;
  std::int64_t owner = -1;

  Value encode() const { return Value::tuple({Value::integer(version), Value::boolean(locked), Value::integer(owner)}); }
  static VersionLock decode(const Value& v) {
    if (!v.isTuple() || v.items().size() != 3) throw Error("malformed version lock: " + v.toString());
    return {v.at(0).asInt(), v.at(1).asBool(), v.at(2).asInt()};
  }
};

struct RefLayout {
  std::vector<BaseObjectId> value;
  std::vector<BaseObjectId> lock;
};

/// Progressive, opaque TM with invisible reads and incremental validation.
///
/// Each t-object is a value cell plus a versioned lock word. A t-read takes a
/// consistent snapshot of its cell (lock, value, lock again) and then
/// re-checks the version of every earlier read. Writes are buffered; tryC
/// locks the write set in t-object order with CAS, validates the read set,
/// publishes, and releases with a bumped version. Encountering a lock held by
/// another transaction aborts immediately.
class RefTmClient final : public TmClient {
 public:
  explicit RefTmClient(std::shared_ptr<const RefLayout> layout) : layout_(std::move(layout)) {}

  std::unique_ptr<TmClient> clone() const override { return std::make_unique<RefTmClient>(*this); }

  void begin(TxnId txn) override {
    txn_ = txn;
    alive_ = true;
    reads_.clear();
    writes_.clear();
    acquired_.clear();
    phase_ = Phase::kIdle;
  }

  void invoke(const TOpCall& call) override {
    call_ = call;
    index_ = 0;
    if (call.kind != TOpKind::kTryCommit) checkObject(call.object);
    if (!alive_) return finish(Outcome::abort());
    switch (call.kind) {
      case TOpKind::kRead: {
        if (auto it = writes_.find(call.object.index); it != writes_.end()) return finish(Outcome::of(it->second));
        for (const auto& r : reads_) {
          if (r.object == call.object.index) return finish(Outcome::of(r.value));
        }
        phase_ = Phase::kReadLock;
        return;
      }
      case TOpKind::kWrite:
        writes_[call.object.index] = call.arg;
        return finish(Outcome::ok());
      case TOpKind::kTryCommit:
        if (writes_.empty()) {
          if (reads_.empty()) return commit();
          phase_ = Phase::kCommitValidate;
        } else {
          writeOrder_.clear();
          for (const auto& [x, v] : writes_) writeOrder_.push_back(x);
          phase_ = Phase::kAcquireRead;
        }
        return;
    }
  }

  TmRequest poll() const override {
    switch (phase_) {
      case Phase::kIdle:
        throw Error("REF-TM polled outside a t-operation");
      case Phase::kDone:
        return TmRequest::finish(result_);
      case Phase::kReadLock:
      case Phase::kReadRecheck:
        return TmRequest::apply(layout_->lock[call_.object.index], PrimitiveOp::read());
      case Phase::kReadValue:
        return TmRequest::apply(layout_->value[call_.object.index], PrimitiveOp::read());
      case Phase::kReadValidate:
      case Phase::kCommitValidate:
        return TmRequest::apply(layout_->lock[reads_[index_].object], PrimitiveOp::read());
      case Phase::kAcquireRead:
        return TmRequest::apply(layout_->lock[writeOrder_[index_]], PrimitiveOp::read());
      case Phase::kAcquireCas: {
        VersionLock mine{observed_.version, true, static_cast<std::int64_t>(txn_.k)};
        return TmRequest::apply(layout_->lock[writeOrder_[index_]], PrimitiveOp::cas(observed_.encode(), mine.encode()));
      }
      case Phase::kUpdateValidate:
        return TmRequest::apply(layout_->lock[reads_[index_].object], PrimitiveOp::read());
      case Phase::kPublishValue:
        return TmRequest::apply(layout_->value[acquired_[index_].object],
                                PrimitiveOp::write(writes_.at(acquired_[index_].object)));
      case Phase::kPublishLock: {
        VersionLock next{acquired_[index_].version + 1, false, -1};
        return TmRequest::apply(layout_->lock[acquired_[index_].object], PrimitiveOp::write(next.encode()));
      }
      case Phase::kRelease: {
        VersionLock back{acquired_[index_].version, false, -1};
        return TmRequest::apply(layout_->lock[acquired_[index_].object], PrimitiveOp::write(back.encode()));
      }
    }
    throw Error("REF-TM in an unknown phase");
  }

  void deliver(const Value& response) override {
    switch (phase_) {
      case Phase::kReadLock: {
        auto w = VersionLock::decode(response);
        if (w.locked) return fail();
        snapshot_ = w;
        phase_ = Phase::kReadValue;
        return;
      }
      case Phase::kReadValue:
        readValue_ = response;
        phase_ = Phase::kReadRecheck;
        return;
      case Phase::kReadRecheck: {
        auto w = VersionLock::decode(response);
        if (w.locked || w.version != snapshot_.version) return fail();
        index_ = 0;
        phase_ = Phase::kReadValidate;
        return finishReadIfValidated();
      }
      case Phase::kReadValidate: {
        auto w = VersionLock::decode(response);
        if (w.locked || w.version != reads_[index_].version) return fail();
        ++index_;
        return finishReadIfValidated();
      }
      case Phase::kCommitValidate: {
        auto w = VersionLock::decode(response);
        if (w.locked || w.version != reads_[index_].version) return fail();
        ++index_;
        if (index_ >= reads_.size()) commit();
        return;
      }
      case Phase::kAcquireRead: {
        auto w = VersionLock::decode(response);
        const auto x = writeOrder_[index_];
        if (w.locked) return beginRelease();
        if (auto r = findRead(x); r && r->version != w.version) return beginRelease();
        observed_ = w;
        phase_ = Phase::kAcquireCas;
        return;
      }
      case Phase::kAcquireCas: {
        if (!response.asBool()) return beginRelease();
        acquired_.push_back({writeOrder_[index_], observed_.version});
        ++index_;
        if (index_ >= writeOrder_.size()) {
          index_ = 0;
          phase_ = Phase::kUpdateValidate;
          skipOwnedReads();
        } else {
          phase_ = Phase::kAcquireRead;
        }
        return;
      }
      case Phase::kUpdateValidate: {
        auto w = VersionLock::decode(response);
        if (w.locked || w.version != reads_[index_].version) return beginRelease();
        ++index_;
        skipOwnedReads();
        return;
      }
      case Phase::kPublishValue:
        phase_ = Phase::kPublishLock;
        return;
      case Phase::kPublishLock:
        ++index_;
        if (index_ >= acquired_.size()) {
          commit();
        } else {
          phase_ = Phase::kPublishValue;
        }
        return;
      case Phase::kRelease:
        ++index_;
        if (index_ >= acquired_.size()) fail();
        return;
      case Phase::kIdle:
      case Phase::kDone:
        throw Error("REF-TM received a response it did not ask for");
    }
  }

  void encode(std::vector<std::int64_t>& out) const override {
    out.push_back(static_cast<std::int64_t>(txn_.k));
    out.push_back(alive_);
    out.push_back(static_cast<std::int64_t>(phase_));
    out.push_back(static_cast<std::int64_t>(index_));
    out.push_back(static_cast<std::int64_t>(reads_.size()));
    for (const auto& r : reads_) {
      out.push_back(r.object);
      out.push_back(r.version);
      r.value.encode(out);
    }
    out.push_back(static_cast<std::int64_t>(writes_.size()));
    for (const auto& [x, v] : writes_) {
      out.push_back(x);
      v.encode(out);
    }
    out.push_back(static_cast<std::int64_t>(acquired_.size()));
    for (const auto& a : acquired_) {
      out.push_back(a.object);
      out.push_back(a.version);
    }
    out.push_back(snapshot_.version);
    out.push_back(observed_.version);
    readValue_.encode(out);
    result_.value.encode(out);
    out.push_back(static_cast<std::int64_t>(result_.kind));
  }

 private:
  enum class Phase : std::uint8_t {
    kIdle,
    kDone,
    kReadLock,
    kReadValue,
    kReadRecheck,
    kReadValidate,
    kCommitValidate,
    kAcquireRead,
    kAcquireCas,
    kUpdateValidate,
    kPublishValue,
    kPublishLock,
    kRelease,
  };

  struct ReadEntry {
    std::uint32_t object = 0;
    Value value;
    std::int64_t version = 0;
  };
  struct Held {
    std::uint32_t object = 0;
    std::int64_t version = 0;
  };

  void checkObject(TObjectId x) const {
    if (x.index >= layout_->value.size()) throw Error("REF-TM: unknown t-object X" + std::to_string(x.index));
  }

  const ReadEntry* findRead(std::uint32_t x) const {
    for (const auto& r : reads_) {
      if (r.object == x) return &r;
    }
    return nullptr;
  }

  void finish(Outcome o) {
    result_ = std::move(o);
    phase_ = Phase::kDone;
  }
  void fail() {
    alive_ = false;
    finish(Outcome::abort());
  }
  void commit() {
    alive_ = false;
    finish(Outcome::commit());
  }

  void finishReadIfValidated() {
    if (index_ < reads_.size()) return;
    reads_.push_back({call_.object.index, readValue_, snapshot_.version});
    finish(Outcome::of(readValue_));
  }

  // Read-set entries that are also in the write set are locked by us and
  // were version-checked during acquisition.
  void skipOwnedReads() {
    while (index_ < reads_.size() && writes_.count(reads_[index_].object)) ++index_;
    if (index_ >= reads_.size()) {
      index_ = 0;
      phase_ = Phase::kPublishValue;
    }
  }

  void beginRelease() {
    if (acquired_.empty()) return fail();
    index_ = 0;
    phase_ = Phase::kRelease;
  }

  std::shared_ptr<const RefLayout> layout_;
  TxnId txn_;
  bool alive_ = false;
  TOpCall call_;
  Phase phase_ = Phase::kIdle;
  std::size_t index_ = 0;
  std::vector<ReadEntry> reads_;
  std::map<std::uint32_t, Value> writes_;
  std::vector<std::uint32_t> writeOrder_;
  std::vector<Held> acquired_;
  VersionLock snapshot_;
  VersionLock observed_;
  Value readValue_;
  Outcome result_;
};

class RefTmBinding final : public TmBinding {
 public:
  explicit RefTmBinding(std::shared_ptr<const RefLayout> layout) : layout_(std::move(layout)) {}

  std::unique_ptr<TmClient> makeClient(ProcessId) const override { return std::make_unique<RefTmClient>(layout_); }

  std::vector<BaseObjectId> footprint(TObjectId x) const override {
    return {layout_->value.at(x.index), layout_->lock.at(x.index)};
  }

 private:
  std::shared_ptr<const RefLayout> layout_;
};

class RefTm final : public TmAlgorithm {
 public:
  std::string name() const override { return "ref"; }

  std::shared_ptr<const TmBinding> install(Memory& mem, const std::vector<Value>& initial,
                                           ProcessId home = ProcessId{0}) const override {
    auto layout = std::make_shared<RefLayout>();
    const auto owner = mem.modelActive(MemoryModel::kDsm) ? std::optional<ProcessId>(home) : std::nullopt;
    for (const auto& v : initial) {
      layout->value.push_back(mem.allocate(v, owner));
      layout->lock.push_back(mem.allocate(VersionLock{}.encode(), owner));
    }
    recordTObjectInitial(mem, initial);
    return std::make_shared<RefTmBinding>(std::move(layout));
  }
};

}  // namespace tmlab
