#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tmlab/tm/algorithm.hpp"

namespace tmlab {

/// Strictly serializable, strongly progressive TM over a single t-object.
///
/// The t-object lives in one base object holding (value, version). Reads
/// record the pair, writes are buffered, and a writer commits with one CAS
/// that installs (new value, version + 1); the CAS winner commits. A reader
/// re-reads the version at commit time.
class Sp1TmClient final : public TmClient {
 public:
  Sp1TmClient(BaseObjectId cell, TObjectId object) : cell_(cell), object_(object) {}

  std::unique_ptr<TmClient> clone() const override { return std::make_unique<Sp1TmClient>(*this); }

  void begin(TxnId txn) override {
    txn_ = txn;
    alive_ = true;
    observed_.reset();
    pending_.reset();
    phase_ = Phase::kIdle;
  }

  void invoke(const TOpCall& call) override {
    if (call.kind != TOpKind::kTryCommit && call.object != object_) {
      throw Error("SP1-TM serves a single t-object; X" + std::to_string(call.object.index) + " rejected");
    }
    if (!alive_) return finish(Outcome::abort());
    switch (call.kind) {
      case TOpKind::kRead:
        if (pending_) return finish(Outcome::of(*pending_));
        if (observed_) return finish(Outcome::of(observed_->at(0)));
        phase_ = Phase::kRead;
        return;
      case TOpKind::kWrite:
        pending_ = call.arg;
        return finish(Outcome::ok());
      case TOpKind::kTryCommit:
        if (pending_) {
          phase_ = observed_ ? Phase::kCas : Phase::kCommitRead;
        } else if (observed_) {
          phase_ = Phase::kValidate;
        } else {
          commitWith(true);
        }
        return;
    }
  }

  TmRequest poll() const override {
    switch (phase_) {
      case Phase::kIdle:
        throw Error("SP1-TM polled outside a t-operation");
      case Phase::kDone:
        return TmRequest::finish(result_);
      case Phase::kRead:
      case Phase::kCommitRead:
      case Phase::kValidate:
        return TmRequest::apply(cell_, PrimitiveOp::read());
      case Phase::kCas: {
        const auto version = observed_->at(1).asInt();
        return TmRequest::apply(cell_, PrimitiveOp::cas(*observed_, Value::tuple({*pending_, Value::integer(version + 1)})));
      }
    }
    throw Error("SP1-TM in an unknown phase");
  }

  void deliver(const Value& response) override {
    switch (phase_) {
      case Phase::kRead:
        observed_ = response;
        return finish(Outcome::of(response.at(0)));
      case Phase::kCommitRead:
        observed_ = response;
        phase_ = Phase::kCas;
        return;
      case Phase::kCas:
        return commitWith(response.asBool());
      case Phase::kValidate:
        return commitWith(response.at(1) == observed_->at(1));
      case Phase::kIdle:
      case Phase::kDone:
        throw Error("SP1-TM received a response it did not ask for");
    }
  }

  void encode(std::vector<std::int64_t>& out) const override {
    out.push_back(static_cast<std::int64_t>(txn_.k));
    out.push_back(alive_);
    out.push_back(static_cast<std::int64_t>(phase_));
    out.push_back(observed_.has_value());
    if (observed_) observed_->encode(out);
    out.push_back(pending_.has_value());
    if (pending_) pending_->encode(out);
    out.push_back(static_cast<std::int64_t>(result_.kind));
    result_.value.encode(out);
  }

 private:
  enum class Phase : std::uint8_t { kIdle, kDone, kRead, kCommitRead, kCas, kValidate };

  void finish(Outcome o) {
    result_ = std::move(o);
    phase_ = Phase::kDone;
  }
  void commitWith(bool ok) {
    alive_ = false;
    finish(ok ? Outcome::commit() : Outcome::abort());
  }

  BaseObjectId cell_;
  TObjectId object_;
  TxnId txn_;
  bool alive_ = false;
  Phase phase_ = Phase::kIdle;
  std::optional<Value> observed_;  // (value, version) as read
  std::optional<Value> pending_;   // buffered write
  Outcome result_;
};

class Sp1TmBinding final : public TmBinding {
 public:
  explicit Sp1TmBinding(BaseObjectId cell) : cell_(cell) {}

  std::unique_ptr<TmClient> makeClient(ProcessId) const override {
    return std::make_unique<Sp1TmClient>(cell_, TObjectId{0});
  }
  std::vector<BaseObjectId> footprint(TObjectId x) const override {
    if (x.index != 0) throw Error("SP1-TM serves only X0");
    return {cell_};
  }
  BaseObjectId cell() const { return cell_; }

 private:
  BaseObjectId cell_;
};

class Sp1Tm final : public TmAlgorithm {
 public:
  std::string name() const override { return "sp1"; }

  std::shared_ptr<const TmBinding> install(Memory& mem, const std::vector<Value>& initial,
                                           ProcessId home = ProcessId{0}) const override {
    if (initial.size() != 1) throw Error("SP1-TM installs exactly one t-object");
    const auto owner = mem.modelActive(MemoryModel::kDsm) ? std::optional<ProcessId>(home) : std::nullopt;
    const auto cell = mem.allocate(Value::tuple({initial[0], Value::integer(0)}), owner);
    recordTObjectInitial(mem, initial);
    return std::make_shared<Sp1TmBinding>(cell);
  }
};

}  // namespace tmlab
