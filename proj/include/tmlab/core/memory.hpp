#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tmlab/core/error.hpp"
#include "tmlab/core/execution.hpp"
#include "tmlab/core/ids.hpp"
#include "tmlab/core/primitive.hpp"
#include "tmlab/core/rmr.hpp"
#include "tmlab/core/value.hpp"

namespace tmlab {

inline std::vector<MemoryModel> allMemoryModels() {
  return {kAllMemoryModels.begin(), kAllMemoryModels.end()};
}

/// Per-process, per-model RMR totals.
struct RmrReport {
  std::vector<MemoryModel> models;
  std::vector<std::array<std::uint64_t, 3>> perProcess;

  std::uint64_t at(ProcessId p, MemoryModel m) const {
    return p.value < perProcess.size() ? perProcess[p.value][static_cast<std::size_t>(m)] : 0;
  }
  std::uint64_t total(MemoryModel m) const {
    std::uint64_t t = 0;
    for (const auto& row : perProcess) t += row[static_cast<std::size_t>(m)];
    return t;
  }
};

/// Deterministic simulated shared memory with RMR accounting and an event log.
class Memory {
 public:
  explicit Memory(std::vector<MemoryModel> models = allMemoryModels()) {
    std::sort(models.begin(), models.end());
    models.erase(std::unique(models.begin(), models.end()), models.end());
    for (auto m : models) ledgers_[static_cast<std::size_t>(m)].emplace(m);
    log_.models = std::move(models);
  }

  /// Builds the initial configuration from explicit ids and values.
  static Memory create(const std::vector<ObjectInit>& objects,
                       std::vector<MemoryModel> models = allMemoryModels()) {
    Memory mem(std::move(models));
    std::set<std::uint32_t> seen;
    for (const auto& o : objects) {
      if (!seen.insert(o.id.index).second) {
        throw Error("duplicate base object id b" + std::to_string(o.id.index));
      }
    }
    for (const auto& o : objects) mem.install(o);
    return mem;
  }

  /// Dynamically allocates a fresh base object.
  BaseObjectId allocate(Value initial, std::optional<ProcessId> owner = std::nullopt) {
    BaseObjectId id{static_cast<std::uint32_t>(slots_.size())};
    install({id, std::move(initial), owner});
    return id;
  }

  bool exists(BaseObjectId b) const { return b.index < slots_.size() && slots_[b.index].present; }

  const Value& value(BaseObjectId b) const { return slot(b).value; }

  std::size_t objectCount() const {
    return static_cast<std::size_t>(std::count_if(slots_.begin(), slots_.end(), [](const Slot& s) { return s.present; }));
  }

  bool modelActive(MemoryModel m) const { return ledgers_[static_cast<std::size_t>(m)].has_value(); }
  const std::vector<MemoryModel>& models() const { return log_.models; }

  const RmrLedger& ledger(MemoryModel m) const {
    const auto& l = ledgers_[static_cast<std::size_t>(m)];
    if (!l) throw Error("memory model " + std::string(modelName(m)) + " is not active");
    return *l;
  }

  /// Applies one primitive on behalf of `p`, updates every active ledger, and
  /// appends the rmw event to the log. Unknown objects are an error; an SC
  /// without a valid link simply fails.
  Event apply(ProcessId p, BaseObjectId b, const PrimitiveOp& op, std::optional<TxnId> txn = std::nullopt,
              std::optional<std::uint32_t> top = std::nullopt, std::string label = {}) {
    if (op.kind == PrimitiveKind::kFetchAdd && !op.first.isInt()) throw Error("FETCH_ADD delta must be an integer");
    auto& s = slot(b);
    const bool linked = hasLink(s, p);
    const auto result = applyPrimitiveTo(op, s.value, linked);

    if (op.kind == PrimitiveKind::kLl) {
      if (!linked) s.links.push_back(p.value);
    } else if (op.kind == PrimitiveKind::kSc) {
      dropLink(s, p);
    }
    const bool modifying = op.kind == PrimitiveKind::kWrite || op.kind == PrimitiveKind::kFetchAdd ||
                           ((op.kind == PrimitiveKind::kCas || op.kind == PrimitiveKind::kSc) &&
                            result.response == Value::boolean(true));
    if (modifying) s.links.clear();
    s.value = result.after;

    Event e;
    e.kind = EventKind::kRmw;
    e.process = p;
    e.txn = txn;
    e.top = top;
    e.object = b;
    e.primitive = op;
    e.response = result.response;
    e.label = std::move(label);
    const bool isWrite = !isTrivial(op.kind);
    for (auto m : kAllMemoryModels) {
      auto& l = ledgers_[static_cast<std::size_t>(m)];
      if (l) e.rmr[static_cast<std::size_t>(m)] = l->access(p, b, isWrite, e.attribution()) ? 1 : 0;
    }
    record(e);
    return e;
  }

  /// Appends a non-rmw event (t-operation marker or machine marker).
  void record(Event& e) {
    e.seq = nextSeq_++;
    if (logging_) log_.events.push_back(e);
  }

  RmrReport rmrReport(RmrFilter filter = RmrFilter::kAll) const {
    RmrReport r;
    r.models = log_.models;
    std::size_t procs = 0;
    for (const auto& l : ledgers_) {
      if (l) procs = std::max(procs, l->processCount());
    }
    r.perProcess.assign(procs, {0, 0, 0});
    for (std::size_t i = 0; i < 3; ++i) {
      const auto& l = ledgers_[i];
      if (!l) continue;
      for (std::uint32_t p = 0; p < procs; ++p) r.perProcess[p][i] = l->count(ProcessId{p}, filter);
    }
    return r;
  }

  const Execution& log() const { return log_; }
  Execution& log() { return log_; }
  Execution takeLog() { return std::move(log_); }

  /// Exploration runs turn logging off; ledgers and values still update.
  void setLogging(bool on) { logging_ = on; }

  /// Exact encoding of object values and LL reservations (not caches).
  void encodeState(std::vector<std::int64_t>& out) const {
    for (const auto& s : slots_) {
      if (!s.present) continue;
      s.value.encode(out);
      out.push_back(static_cast<std::int64_t>(s.links.size()));
      for (auto q : s.links) out.push_back(q);
    }
  }

 private:
  struct Slot {
    bool present = false;
    Value value;
    std::vector<std::uint32_t> links;
  };

  void install(const ObjectInit& o) {
    if (exists(o.id)) throw Error("duplicate base object id b" + std::to_string(o.id.index));
    if (modelActive(MemoryModel::kDsm) && !o.owner) {
      throw Error("missing DSM ownership for b" + std::to_string(o.id.index));
    }
    if (slots_.size() <= o.id.index) slots_.resize(o.id.index + 1);
    slots_[o.id.index] = Slot{true, o.initial, {}};
    if (o.owner) {
      for (auto& l : ledgers_) {
        if (l) l->setOwner(o.id, *o.owner);
      }
    }
    log_.initialObjects.push_back(o);
  }

  Slot& slot(BaseObjectId b) {
    if (!exists(b)) throw Error("unknown base object b" + std::to_string(b.index));
    return slots_[b.index];
  }
  const Slot& slot(BaseObjectId b) const {
    if (!exists(b)) throw Error("unknown base object b" + std::to_string(b.index));
    return slots_[b.index];
  }

  static bool hasLink(const Slot& s, ProcessId p) {
    return std::find(s.links.begin(), s.links.end(), p.value) != s.links.end();
  }
  static void dropLink(Slot& s, ProcessId p) { std::erase(s.links, p.value); }

  std::vector<Slot> slots_;
  std::array<std::optional<RmrLedger>, 3> ledgers_;
  Execution log_;
  std::uint64_t nextSeq_ = 0;
  bool logging_ = true;
};

}  // namespace tmlab
