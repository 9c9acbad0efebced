#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tmlab/core/error.hpp"
#include "tmlab/core/execution.hpp"
#include "tmlab/core/machine.hpp"
#include "tmlab/core/memory.hpp"

namespace tmlab {

/// splitmix64; fixed output on every platform, unlike <random> distributions.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  std::uint64_t below(std::uint64_t bound) { return bound == 0 ? 0 : next() % bound; }

 private:
  std::uint64_t state_;
};

struct Schedule {
  enum class Mode : std::uint8_t { kScripted, kRoundRobin, kRandom };

  Mode mode = Mode::kRoundRobin;
  std::vector<ProcessId> steps;
  std::uint64_t seed = 0;

  static Schedule scripted(std::vector<ProcessId> steps) { return {Mode::kScripted, std::move(steps), 0}; }
  static Schedule roundRobin() { return {Mode::kRoundRobin, {}, 0}; }
  static Schedule random(std::uint64_t seed) { return {Mode::kRandom, {}, seed}; }
};

enum class TurnResult : std::uint8_t {
  kStep,         // consumed a primitive or a local step
  kMarkersOnly,  // only zero-cost t-operations or markers ran
  kSkipped,      // the process had nothing enabled
};

struct RunSummary {
  std::size_t turns = 0;
  bool truncated = false;  // a scripted schedule did not finish within maxSteps
  bool allHalted = false;
};

/// Memory plus one step machine per process, stepped one turn at a time.
class Simulation {
 public:
  explicit Simulation(Memory memory) : memory_(std::move(memory)) {}

  Simulation(const Simulation& other) : memory_(other.memory_), procs_(other.procs_.size()) {
    for (std::size_t i = 0; i < procs_.size(); ++i) {
      procs_[i].open = other.procs_[i].open;
      if (other.procs_[i].machine) procs_[i].machine = other.procs_[i].machine->clone();
    }
  }
  Simulation& operator=(const Simulation& other) {
    if (this != &other) {
      Simulation copy(other);
      *this = std::move(copy);
    }
    return *this;
  }
  Simulation(Simulation&&) noexcept = default;
  Simulation& operator=(Simulation&&) noexcept = default;

  void setMachine(ProcessId p, std::unique_ptr<StepMachine> m) {
    if (procs_.size() <= p.value) procs_.resize(p.value + 1);
    procs_[p.value].machine = std::move(m);
    procs_[p.value].open.reset();
  }

  std::size_t processCount() const { return procs_.size(); }
  bool hasMachine(ProcessId p) const { return p.value < procs_.size() && procs_[p.value].machine != nullptr; }

  StepMachine& machine(ProcessId p) {
    if (!hasMachine(p)) throw Error("no machine for process p" + std::to_string(p.value));
    return *procs_[p.value].machine;
  }
  const StepMachine& machine(ProcessId p) const {
    if (!hasMachine(p)) throw Error("no machine for process p" + std::to_string(p.value));
    return *procs_[p.value].machine;
  }

  bool halted(ProcessId p) const { return !hasMachine(p) || machine(p).next().kind == Action::Kind::kHalt; }

  bool allHalted() const {
    for (std::uint32_t i = 0; i < procs_.size(); ++i) {
      if (!halted(ProcessId{i})) return false;
    }
    return true;
  }

  Memory& memory() { return memory_; }
  const Memory& memory() const { return memory_; }
  const Execution& execution() const { return memory_.log(); }

  /// Runs one turn of `p`.
  TurnResult step(ProcessId p) {
    if (halted(p)) return TurnResult::kSkipped;
    auto& proc = procs_[p.value];
    auto& m = *proc.machine;
    bool consumed = false;
    bool any = false;
    for (int guard = 0;; ++guard) {
      if (guard > kMaxZeroCostActions) throw Error("machine made no progress within a turn");
      Action a = m.next();
      switch (a.kind) {
        case Action::Kind::kHalt:
          return consumed ? TurnResult::kStep : (any ? TurnResult::kMarkersOnly : TurnResult::kSkipped);
        case Action::Kind::kInvoke: {
          if (consumed) return TurnResult::kStep;
          if (proc.open) throw Error("t-operation invoked while another is open");
          proc.open = OpenTop{*a.txn, a.top, a.call};
          Event e;
          e.kind = EventKind::kInvoke;
          e.process = p;
          e.txn = a.txn;
          e.top = a.top;
          e.call = a.call;
          memory_.record(e);
          m.advance(Value::bottom());
          any = true;
          break;
        }
        case Action::Kind::kRespond: {
          if (!proc.open) throw Error("t-operation response without invocation");
          Event e;
          e.kind = EventKind::kRespond;
          e.process = p;
          e.txn = proc.open->txn;
          e.top = proc.open->top;
          e.call = proc.open->call;
          e.outcome = a.outcome;
          memory_.record(e);
          proc.open.reset();
          m.advance(Value::bottom());
          any = true;
          break;
        }
        case Action::Kind::kOpen:
          if (consumed) return TurnResult::kStep;
          [[fallthrough]];
        case Action::Kind::kClose: {
          Event e;
          e.kind = EventKind::kMarker;
          e.process = p;
          e.label = a.label;
          memory_.record(e);
          m.advance(Value::bottom());
          any = true;
          break;
        }
        case Action::Kind::kStep: {
          if (consumed) return TurnResult::kStep;
          Event e;
          e.kind = EventKind::kMarker;
          e.process = p;
          e.label = a.label;
          memory_.record(e);
          m.advance(Value::bottom());
          consumed = true;
          break;
        }
        case Action::Kind::kPrimitive: {
          if (consumed) return TurnResult::kStep;
          std::optional<TxnId> txn;
          std::optional<std::uint32_t> top;
          if (proc.open) {
            txn = proc.open->txn;
            top = proc.open->top;
          }
          Event e = memory_.apply(p, a.object, a.op, txn, top, a.label);
          m.advance(e.response);
          consumed = true;
          break;
        }
      }
    }
  }

  /// Steps machines per `schedule` until it ends, `maxSteps` entries are
  /// used, or every machine halts.
  /// `afterTurn`, when set, runs after every turn; returning false stops the run.
  RunSummary run(const Schedule& schedule, std::size_t maxSteps, const std::function<bool()>& afterTurn = {}) {
    RunSummary s;
    bool stop = false;
    auto turn = [&](ProcessId p, std::size_t idx) {
      if (!hasMachine(p)) throw Error("scheduled process p" + std::to_string(p.value) + " has no machine");
      if (step(p) == TurnResult::kSkipped) memory_.log().skips.push_back({idx, p});
      ++s.turns;
      if (afterTurn && !afterTurn()) stop = true;
    };
    switch (schedule.mode) {
      case Schedule::Mode::kScripted: {
        std::size_t i = 0;
        for (; i < schedule.steps.size() && s.turns < maxSteps && !stop; ++i) turn(schedule.steps[i], i);
        s.truncated = i < schedule.steps.size();
        break;
      }
      case Schedule::Mode::kRoundRobin: {
        const auto n = static_cast<std::uint32_t>(procs_.size());
        for (std::size_t i = 0; n > 0 && s.turns < maxSteps && !stop && !allHalted(); ++i) {
          ProcessId p{static_cast<std::uint32_t>(i % n)};
          if (!hasMachine(p)) continue;
          turn(p, i);
        }
        break;
      }
      case Schedule::Mode::kRandom: {
        SplitMix64 rng(schedule.seed);
        for (std::size_t i = 0; s.turns < maxSteps && !stop; ++i) {
          std::vector<ProcessId> live;
          for (std::uint32_t q = 0; q < procs_.size(); ++q) {
            if (!halted(ProcessId{q})) live.push_back(ProcessId{q});
          }
          if (live.empty()) break;
          turn(live[rng.below(live.size())], i);
        }
        break;
      }
    }
    s.allHalted = allHalted();
    recordPoised();
    memory_.log().truncated = memory_.log().truncated || s.truncated;
    return s;
  }

  /// Refreshes the execution's record of pending primitives.
  void recordPoised() {
    auto& poised = memory_.log().finalPoised;
    poised.clear();
    for (std::uint32_t i = 0; i < procs_.size(); ++i) {
      if (!procs_[i].machine) continue;
      Action a = procs_[i].machine->next();
      if (a.kind != Action::Kind::kPrimitive) continue;
      PoisedStep ps{ProcessId{i}, std::nullopt, a.object, a.op.kind};
      if (procs_[i].open) ps.txn = procs_[i].open->txn;
      poised.push_back(ps);
    }
  }

  /// The t-operation a process is inside, if any.
  std::optional<TxnId> openTxn(ProcessId p) const {
    if (p.value >= procs_.size() || !procs_[p.value].open) return std::nullopt;
    return procs_[p.value].open->txn;
  }

  /// Exact encoding of shared and local state (not the log or the caches).
  void encodeState(std::vector<std::int64_t>& out) const {
    memory_.encodeState(out);
    for (const auto& proc : procs_) {
      out.push_back(proc.open ? 1 : 0);
      if (proc.machine) proc.machine->encode(out);
    }
  }

 private:
  static constexpr int kMaxZeroCostActions = 100000;

  struct OpenTop {
    TxnId txn;
    std::uint32_t top = 0;
    TOpCall call;
  };
  struct Proc {
    std::unique_ptr<StepMachine> machine;
    std::optional<OpenTop> open;
  };

  Memory memory_;
  std::vector<Proc> procs_;
};

/// Runs `machines` over `memory` under `schedule` and returns the log.
inline Execution runSchedule(Memory memory, std::map<ProcessId, std::unique_ptr<StepMachine>> machines,
                             const Schedule& schedule, std::size_t maxSteps) {
  Simulation sim(std::move(memory));
  for (auto& [p, m] : machines) sim.setMachine(p, std::move(m));
  if (schedule.mode == Schedule::Mode::kScripted) {
    for (auto p : schedule.steps) {
      if (!sim.hasMachine(p)) throw Error("scheduled process p" + std::to_string(p.value) + " has no machine");
    }
  }
  sim.run(schedule, maxSteps);
  return sim.memory().takeLog();
}

/// Re-applies every rmw event from the initial configuration; returns a
/// description of the first mismatch, or nothing when the replay agrees.
inline std::optional<std::string> replayMismatch(const Execution& e) {
  Memory mem = Memory::create(e.initialObjects, e.models);
  mem.setLogging(false);
  for (const auto& ev : e.events) {
    if (!ev.isRmw()) continue;
    Event again = mem.apply(ev.process, ev.object, ev.primitive, ev.txn, ev.top);
    if (again.response != ev.response) {
      return "event " + std::to_string(ev.seq) + ": response " + again.response.toString() + " != recorded " +
             ev.response.toString();
    }
    if (again.rmr != ev.rmr) return "event " + std::to_string(ev.seq) + ": RMR verdict differs";
  }
  return std::nullopt;
}

}  // namespace tmlab
