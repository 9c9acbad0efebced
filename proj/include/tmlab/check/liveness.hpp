#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tmlab/tm/algorithm.hpp"

namespace tmlab::check {

/// One transaction run alone from the initial configuration.
struct Workload {
  std::vector<Value> initial;
  std::vector<TOpCall> ops;  // tryC is appended when missing
};

struct ProgressVerdict {
  bool pass = false;
  std::size_t steps = 0;
  std::string diagnostics;
};

inline constexpr std::size_t kDefaultStepBudget = 1'000'000;

/// Each workload must commit when run step contention-free from a
/// t-quiescent configuration.
inline std::vector<ProgressVerdict> checkSequentialProgress(const TmAlgorithm& tm, const std::vector<Workload>& workloads,
                                                            std::size_t budget = kDefaultStepBudget) {
  std::vector<ProgressVerdict> out;
  for (const auto& w : workloads) {
    TxnScript script{TxnId{1, ProcessId{0}}, w.ops};
    if (script.ops.empty() || script.ops.back().kind != TOpKind::kTryCommit) script.ops.push_back(TOpCall::tryCommit());
    Simulation sim = makeTmSimulation(tm, w.initial, {{script}});
    const auto run = sim.run(Schedule::roundRobin(), budget);
    ProgressVerdict v;
    v.steps = sim.execution().rmwCount();
    const auto& m = static_cast<const TxnProgramMachine&>(sim.machine(ProcessId{0}));
    if (!run.allHalted) {
      v.diagnostics = "step budget of " + std::to_string(budget) + " exhausted";
    } else if (m.outcomes().empty() || !m.outcomes().back().isCommit()) {
      v.diagnostics = "solo transaction did not commit after " + std::to_string(m.outcomes().size()) + " t-operations";
    } else {
      v.pass = true;
    }
    out.push_back(std::move(v));
  }
  return out;
}

/// From a quiescent configuration, every process's next t-operation run step
/// contention-free must return. `sim` is left untouched.
inline ProgressVerdict checkIcfLiveness(const Simulation& sim, std::size_t budget = kDefaultStepBudget) {
  ProgressVerdict v;
  for (std::uint32_t p = 0; p < sim.processCount(); ++p) {
    if (sim.openTxn(ProcessId{p})) {
      v.diagnostics = "configuration is not quiescent: p" + std::to_string(p) + " is inside a t-operation";
      return v;
    }
  }
  for (std::uint32_t p = 0; p < sim.processCount(); ++p) {
    const ProcessId pid{p};
    if (sim.halted(pid)) continue;
    Simulation solo = sim;
    const auto before = solo.execution().events.size();
    bool invoked = false, returned = false;
    std::size_t turns = 0;
    while (!returned && turns < budget && !solo.halted(pid)) {
      solo.step(pid);
      ++turns;
      const auto& events = solo.execution().events;
      for (std::size_t i = before; i < events.size(); ++i) {
        if (events[i].kind == EventKind::kInvoke) invoked = true;
        if (events[i].kind == EventKind::kRespond && invoked) returned = true;
      }
    }
    v.steps = std::max(v.steps, turns);
    if (invoked && !returned) {
      v.diagnostics = "p" + std::to_string(p) + "'s t-operation did not return within " + std::to_string(budget) + " turns";
      return v;
    }
  }
  v.pass = true;
  return v;
}

}  // namespace tmlab::check
