#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "tmlab/mutex/mutex.hpp"

namespace tmlab::mutex {

using PerModel = std::array<std::uint64_t, 3>;

struct MutexConfig {
  std::uint32_t n = 2;
  std::uint32_t passes = 3;
  Schedule schedule = Schedule::roundRobin();
  std::size_t maxTurns = 1'000'000;
  std::vector<MemoryModel> models = allMemoryModels();
};

struct MutexResult {
  bool mutualExclusion = true;
  std::optional<std::size_t> violationTurn;
  bool allFinished = false;
  std::vector<std::uint32_t> passesDone;
  std::size_t turns = 0;
  std::uint64_t passages = 0;
  PerModel maxNonTmPerPassage{};  // Entry plus Exit, TM events excluded
  PerModel totalNonTm{};
  PerModel spinRmr{};
  PerModel tmRmr{};
  std::uint32_t maxExitEvents = 0;  // shared-memory events between "exit" and "exit-ok"
  RmrReport nonTm;  // per-process totals outside t-operations
  Execution execution;

  bool ok() const { return mutualExclusion && allFinished; }
};

inline std::shared_ptr<const MutexShared> installMutex(Memory& mem, std::uint32_t n) {
  return std::make_shared<const MutexShared>(MutexShared::install(mem, n));
}

inline Simulation makeMutexSimulation(std::uint32_t n, std::uint32_t passes,
                                      std::vector<MemoryModel> models = allMemoryModels()) {
  Memory mem(std::move(models));
  auto shared = installMutex(mem, n);
  Simulation sim(std::move(mem));
  for (std::uint32_t p = 0; p < n; ++p) {
    sim.setMachine(ProcessId{p}, std::make_unique<MutexMachine>(shared, ProcessId{p}, passes));
  }
  return sim;
}

inline const MutexMachine& mutexMachine(const Simulation& sim, ProcessId p) {
  return static_cast<const MutexMachine&>(sim.machine(p));
}

inline std::uint32_t occupancy(const Simulation& sim) {
  std::uint32_t in = 0;
  for (std::uint32_t p = 0; p < sim.processCount(); ++p) in += mutexMachine(sim, ProcessId{p}).inCriticalSection();
  return in;
}

/// Per-passage accounting from the log: a passage starts at "enter" and
/// ends at "exit-ok".
inline void accountPassages(const Execution& e, std::uint32_t n, MutexResult& r) {
  struct Open {
    PerModel nonTm{};
    bool inExit = false;
    std::uint32_t exitEvents = 0;
    bool active = false;
  };
  std::vector<Open> open(n);
  auto close = [&](Open& o) {
    for (std::size_t m = 0; m < 3; ++m) r.maxNonTmPerPassage[m] = std::max(r.maxNonTmPerPassage[m], o.nonTm[m]);
    r.maxExitEvents = std::max(r.maxExitEvents, o.exitEvents);
    ++r.passages;
    o = Open{};
  };
  for (const auto& ev : e.events) {
    auto& o = open.at(ev.process.value);
    if (ev.kind == EventKind::kMarker) {
      if (ev.label == "enter") o.active = true;
      if (ev.label == "exit") o.inExit = true;
      if (ev.label == "exit-ok") close(o);
      continue;
    }
    if (!ev.isRmw()) continue;
    for (auto m : e.models) {
      const auto i = static_cast<std::size_t>(m);
      const auto c = ev.rmrUnder(m);
      if (ev.isTm()) {
        r.tmRmr[i] += c;
      } else {
        o.nonTm[i] += c;
        r.totalNonTm[i] += c;
        if (ev.label == "spin") r.spinRmr[i] += c;
      }
    }
    if (o.inExit && !ev.isTm()) ++o.exitEvents;
  }
}

/// Every process runs `passes` rounds of Entry, CS, Exit under the schedule;
/// mutual exclusion is checked after every turn and the run stops at the
/// first violation.
inline MutexResult runMutexExperiment(const MutexConfig& cfg) {
  Simulation sim = makeMutexSimulation(cfg.n, cfg.passes, cfg.models);
  MutexResult r;
  std::size_t turn = 0;
  const auto summary = sim.run(cfg.schedule, cfg.maxTurns, [&] {
    ++turn;
    if (occupancy(sim) <= 1) return true;
    r.mutualExclusion = false;
    r.violationTurn = turn;
    return false;
  });
  r.turns = summary.turns;
  r.allFinished = r.mutualExclusion;
  for (std::uint32_t p = 0; p < cfg.n; ++p) {
    const auto& m = mutexMachine(sim, ProcessId{p});
    r.passesDone.push_back(m.passesDone());
    r.allFinished = r.allFinished && m.passesDone() == cfg.passes;
  }
  r.nonTm = sim.memory().rmrReport(RmrFilter::kNonTmOnly);
  r.nonTm.perProcess.resize(cfg.n, {0, 0, 0});
  r.execution = sim.memory().takeLog();
  accountPassages(r.execution, cfg.n, r);
  return r;
}

struct ExplorationResult {
  std::size_t states = 0;
  std::size_t transitions = 0;
  std::size_t terminal = 0;   // states where every process finished
  std::size_t stuck = 0;      // states from which no terminal state is reachable
  bool mutualExclusion = true;
  bool complete = true;       // false when the state bound cut the search
  std::vector<ProcessId> counterexample;  // schedule reaching a violation

  bool ok() const { return mutualExclusion && complete && stuck == 0 && terminal > 0; }
};

/// Explores every interleaving of n processes running `passes` passages,
/// merging identical configurations.
inline ExplorationResult exploreMutex(std::uint32_t n = 2, std::uint32_t passes = 2,
                                      std::size_t maxStates = 2'000'000) {
  ExplorationResult r;
  Simulation root = makeMutexSimulation(n, passes);
  root.memory().setLogging(false);

  struct Node {
    std::size_t parent = SIZE_MAX;
    ProcessId via;
  };
  std::unordered_map<std::string, std::size_t> ids;
  std::vector<Node> nodes;
  std::vector<std::vector<std::size_t>> preds;
  std::vector<bool> terminal;

  auto key = [](const Simulation& s) {
    std::vector<std::int64_t> v;
    s.encodeState(v);
    return std::string(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(std::int64_t));
  };
  auto pathTo = [&](std::size_t id, ProcessId last) {
    std::vector<ProcessId> path{last};
    for (; nodes[id].parent != SIZE_MAX; id = nodes[id].parent) path.push_back(nodes[id].via);
    std::reverse(path.begin(), path.end());
    return path;
  };

  std::vector<std::pair<Simulation, std::size_t>> stack;
  ids.emplace(key(root), 0);
  nodes.push_back({});
  preds.emplace_back();
  terminal.push_back(root.allHalted());
  stack.emplace_back(root, 0);

  while (!stack.empty()) {
    auto [sim, id] = std::move(stack.back());
    stack.pop_back();
    for (std::uint32_t p = 0; p < n; ++p) {
      const ProcessId pid{p};
      if (sim.halted(pid)) continue;
      Simulation next = sim;
      next.step(pid);
      ++r.transitions;
      if (occupancy(next) > 1) {
        r.mutualExclusion = false;
        r.counterexample = pathTo(id, pid);
        r.states = nodes.size();
        return r;
      }
      auto k = key(next);
      auto [it, fresh] = ids.emplace(std::move(k), nodes.size());
      if (fresh) {
        if (nodes.size() >= maxStates) {
          r.complete = false;
          ids.erase(it);
          continue;
        }
        nodes.push_back({id, pid});
        preds.emplace_back();
        terminal.push_back(next.allHalted());
        stack.emplace_back(std::move(next), it->second);
      }
      preds[it->second].push_back(id);
    }
  }
  r.states = nodes.size();

  // Backward reachability from terminal states.
  std::vector<bool> live(nodes.size(), false);
  std::vector<std::size_t> work;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (terminal[i]) {
      live[i] = true;
      work.push_back(i);
      ++r.terminal;
    }
  }
  while (!work.empty()) {
    const auto i = work.back();
    work.pop_back();
    for (auto q : preds[i]) {
      if (!live[q]) {
        live[q] = true;
        work.push_back(q);
      }
    }
  }
  r.stuck = static_cast<std::size_t>(std::count(live.begin(), live.end(), false));
  return r;
}

}  // namespace tmlab::mutex
