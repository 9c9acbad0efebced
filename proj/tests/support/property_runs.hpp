#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tmlab/check/dap.hpp"
#include "tmlab/check/invisible_reads.hpp"
#include "tmlab/check/progress.hpp"
#include "tmlab/check/serialization.hpp"
#include "tmlab/check/witness.hpp"
#include "tmlab/tm/ref_tm.hpp"
#include "tmlab/tm/sp1_tm.hpp"
#include "tmlab/tm/workload.hpp"

namespace tmlab::fixtures {

struct PropertyTally {
  std::size_t executions = 0;
  std::size_t violations = 0;
  std::vector<std::string> firstFailures;  // capped

  void fail(const std::string& what) {
    ++violations;
    if (firstFailures.size() < 5) firstFailures.push_back(what);
  }
};

/// REF-TM obligations on one finished execution.
inline void checkRefExecution(const Execution& e, PropertyTally& tally, const std::string& tag) {
  ++tally.executions;
  if (auto m = replayMismatch(e)) return tally.fail(tag + ": replay " + *m);
  const History h = deriveHistory(e);
  const auto op = check::checkOpacity(h);
  if (!op.holds()) return tally.fail(tag + ": opacity " + op.reason);
  if (auto bad = check::validateWitness(h, *op.witness, check::Criterion::kOpacity)) {
    return tally.fail(tag + ": witness " + *bad);
  }
  if (!check::checkProgressiveness(h).empty()) return tally.fail(tag + ": progressiveness");
  if (!check::checkWeakDap(e).empty()) return tally.fail(tag + ": weak DAP");
  if (!check::checkInvisibleReads(e, check::InvisibleMode::kWeak).empty()) return tally.fail(tag + ": invisible reads");
}

/// SP1-TM obligations on one finished execution.
inline void checkSp1Execution(const Execution& e, PropertyTally& tally, const std::string& tag) {
  ++tally.executions;
  if (auto m = replayMismatch(e)) return tally.fail(tag + ": replay " + *m);
  const History h = deriveHistory(e);
  const auto ss = check::checkStrictSerializability(h);
  if (!ss.holds()) return tally.fail(tag + ": strict serializability " + ss.reason);
  if (auto bad = check::validateWitness(h, *ss.witness, check::Criterion::kStrictSerializability)) {
    return tally.fail(tag + ": witness " + *bad);
  }
  if (!check::checkStrongProgressiveness(h).holds()) return tally.fail(tag + ": strong progressiveness");
}

/// Workload shape drawn from the seed: at most five transactions so the
/// opacity search stays exhaustive.
inline WorkloadShape refShape(std::uint64_t seed) {
  SplitMix64 rng(seed ^ 0x5eedull);
  WorkloadShape s;
  s.processes = 2 + static_cast<std::uint32_t>(rng.below(2));
  s.txnsPerProcess = s.processes == 2 ? 1 + static_cast<std::uint32_t>(rng.below(2)) : 1;
  s.objects = 2 + static_cast<std::uint32_t>(rng.below(2));
  s.opsPerTxn = 1 + static_cast<std::uint32_t>(rng.below(3));
  return s;
}

inline WorkloadShape sp1Shape(std::uint64_t seed) {
  SplitMix64 rng(seed ^ 0x5b1ull);
  WorkloadShape s;
  s.processes = 2 + static_cast<std::uint32_t>(rng.below(3));
  s.txnsPerProcess = 1 + static_cast<std::uint32_t>(rng.below(2));
  s.objects = 1;
  s.opsPerTxn = 1 + static_cast<std::uint32_t>(rng.below(3));
  return s;
}

inline Execution runRandom(const TmAlgorithm& tm, const WorkloadShape& shape, std::uint64_t seed) {
  auto programs = randomPrograms(seed, shape);
  Simulation sim = makeTmSimulation(tm, std::vector<Value>(shape.objects, Value::integer(0)), programs);
  sim.run(Schedule::random(seed), 100'000);
  return sim.execution();
}

inline PropertyTally randomRefRuns(std::uint64_t seeds, std::uint64_t first = 0) {
  PropertyTally t;
  RefTm tm;
  for (std::uint64_t s = first; s < first + seeds; ++s) {
    checkRefExecution(runRandom(tm, refShape(s), s), t, "ref seed " + std::to_string(s));
  }
  return t;
}

inline PropertyTally randomSp1Runs(std::uint64_t seeds, std::uint64_t first = 0) {
  PropertyTally t;
  Sp1Tm tm;
  for (std::uint64_t s = first; s < first + seeds; ++s) {
    checkSp1Execution(runRandom(tm, sp1Shape(s), s), t, "sp1 seed " + std::to_string(s));
  }
  return t;
}

/// Visits the execution of every interleaving of the simulation's processes.
inline void forEachInterleaving(const Simulation& sim, const std::function<void(const Simulation&)>& visit) {
  bool any = false;
  for (std::uint32_t p = 0; p < sim.processCount(); ++p) {
    if (sim.halted(ProcessId{p})) continue;
    any = true;
    Simulation next = sim;
    next.step(ProcessId{p});
    forEachInterleaving(next, visit);
  }
  if (!any) visit(sim);
}

/// Two-transaction workloads: one transaction per process.
inline std::vector<std::vector<std::vector<TxnScript>>> twoTxnWorkloads(bool singleObject) {
  auto t = [](std::uint64_t k, std::uint32_t p, std::vector<TOpCall> ops) {
    ops.push_back(TOpCall::tryCommit());
    return std::vector<TxnScript>{{TxnId{k, ProcessId{p}}, std::move(ops)}};
  };
  auto R = [](std::uint32_t x) { return TOpCall::read(TObjectId{x}); };
  auto W = [](std::uint32_t x, std::int64_t v) { return TOpCall::write(TObjectId{x}, Value::integer(v)); };
  if (singleObject) {
    return {
        {t(1, 0, {R(0), W(0, 1)}), t(2, 1, {R(0), W(0, 2)})},
        {t(1, 0, {W(0, 1)}), t(2, 1, {W(0, 2)})},
        {t(1, 0, {R(0)}), t(2, 1, {W(0, 2)})},
        {t(1, 0, {R(0), W(0, 1)}), t(2, 1, {R(0)})},
    };
  }
  return {
      {t(1, 0, {R(0), W(1, 1)}), t(2, 1, {R(1), W(0, 2)})},
      {t(1, 0, {W(0, 1)}), t(2, 1, {W(0, 2)})},
      {t(1, 0, {R(0), R(1)}), t(2, 1, {W(0, 1), W(1, 1)})},
      {t(1, 0, {R(0)}), t(2, 1, {W(1, 1)})},
      {t(1, 0, {R(0), W(0, 1)}), t(2, 1, {R(0), W(0, 2)})},
  };
}

inline PropertyTally exhaustiveTwoTxn(const TmAlgorithm& tm, bool ref) {
  PropertyTally tally;
  std::size_t w = 0;
  for (const auto& programs : twoTxnWorkloads(!ref)) {
    const std::uint32_t objects = ref ? 2 : 1;
    Simulation sim = makeTmSimulation(tm, std::vector<Value>(objects, Value::integer(0)), programs);
    const std::string tag = tm.name() + " workload " + std::to_string(w++);
    forEachInterleaving(sim, [&](const Simulation& done) {
      if (ref) {
        checkRefExecution(done.execution(), tally, tag);
      } else {
        checkSp1Execution(done.execution(), tally, tag);
      }
    });
  }
  return tally;
}

}  // namespace tmlab::fixtures
