#include <gtest/gtest.h>

#include "tmlab/mutex/experiment.hpp"

using namespace tmlab;
using namespace tmlab::mutex;

namespace {

constexpr ProcessId P0{0};
constexpr ProcessId P1{1};

void untilCs(Simulation& sim, ProcessId p) {
  for (int guard = 0; !mutexMachine(sim, p).inCriticalSection(); ++guard) {
    ASSERT_LT(guard, 10'000);
    sim.step(p);
  }
}

std::size_t spinsOf(const Execution& e, ProcessId p) {
  std::size_t n = 0;
  for (const auto& ev : e.events) n += ev.isRmw() && ev.process == p && ev.label == "spin";
  return n;
}

std::uint64_t spinRmr(const Execution& e, ProcessId p, MemoryModel m) {
  std::uint64_t n = 0;
  for (const auto& ev : e.events) {
    if (ev.isRmw() && ev.process == p && ev.label == "spin") n += static_cast<std::uint64_t>(ev.rmrUnder(m));
  }
  return n;
}

}  // namespace

TEST(FaceValues, DistinctPerProcessAndFace) {
  std::set<std::string> seen;
  for (std::uint32_t p = 0; p < 4; ++p) {
    for (int f = 0; f < 2; ++f) EXPECT_TRUE(seen.insert(faceValue(ProcessId{p}, f).toString()).second);
  }
}

TEST(Entry, SoloProcessEntersWithoutSpinning) {
  Simulation sim = makeMutexSimulation(2, 1);
  untilCs(sim, P0);
  EXPECT_EQ(spinsOf(sim.execution(), P0), 0u);
  EXPECT_EQ(mutexMachine(sim, P0).attempts(), 1u);
}

TEST(Entry, WaitsWhileAnotherIsInside) {
  Simulation sim = makeMutexSimulation(2, 1);
  untilCs(sim, P0);
  for (int i = 0; i < 60; ++i) sim.step(P1);
  EXPECT_FALSE(mutexMachine(sim, P1).inCriticalSection());
  EXPECT_GT(spinsOf(sim.execution(), P1), 10u);
  // The spin variable is local to the spinner under DSM and cached under CC.
  EXPECT_EQ(spinRmr(sim.execution(), P1, MemoryModel::kDsm), 0u);
  EXPECT_LE(spinRmr(sim.execution(), P1, MemoryModel::kWriteBack), 1u);
  while (!sim.halted(P0)) sim.step(P0);
  untilCs(sim, P1);
  EXPECT_EQ(occupancy(sim), 1u);
}

TEST(Exploration, TwoProcessesExhaustive) {
  const auto r = exploreMutex(2, 2);
  EXPECT_TRUE(r.complete);
  EXPECT_TRUE(r.mutualExclusion);
  EXPECT_EQ(r.stuck, 0u);
  EXPECT_GT(r.terminal, 0u);
  EXPECT_GT(r.states, 1000u);
}

TEST(Experiment, RoundRobinFinishes) {
  for (std::uint32_t n = 2; n <= 5; ++n) {
    MutexConfig cfg;
    cfg.n = n;
    cfg.passes = 3;
    const auto r = runMutexExperiment(cfg);
    EXPECT_TRUE(r.ok()) << "n=" << n;
    EXPECT_EQ(r.passages, 3ull * n);
    for (auto d : r.passesDone) EXPECT_EQ(d, 3u);
  }
}

TEST(Experiment, RandomSchedulesKeepExclusion) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    MutexConfig cfg;
    cfg.n = 3;
    cfg.passes = 2;
    cfg.schedule = Schedule::random(seed);
    const auto r = runMutexExperiment(cfg);
    EXPECT_TRUE(r.ok()) << "seed " << seed;
  }
}

TEST(Experiment, DsmSpinIsLocal) {
  for (std::uint32_t n : {2u, 4u, 8u, 16u}) {
    MutexConfig cfg;
    cfg.n = n;
    const auto r = runMutexExperiment(cfg);
    ASSERT_TRUE(r.ok()) << "n=" << n;
    EXPECT_EQ(r.spinRmr[static_cast<std::size_t>(MemoryModel::kDsm)], 0u) << "n=" << n;
  }
}

TEST(Experiment, CcOverheadIsConstant) {
  PerModel small{};
  for (std::uint32_t n : {2u, 4u, 8u, 16u}) {
    MutexConfig cfg;
    cfg.n = n;
    const auto r = runMutexExperiment(cfg);
    ASSERT_TRUE(r.ok());
    for (auto m : {MemoryModel::kWriteThrough, MemoryModel::kWriteBack}) {
      const auto i = static_cast<std::size_t>(m);
      EXPECT_LE(r.maxNonTmPerPassage[i], 12u) << "n=" << n;
      // Small n fixes the ceiling; larger n must not exceed it.
      if (n <= 4) small[i] = std::max(small[i], r.maxNonTmPerPassage[i]);
      EXPECT_LE(r.maxNonTmPerPassage[i], small[i]) << "n=" << n;
    }
  }
}

TEST(Experiment, ExitIsShort) {
  MutexConfig cfg;
  cfg.n = 4;
  const auto r = runMutexExperiment(cfg);
  ASSERT_TRUE(r.ok());
  EXPECT_GT(r.maxExitEvents, 0u);
  EXPECT_LE(r.maxExitEvents, 3u);
}

TEST(Experiment, ModelSubset) {
  MutexConfig cfg;
  cfg.models = {MemoryModel::kWriteBack};
  const auto r = runMutexExperiment(cfg);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.spinRmr[static_cast<std::size_t>(MemoryModel::kDsm)], 0u);
  EXPECT_GT(r.totalNonTm[static_cast<std::size_t>(MemoryModel::kWriteBack)], 0u);
}

TEST(Experiment, TurnBudgetLeavesRunUnfinished) {
  MutexConfig cfg;
  cfg.n = 3;
  cfg.maxTurns = 10;
  const auto r = runMutexExperiment(cfg);
  EXPECT_TRUE(r.mutualExclusion);
  EXPECT_FALSE(r.allFinished);
}
