#include <gtest/gtest.h>

#include "support/builders.hpp"
#include "support/corpus.hpp"
#include "support/oracle.hpp"
#include "support/property_runs.hpp"
#include "support/random_histories.hpp"
#include "support/stub_tms.hpp"
#include "tmlab/check/dap.hpp"
#include "tmlab/check/invisible_reads.hpp"
#include "tmlab/check/progress.hpp"
#include "tmlab/check/liveness.hpp"
#include "tmlab/check/witness.hpp"

using namespace tmlab;
using namespace tmlab::check;
using fixtures::ExecutionBuilder;
using fixtures::HistoryBuilder;

namespace {

TxnId T(std::uint64_t k) { return TxnId{k, ProcessId{static_cast<std::uint32_t>(k)}}; }

TOpCall R(std::uint32_t x) { return TOpCall::read(TObjectId{x}); }
TOpCall W(std::uint32_t x, std::int64_t v) { return TOpCall::write(TObjectId{x}, Value::integer(v)); }

}  // namespace

TEST(Serialization, WriterThenReader) {
  HistoryBuilder b;
  b.write(1, 0, 1).commit(1).read(2, 0, 1).commit(2);
  const auto r = checkStrictSerializability(b.build());
  ASSERT_TRUE(r.holds());
  EXPECT_EQ(r.witness->order, (std::vector<TxnId>{T(1), T(2)}));
}

TEST(Serialization, StaleReadAfterCommitHasNoWitness) {
  HistoryBuilder b;
  b.write(1, 0, 1).commit(1).read(2, 0, 0).commit(2);
  EXPECT_EQ(checkStrictSerializability(b.build()).verdict, Verdict::kNone);
}

TEST(Serialization, WriteSkewIsRejected) {
  HistoryBuilder b;
  b.read(1, 0, 0).read(1, 1, 0).read(2, 0, 0).read(2, 1, 0).write(1, 0, 1).write(2, 1, 1).commit(1).commit(2);
  const History h = b.build();
  EXPECT_EQ(checkStrictSerializability(h).verdict, Verdict::kNone);
  EXPECT_EQ(checkOpacity(h).verdict, Verdict::kNone);
}

TEST(Serialization, CommitPendingMayBeCommitted) {
  HistoryBuilder b;
  b.write(1, 0, 1).commitPending(1).read(2, 0, 1).commit(2);
  const auto r = checkOpacity(b.build());
  ASSERT_TRUE(r.holds());
  EXPECT_EQ(r.witness->completions.at(1), Completion::kCommit);
}

TEST(Serialization, CommitPendingMayBeAborted) {
  HistoryBuilder b;
  b.write(1, 0, 1).commitPending(1).read(2, 0, 0).commit(2);
  const auto r = checkOpacity(b.build());
  ASSERT_TRUE(r.holds());
  EXPECT_EQ(r.witness->completions.at(1), Completion::kAbort);
}

TEST(Opacity, AbortedReaderMustSeeConsistentState) {
  HistoryBuilder b;
  b.read(1, 0, 0).write(2, 0, 1).write(2, 1, 1).commit(2).read(1, 1, 1).abort(1);
  const History h = b.build();
  EXPECT_TRUE(checkStrictSerializability(h).holds());
  EXPECT_EQ(checkOpacity(h).verdict, Verdict::kNone);
}

TEST(Opacity, ForbiddenFinalReadIsRejected) {
  // T3 saw X0 before T1 overwrote it, then sees X1 from T2, which read T1.
  HistoryBuilder b;
  b.read(3, 0, 0).write(1, 0, 1).commit(1).read(2, 0, 1).write(2, 1, 1).commit(2).read(3, 1, 1);
  EXPECT_EQ(checkOpacity(b.build()).verdict, Verdict::kNone);
}

TEST(Serialization, RefusesAboveBound) {
  HistoryBuilder b;
  for (std::uint64_t k = 1; k <= 9; ++k) b.read(k, 0, 0).commit(k);
  const History h = b.build();
  EXPECT_EQ(checkOpacity(h).verdict, Verdict::kRefused);
  EXPECT_EQ(checkStrictSerializability(h).verdict, Verdict::kRefused);
  EXPECT_TRUE(checkOpacity(h, 9).holds());
}

TEST(Corpus, EveryLabelMatches) {
  const auto corpus = fixtures::labeledCorpus();
  ASSERT_GE(corpus.size(), 20u);
  for (const auto& c : corpus) {
    EXPECT_EQ(checkStrictSerializability(c.history).holds(), c.strictlySerializable) << c.name;
    EXPECT_EQ(checkOpacity(c.history).holds(), c.opaque) << c.name;
  }
}

TEST(Corpus, OracleAgrees) {
  for (const auto& c : fixtures::labeledCorpus()) {
    EXPECT_EQ(fixtures::bruteForceSerializable(c.history, Criterion::kStrictSerializability), c.strictlySerializable)
        << c.name;
    EXPECT_EQ(fixtures::bruteForceSerializable(c.history, Criterion::kOpacity), c.opaque) << c.name;
  }
}

TEST(Corpus, WitnessesValidate) {
  for (const auto& c : fixtures::labeledCorpus()) {
    for (auto crit : {Criterion::kStrictSerializability, Criterion::kOpacity}) {
      const auto r = check::detail::search(c.history, crit, kDefaultSerializationBound);
      if (!r.witness) continue;
      const auto problem = validateWitness(c.history, *r.witness, crit);
      EXPECT_FALSE(problem.has_value()) << c.name << ": " << *problem;
    }
  }
}

TEST(RandomHistories, SearchAgreesWithOracle) {
  std::size_t positives = 0;
  const std::size_t runs = 3000;
  for (std::uint64_t seed = 0; seed < runs; ++seed) {
    const History h = fixtures::randomHistory(seed);
    for (auto crit : {Criterion::kStrictSerializability, Criterion::kOpacity}) {
      const auto r = check::detail::search(h, crit, kDefaultSerializationBound);
      ASSERT_NE(r.verdict, Verdict::kRefused);
      EXPECT_EQ(r.holds(), fixtures::bruteForceSerializable(h, crit)) << "seed " << seed;
      if (r.witness) {
        const auto problem = validateWitness(h, *r.witness, crit);
        EXPECT_FALSE(problem.has_value()) << "seed " << seed << ": " << *problem;
      }
      positives += r.holds();
    }
  }
  // Both outcomes must be well represented for the agreement to mean much.
  EXPECT_GT(positives, runs / 4);
  EXPECT_LT(positives, 2 * runs - runs / 4);
}

TEST(RandomHistories, OpacityImpliesStrictSerializability) {
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    const History h = fixtures::randomHistory(seed);
    if (checkOpacity(h).holds()) EXPECT_TRUE(checkStrictSerializability(h).holds()) << "seed " << seed;
  }
}

TEST(RandomHistories, EquivalentWithoutAborts) {
  std::size_t compared = 0;
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    const History h = fixtures::randomHistory(seed);
    bool clean = true;
    for (const auto& t : h.txns()) clean = clean && t.committed();
    if (!clean) continue;
    ++compared;
    EXPECT_EQ(checkOpacity(h).holds(), checkStrictSerializability(h).holds()) << "seed " << seed;
  }
  EXPECT_GT(compared, 50u);
}

TEST(WitnessValidator, RejectsBrokenWitnesses) {
  HistoryBuilder b;
  b.write(1, 0, 1).commit(1).read(2, 0, 1).commit(2);
  const History h = b.build();
  SerializationWitness reversed{{T(2), T(1)}, {}};
  EXPECT_TRUE(validateWitness(h, reversed, Criterion::kStrictSerializability).has_value());
  SerializationWitness missing{{T(1)}, {}};
  EXPECT_TRUE(validateWitness(h, missing, Criterion::kStrictSerializability).has_value());
  SerializationWitness good{{T(1), T(2)}, {}};
  EXPECT_FALSE(validateWitness(h, good, Criterion::kStrictSerializability).has_value());
}

TEST(Progressiveness, AbortWithoutConflictIsReported) {
  HistoryBuilder b;
  b.read(1, 0, 0).read(2, 1, 0).abort(1).commit(2);
  EXPECT_EQ(checkProgressiveness(b.build()), std::vector<TxnId>{T(1)});
}

TEST(Progressiveness, AbortWithConcurrentConflictIsFine) {
  HistoryBuilder b;
  b.read(1, 0, 0).write(2, 0, 1).abort(1).commit(2);
  EXPECT_TRUE(checkProgressiveness(b.build()).empty());
}

TEST(Progressiveness, ConflictMustBeConcurrent) {
  HistoryBuilder b;
  b.write(2, 0, 1).commit(2).read(1, 0, 1).abort(1);
  EXPECT_EQ(checkProgressiveness(b.build()), std::vector<TxnId>{T(1)});
}

TEST(StrongProgressiveness, AllAbortOnOneObject) {
  HistoryBuilder b;
  b.write(1, 0, 1).write(2, 0, 2).abort(1).abort(2);
  const auto r = checkStrongProgressiveness(b.build());
  ASSERT_FALSE(r.holds());
  EXPECT_EQ(r.violations.at(0).cobj, std::set<TObjectId>{TObjectId{0}});
}

TEST(StrongProgressiveness, OneCommitSuffices) {
  HistoryBuilder b;
  b.write(1, 0, 1).write(2, 0, 2).commit(1).abort(2);
  EXPECT_TRUE(checkStrongProgressiveness(b.build()).holds());
}

TEST(StrongProgressiveness, TwoObjectConflictsAreExempt) {
  HistoryBuilder b;
  b.read(1, 0, 0).read(2, 1, 0).write(1, 1, 1).write(2, 0, 1).abort(1).abort(2);
  EXPECT_TRUE(checkStrongProgressiveness(b.build()).holds());
}

TEST(StrongProgressiveness, RefusesAboveBound) {
  HistoryBuilder b;
  for (std::uint64_t k = 1; k <= 13; ++k) b.read(k, 0, 0).commit(k);
  EXPECT_TRUE(checkStrongProgressiveness(b.build()).refused);
}

TEST(ConflictGraphs, SymmetricAndReflectsPaths) {
  HistoryBuilder b;
  b.read(1, 0, 0).write(3, 0, 1).write(3, 1, 1).read(2, 1, 0);
  const History h = b.build();
  EXPECT_EQ(conflictGraph(h, T(1), T(2)), conflictGraph(h, T(2), T(1)));
  // T3 links X0 and X1, so T1 and T2 are not disjoint-access.
  EXPECT_FALSE(disjointAccess(HistoryPrefix(h), T(1), T(2)));
  HistoryBuilder c;
  c.read(1, 0, 0).read(2, 1, 0);
  EXPECT_TRUE(disjointAccess(HistoryPrefix(c.build()), T(1), T(2)));
}

TEST(WeakDap, DisjointWritersOnOneBaseObject) {
  ExecutionBuilder b(1);
  b.invoke(1, 1, W(0, 1)).respond(1, 1, Outcome::ok());
  b.invoke(2, 2, W(1, 1)).respond(2, 2, Outcome::ok());
  b.invoke(1, 1, TOpCall::tryCommit()).invoke(2, 2, TOpCall::tryCommit());
  b.step(1, 1, 0, PrimitiveOp::write(Value::integer(1))).step(2, 2, 0, PrimitiveOp::write(Value::integer(2)));
  const auto v = checkWeakDap(b.build());
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].object, BaseObjectId{0});
}

TEST(WeakDap, ReadersMayShareAnObject) {
  ExecutionBuilder b(1);
  b.invoke(1, 1, R(0)).invoke(2, 2, R(1));
  b.step(1, 1, 0, PrimitiveOp::read()).step(2, 2, 0, PrimitiveOp::read());
  EXPECT_TRUE(checkWeakDap(b.build()).empty());
}

TEST(WeakDap, SharedTObjectExcuses) {
  ExecutionBuilder b(1);
  b.invoke(1, 1, W(0, 1)).respond(1, 1, Outcome::ok());
  b.invoke(2, 2, W(0, 2)).respond(2, 2, Outcome::ok());
  b.invoke(1, 1, TOpCall::tryCommit()).invoke(2, 2, TOpCall::tryCommit());
  b.step(1, 1, 0, PrimitiveOp::write(Value::integer(1))).step(2, 2, 0, PrimitiveOp::write(Value::integer(2)));
  EXPECT_TRUE(checkWeakDap(b.build()).empty());
}

TEST(InvisibleReads, VisibleStubViolatesBothModes) {
  Simulation sim = makeTmSimulation(fixtures::StubTm(fixtures::StubFlaw::kVisibleReads), {Value::integer(0)},
                                    {{{TxnId{1, ProcessId{0}}, {R(0), TOpCall::tryCommit()}}}});
  sim.run(Schedule::roundRobin(), 100);
  EXPECT_EQ(checkInvisibleReads(sim.execution(), InvisibleMode::kWeak).size(), 1u);
  EXPECT_EQ(checkInvisibleReads(sim.execution(), InvisibleMode::kStrong).size(), 1u);
}

TEST(InvisibleReads, ConcurrentVisibleReadPassesWeakOnly) {
  ExecutionBuilder b(1);
  b.invoke(1, 1, R(0)).invoke(2, 2, TOpCall::tryCommit());
  b.step(1, 1, 0, PrimitiveOp::fetchAdd(0)).respond(1, 1, Outcome::of(Value::integer(0)));
  b.respond(2, 2, Outcome::commit());
  const Execution e = b.build();
  EXPECT_TRUE(checkInvisibleReads(e, InvisibleMode::kWeak).empty());
  EXPECT_EQ(checkInvisibleReads(e, InvisibleMode::kStrong).size(), 1u);
}

TEST(InvisibleReads, WriteStepsOutsideReadsAreIgnored) {
  ExecutionBuilder b(1);
  b.invoke(1, 1, R(0)).step(1, 1, 0, PrimitiveOp::read()).respond(1, 1, Outcome::of(Value::integer(0)));
  b.invoke(1, 1, TOpCall::tryCommit()).step(1, 1, 0, PrimitiveOp::write(Value::integer(0)));
  b.respond(1, 1, Outcome::commit());
  EXPECT_TRUE(checkInvisibleReads(b.build(), InvisibleMode::kStrong).empty());
}

TEST(StubControls, AlwaysAbortFailsSequentialProgress) {
  const auto v = checkSequentialProgress(fixtures::StubTm(fixtures::StubFlaw::kAlwaysAbort), {{{Value::integer(0)}, {W(0, 1)}}});
  ASSERT_EQ(v.size(), 1u);
  EXPECT_FALSE(v[0].pass);
}

TEST(Exhaustive, TwoTransactionInterleavings) {
  const auto ref = fixtures::exhaustiveTwoTxn(RefTm(), true);
  EXPECT_GT(ref.executions, 100u);
  EXPECT_EQ(ref.violations, 0u) << (ref.firstFailures.empty() ? "" : ref.firstFailures.front());
  const auto sp1 = fixtures::exhaustiveTwoTxn(Sp1Tm(), false);
  EXPECT_GT(sp1.executions, 20u);
  EXPECT_EQ(sp1.violations, 0u) << (sp1.firstFailures.empty() ? "" : sp1.firstFailures.front());
}
