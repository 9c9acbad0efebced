#include <gtest/gtest.h>

#include "tmlab/lb/families.hpp"
#include "tmlab/tm/ref_tm.hpp"

using namespace tmlab;
using namespace tmlab::lb;

TEST(NewValueFamily, FirstReadSeesTheWriter) {
  const auto run = buildLemma2Execution(RefTm(), 1);
  ASSERT_TRUE(run.ok()) << run.failure;
  EXPECT_EQ(*run.read, Outcome::of(newValue(1)));
  EXPECT_EQ(classify(run.read, 1), ReadVariant::kNewValue);
}

TEST(NewValueFamily, WithoutWriterReadsInitial) {
  const auto run = buildLemma2Execution(RefTm(), 3, false);
  ASSERT_TRUE(run.ok()) << run.failure;
  EXPECT_EQ(classify(run.read, 3), ReadVariant::kInitial);
}

TEST(NewValueFamily, EveryIndexReadsNewValueAndIsOpaque) {
  for (std::uint32_t i = 1; i <= 8; ++i) {
    const auto run = buildLemma2Execution(RefTm(), i);
    ASSERT_TRUE(run.ok()) << "i=" << i << ": " << run.failure;
    EXPECT_EQ(classify(run.read, i), ReadVariant::kNewValue) << "i=" << i;
    EXPECT_TRUE(check::checkOpacity(deriveHistory(run.execution)).holds()) << "i=" << i;
    EXPECT_GE(run.readCost.objects.size(), i - 1) << "i=" << i;
  }
}

TEST(NewValueFamily, RejectsIndexZero) { EXPECT_THROW(buildLemma2Execution(RefTm(), 0), Error); }

TEST(StaleReadFamily, ReadReturnsInitialOrAborts) {
  for (std::uint32_t i = 2; i <= 5; ++i) {
    for (std::uint32_t l = 1; l < i; ++l) {
      const auto run = buildTheorem3Execution(RefTm(), i, l);
      ASSERT_TRUE(run.ok()) << "i=" << i << " l=" << l << ": " << run.failure;
      const auto v = classify(run.read, i);
      EXPECT_TRUE(v == ReadVariant::kInitial || v == ReadVariant::kAbort) << "i=" << i << " l=" << l;
      EXPECT_TRUE(check::checkOpacity(deriveHistory(run.execution)).holds()) << "i=" << i << " l=" << l;
    }
  }
}

TEST(StaleReadFamily, DisjointWritersDoNotContend) {
  for (std::uint32_t i = 2; i <= 5; ++i) {
    for (std::uint32_t l = 1; l < i; ++l) {
      EXPECT_TRUE(buildTheorem3Execution(RefTm(), i, l).contention.empty()) << "i=" << i << " l=" << l;
    }
  }
}

TEST(StaleReadFamily, WithoutBetaReadsNewValue) {
  const auto run = buildTheorem3Execution(RefTm(), 4, std::nullopt);
  ASSERT_TRUE(run.ok()) << run.failure;
  EXPECT_EQ(classify(run.read, 4), ReadVariant::kNewValue);
}

TEST(StaleReadFamily, ForbiddenOutcomeHasNoSerialization) {
  for (std::uint32_t i = 2; i <= 5; ++i) {
    for (std::uint32_t l = 1; l < i; ++l) {
      const History h = forbiddenFinalRead(i, l);
      EXPECT_EQ(check::checkOpacity(h).verdict, check::Verdict::kNone) << "i=" << i << " l=" << l;
    }
  }
}

TEST(StaleReadFamily, RejectsBadIndices) {
  EXPECT_THROW(buildTheorem3Execution(RefTm(), 3, 0u), Error);
  EXPECT_THROW(buildTheorem3Execution(RefTm(), 3, 3u), Error);
}

TEST(Quadratic, TotalsMeetTheBound) {
  for (std::uint32_t m : {2u, 4u, 6u, 8u}) {
    const auto rep = measureQuadratic(RefTm(), m);
    EXPECT_TRUE(rep.pass()) << "m=" << m;
    EXPECT_EQ(rep.rows.size(), m);
    EXPECT_EQ(rep.summary.analyticBound, std::uint64_t{m} * (m - 1) / 2);
    EXPECT_GE(rep.summary.steps, rep.summary.analyticBound);
  }
}

TEST(Quadratic, PerReadCostDoesNotShrink) {
  const auto rep = measureQuadratic(RefTm(), 8);
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    EXPECT_GE(rep.rows[i].steps, rep.rows[i - 1].steps);
    EXPECT_GE(rep.rows[i].distinctObjects, rep.rows[i].analyticBound);
  }
}

TEST(FinalReadSpace, MaxReachesBound) {
  for (std::uint32_t m : {2u, 4u, 8u}) {
    const auto rep = measureFinalReadSpace(RefTm(), m);
    EXPECT_TRUE(rep.pass()) << "m=" << m;
    EXPECT_EQ(rep.rows.size(), m);  // l = 1..m-1 plus the run without beta
    EXPECT_GE(rep.summary.distinctObjects, m - 1);
  }
}

TEST(FinalReadSpace, NewValueAfterBetaForcesAbort) {
  for (std::uint32_t l = 1; l < 4; ++l) {
    const auto run = buildFinalReadExecution(RefTm(), 4, l);
    ASSERT_TRUE(run.ok()) << run.failure;
    if (classify(run.read, 4) == ReadVariant::kNewValue) {
      ASSERT_TRUE(run.tryC.has_value());
      EXPECT_TRUE(run.tryC->isAbort());
    }
  }
}

TEST(FinalReadSpace, RejectsTinyM) { EXPECT_THROW(measureFinalReadSpace(RefTm(), 1), Error); }
