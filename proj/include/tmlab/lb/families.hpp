#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tmlab/check/serialization.hpp"
#include "tmlab/tm/algorithm.hpp"
#include "tmlab/tm/history.hpp"

namespace tmlab::lb {

// T_phi runs on p0, the writer of X_l on p1, the writer of X_i on p2.
inline constexpr ProcessId kReader{0};
inline constexpr ProcessId kBetaWriter{1};
inline constexpr ProcessId kRhoWriter{2};
inline constexpr std::uint64_t kPhi = 1'000'000;

inline constexpr std::int64_t kInitialValue = 0;
inline Value newValue(std::uint32_t i) { return Value::integer(static_cast<std::int64_t>(i) + 1000); }

/// Steps and footprint of one t-operation.
struct OpCost {
  std::uint64_t steps = 0;
  std::set<BaseObjectId> objects;
};

inline OpCost costOf(const Execution& e, TxnId txn, std::uint32_t top) {
  OpCost c;
  for (const auto& ev : e.events) {
    if (ev.isRmw() && ev.txn && *ev.txn == txn && ev.top == top) {
      ++c.steps;
      c.objects.insert(ev.object);
    }
  }
  return c;
}

/// Base objects on which events of `a` and `b` contend (same object, at
/// least one nontrivial).
inline std::set<BaseObjectId> contention(const Execution& e, TxnId a, TxnId b) {
  std::set<BaseObjectId> out;
  for (const auto& x : e.events) {
    if (!x.isRmw() || !x.txn || *x.txn != a) continue;
    for (const auto& y : e.events) {
      if (y.isRmw() && y.txn && *y.txn == b && y.object == x.object && (x.isNontrivial() || y.isNontrivial())) {
        out.insert(x.object);
      }
    }
  }
  return out;
}

struct FamilyRun {
  Execution execution;
  std::optional<Outcome> read;   // outcome of T_phi's measured read
  std::optional<Outcome> tryC;   // T_phi's tryC, when run
  OpCost readCost;
  OpCost finalCost;              // measured read plus tryC
  std::set<BaseObjectId> contention;  // between the two writers
  std::string failure;           // empty when every fragment behaved

  bool ok() const { return failure.empty(); }
};

namespace detail {

inline std::size_t responsesOf(const Simulation& sim, ProcessId p) {
  std::size_t n = 0;
  for (const auto& ev : sim.execution().events) n += ev.kind == EventKind::kRespond && ev.process == p;
  return n;
}

/// Runs `p` alone until it has produced `count` more responses or halted.
inline void solo(Simulation& sim, ProcessId p, std::size_t count) {
  const auto target = responsesOf(sim, p) + count;
  for (std::size_t guard = 0; responsesOf(sim, p) < target && !sim.halted(p); ++guard) {
    if (guard > 1'000'000) throw Error("fragment of p" + std::to_string(p.value) + " does not finish");
    sim.step(p);
  }
}

inline const TxnProgramMachine& program(const Simulation& sim, ProcessId p) {
  return static_cast<const TxnProgramMachine&>(sim.machine(p));
}

inline std::vector<TxnScript> writer(std::uint32_t x) {
  return {{TxnId{x, ProcessId{}}, {TOpCall::write(TObjectId{x}, newValue(x)), TOpCall::tryCommit()}}};
}

/// Family over X_1..X_n: T_phi reads X_1..X_reads then commits; optional
/// writers of X_beta and X_rho.
struct Setup {
  std::uint32_t objects = 0;
  std::uint32_t reads = 0;
  std::optional<std::uint32_t> beta;
  std::optional<std::uint32_t> rho;
};

inline Simulation makeFamily(const TmAlgorithm& tm, const Setup& s) {
  std::vector<Value> initial(s.objects + 1, Value::integer(kInitialValue));
  TxnScript phi{TxnId{kPhi, kReader}, {}};
  for (std::uint32_t x = 1; x <= s.reads; ++x) phi.ops.push_back(TOpCall::read(TObjectId{x}));
  phi.ops.push_back(TOpCall::tryCommit());
  std::vector<std::vector<TxnScript>> programs(3);
  programs[0] = {phi};
  if (s.beta) {
    programs[1] = writer(*s.beta);
    programs[1][0].id.process = kBetaWriter;
  }
  if (s.rho) {
    programs[2] = writer(*s.rho);
    programs[2][0].id.process = kRhoWriter;
  }
  return makeTmSimulation(tm, initial, programs);
}

inline void runWriter(Simulation& sim, ProcessId p, const char* name, std::string& failure) {
  solo(sim, p, 2);
  const auto& outs = program(sim, p).outcomes();
  if (failure.empty() && (outs.empty() || !outs.back().isCommit())) failure = std::string(name) + " did not commit";
}

inline void finish(FamilyRun& r, Simulation& sim) {
  sim.recordPoised();
  r.execution = sim.execution();
  if (auto m = replayMismatch(r.execution); m && r.failure.empty()) r.failure = "replay: " + *m;
  try {
    (void)deriveHistory(r.execution);
  } catch (const Error& e) {
    if (r.failure.empty()) r.failure = std::string("history: ") + e.what();
  }
}

}  // namespace detail

/// pi^{i-1} . rho^i . alpha^i; the i-th read must return nv_i. Without the
/// writer the read must return the initial value.
inline FamilyRun buildLemma2Execution(const TmAlgorithm& tm, std::uint32_t i, bool withWriter = true) {
  if (i == 0) throw Error("read index starts at 1");
  detail::Setup s{i, i, std::nullopt, withWriter ? std::optional<std::uint32_t>(i) : std::nullopt};
  Simulation sim = detail::makeFamily(tm, s);
  FamilyRun r;
  detail::solo(sim, kReader, i - 1);
  const auto& phi = detail::program(sim, kReader);
  if (phi.outcomes().size() != i - 1 || std::any_of(phi.outcomes().begin(), phi.outcomes().end(),
                                                     [](const Outcome& o) { return !o.isValue(); })) {
    r.failure = "pi: T_phi's first reads did not all return";
  }
  if (withWriter) detail::runWriter(sim, kRhoWriter, "rho", r.failure);
  detail::solo(sim, kReader, 1);
  if (phi.outcomes().size() >= i) r.read = phi.outcomes()[i - 1];
  const Outcome want = Outcome::of(withWriter ? newValue(i) : Value::integer(kInitialValue));
  if (r.failure.empty() && (!r.read || *r.read != want)) r.failure = "alpha: read did not return " + want.value.toString();
  detail::finish(r, sim);
  r.readCost = costOf(r.execution, TxnId{kPhi, kReader}, i - 1);
  r.finalCost = r.readCost;
  return r;
}

/// T_phi's i-th read after pi^{i-1} . beta^l . rho^i.
enum class ReadVariant : std::uint8_t { kInitial, kAbort, kNewValue, kOther };

inline ReadVariant classify(const std::optional<Outcome>& o, std::uint32_t i) {
  if (!o) return ReadVariant::kOther;
  if (o->isAbort()) return ReadVariant::kAbort;
  if (o->isValue() && o->value == Value::integer(kInitialValue)) return ReadVariant::kInitial;
  if (o->isValue() && o->value == newValue(i)) return ReadVariant::kNewValue;
  return ReadVariant::kOther;
}

/// pi^{i-1} . beta^l . rho^i . alpha^i. The read may return v or abort; nv
/// is reported as a failure. `contention` lists base objects on which the
/// two writers contend.
inline FamilyRun buildTheorem3Execution(const TmAlgorithm& tm, std::uint32_t i, std::optional<std::uint32_t> l) {
  if (l && (*l == 0 || *l >= i)) throw Error("need 1 <= l <= i-1");
  detail::Setup s{i, i, l, i};
  Simulation sim = detail::makeFamily(tm, s);
  FamilyRun r;
  detail::solo(sim, kReader, i - 1);
  if (l) detail::runWriter(sim, kBetaWriter, "beta", r.failure);
  detail::runWriter(sim, kRhoWriter, "rho", r.failure);
  detail::solo(sim, kReader, 1);
  const auto& phi = detail::program(sim, kReader);
  if (phi.outcomes().size() >= i) r.read = phi.outcomes()[i - 1];
  const auto variant = classify(r.read, i);
  if (r.failure.empty()) {
    if (l && variant != ReadVariant::kInitial && variant != ReadVariant::kAbort) {
      r.failure = "alpha: read returned a value other than v or A_phi";
    } else if (!l && variant != ReadVariant::kNewValue) {
      r.failure = "alpha: read did not return nv";
    }
  }
  detail::finish(r, sim);
  r.readCost = costOf(r.execution, TxnId{kPhi, kReader}, i - 1);
  r.finalCost = r.readCost;
  if (l) r.contention = contention(r.execution, TxnId{*l, kBetaWriter}, TxnId{i, kRhoWriter});
  return r;
}

/// E_l = pi^{m-1} . beta^l . rho^m . alpha-bar^m: the m-th read followed by
/// tryC, without beta when `l` is empty.
inline FamilyRun buildFinalReadExecution(const TmAlgorithm& tm, std::uint32_t m, std::optional<std::uint32_t> l) {
  if (l && (*l == 0 || *l >= m)) throw Error("need 1 <= l <= m-1");
  detail::Setup s{m, m, l, m};
  Simulation sim = detail::makeFamily(tm, s);
  FamilyRun r;
  detail::solo(sim, kReader, m - 1);
  if (l) detail::runWriter(sim, kBetaWriter, "beta", r.failure);
  detail::runWriter(sim, kRhoWriter, "rho", r.failure);
  detail::solo(sim, kReader, 2);
  const auto& phi = detail::program(sim, kReader);
  if (phi.outcomes().size() >= m) r.read = phi.outcomes()[m - 1];
  if (phi.outcomes().size() >= m + 1) r.tryC = phi.outcomes()[m];
  detail::finish(r, sim);
  const TxnId t{kPhi, kReader};
  r.readCost = costOf(r.execution, t, m - 1);
  r.finalCost = r.readCost;
  const auto c = costOf(r.execution, t, m);
  r.finalCost.steps += c.steps;
  r.finalCost.objects.insert(c.objects.begin(), c.objects.end());
  if (l) r.contention = contention(r.execution, TxnId{*l, kBetaWriter}, TxnId{m, kRhoWriter});
  // Reading nv after beta^l forces T_phi to abort.
  const bool sawNew = classify(r.read, m) == ReadVariant::kNewValue;
  const bool aborted = (r.read && r.read->isAbort()) || (r.tryC && r.tryC->isAbort());
  if (r.failure.empty() && l && sawNew && !aborted) r.failure = "alpha-bar: read nv after beta yet tryC committed";
  return r;
}

/// The forbidden outcome: after beta^l and rho^i commit, T_phi's i-th read
/// returns nv_i although it read the initial value of X_l.
inline History forbiddenFinalRead(std::uint32_t i, std::uint32_t l) {
  std::vector<HistoryEvent> ev;
  std::uint64_t seq = 0;
  auto op = [&](TxnId t, std::uint32_t top, TOpCall call, Outcome out) {
    HistoryEvent inv;
    inv.seq = seq++;
    inv.process = t.process;
    inv.txn = t;
    inv.top = top;
    inv.call = call;
    ev.push_back(inv);
    HistoryEvent resp = inv;
    resp.seq = seq++;
    resp.invoke = false;
    resp.outcome = std::move(out);
    ev.push_back(resp);
  };
  const TxnId phi{kPhi, kReader};
  for (std::uint32_t x = 1; x < i; ++x) op(phi, x - 1, TOpCall::read(TObjectId{x}), Outcome::of(Value::integer(kInitialValue)));
  const TxnId beta{l, kBetaWriter};
  op(beta, 0, TOpCall::write(TObjectId{l}, newValue(l)), Outcome::ok());
  op(beta, 1, TOpCall::tryCommit(), Outcome::commit());
  const TxnId rho{i, kRhoWriter};
  op(rho, 0, TOpCall::write(TObjectId{i}, newValue(i)), Outcome::ok());
  op(rho, 1, TOpCall::tryCommit(), Outcome::commit());
  op(phi, i - 1, TOpCall::read(TObjectId{i}), Outcome::of(newValue(i)));
  return History::fromEvents(std::move(ev));
}

/// One row per read index (quadratic) or per beta^l (space).
struct CostRow {
  std::string label;
  std::uint64_t steps = 0;
  std::uint64_t distinctObjects = 0;
  std::uint64_t analyticBound = 0;
  bool pass = false;
};

struct CostReport {
  std::string tm;
  std::uint32_t m = 0;
  std::vector<CostRow> rows;
  CostRow summary;
  std::vector<std::string> failures;

  bool pass() const {
    return summary.pass && failures.empty() &&
           std::all_of(rows.begin(), rows.end(), [](const CostRow& r) { return r.pass; });
  }
};

/// Upper constant for total read steps against m^2.
inline constexpr std::uint64_t kQuadraticConstant = 3;

/// For each i in 1..m, the i-th read of pi^{i-1} . rho^i . alpha^i: steps,
/// distinct base objects, and the i-1 lower bound on both.
inline CostReport measureQuadratic(const TmAlgorithm& tm, std::uint32_t m) {
  if (m < 1) throw Error("m must be positive");
  CostReport rep;
  rep.tm = tm.name();
  rep.m = m;
  std::uint64_t total = 0, distinct = 0;
  for (std::uint32_t i = 1; i <= m; ++i) {
    const FamilyRun run = buildLemma2Execution(tm, i);
    if (!run.ok()) rep.failures.push_back("i=" + std::to_string(i) + ": " + run.failure);
    CostRow row;
    row.label = std::to_string(i);
    row.steps = run.readCost.steps;
    row.distinctObjects = run.readCost.objects.size();
    row.analyticBound = i - 1;
    row.pass = run.ok() && row.steps >= row.analyticBound && row.distinctObjects >= row.analyticBound;
    total += row.steps;
    distinct += row.distinctObjects;
    rep.rows.push_back(row);
  }
  rep.summary.label = "total";
  rep.summary.steps = total;
  rep.summary.distinctObjects = distinct;
  rep.summary.analyticBound = static_cast<std::uint64_t>(m) * (m - 1) / 2;
  rep.summary.pass = total >= rep.summary.analyticBound && total <= kQuadraticConstant * m * m;
  return rep;
}

/// Distinct base objects T_phi touches in its m-th read plus tryC, for each
/// E_l (l = 1..m-1) and for the run without beta. The summary row carries the
/// maximum, which must reach m-1. Row pass: T_phi's outcome is consistent
/// with strict serializability and the history has a serialization.
inline CostReport measureFinalReadSpace(const TmAlgorithm& tm, std::uint32_t m) {
  if (m < 2) throw Error("m must be at least 2");
  CostReport rep;
  rep.tm = tm.name();
  rep.m = m;
  std::uint64_t best = 0;
  auto add = [&](std::optional<std::uint32_t> l) {
    const FamilyRun run = buildFinalReadExecution(tm, m, l);
    const std::string name = l ? std::to_string(*l) : std::string("none");
    if (!run.ok()) rep.failures.push_back("l=" + name + ": " + run.failure);
    const auto verdict = check::checkStrictSerializability(deriveHistory(run.execution));
    if (!verdict.holds()) rep.failures.push_back("l=" + name + ": not strictly serializable");
    CostRow row;
    row.label = name;
    row.steps = run.finalCost.steps;
    row.distinctObjects = run.finalCost.objects.size();
    row.analyticBound = m - 1;
    row.pass = run.ok() && verdict.holds();
    best = std::max<std::uint64_t>(best, row.distinctObjects);
    rep.rows.push_back(row);
  };
  for (std::uint32_t l = 1; l < m; ++l) add(l);
  add(std::nullopt);
  rep.summary.label = "max";
  rep.summary.distinctObjects = best;
  rep.summary.steps = 0;
  for (const auto& r : rep.rows) rep.summary.steps = std::max(rep.summary.steps, r.steps);
  rep.summary.analyticBound = m - 1;
  rep.summary.pass = best >= m - 1;
  return rep;
}

}  // namespace tmlab::lb
