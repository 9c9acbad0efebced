#pragma once

#include <algorithm>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tmlab/check/dap.hpp"
#include "tmlab/check/invisible_reads.hpp"
#include "tmlab/check/progress.hpp"
#include "tmlab/check/serialization.hpp"
#include "tmlab/cli/config.hpp"
#include "tmlab/cli/report.hpp"
#include "tmlab/lb/families.hpp"
#include "tmlab/mutex/experiment.hpp"
#include "tmlab/tm/history_io.hpp"
#include "tmlab/tm/registry.hpp"
#include "tmlab/tm/workload.hpp"

namespace tmlab::cli {

enum ExitCode : int { kPass = 0, kViolation = 1, kRefused = 2, kUsage = 3 };

class UsageError : public Error {
 public:
  using Error::Error;
};

inline std::vector<MemoryModel> parseModels(const std::string& s) {
  if (s == "all") return allMemoryModels();
  std::vector<MemoryModel> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parseMemoryModel(trim(item)));
  if (out.empty()) throw UsageError("no memory model given");
  return out;
}

/// "roundrobin", "random" (with `seed`), or a schedule file.
inline Schedule resolveSchedule(const std::string& s, std::uint64_t seed) {
  if (s == "roundrobin") return Schedule::roundRobin();
  if (s == "random") return Schedule::random(seed);
  return parseSchedule(readTextFile(s));
}

namespace detail {

inline int simulate(const ExperimentConfig& c, std::ostream& out) {
  auto tm = makeTm(c.tm);
  std::vector<std::vector<TxnScript>> programs;
  std::uint32_t objects = c.objects;
  if (!c.programs.empty()) {
    programs = programsFromJson(readJsonFile(c.programs));
    objects = 1;
    for (const auto& prog : programs) {
      for (const auto& t : prog) {
        for (const auto& op : t.ops) {
          if (op.kind != TOpKind::kTryCommit) objects = std::max(objects, op.object.index + 1);
        }
      }
    }
  } else {
    programs = randomPrograms(c.seed, {c.processes, c.txns, c.tm == "sp1" ? 1u : objects, c.ops});
  }
  if (c.tm == "sp1") objects = 1;
  Simulation sim = makeTmSimulation(*tm, std::vector<Value>(objects, Value::integer(0)), programs, parseModels(c.model));
  const auto summary = sim.run(resolveSchedule(c.schedule, c.seed), c.maxSteps);
  const Execution& e = sim.execution();
  if (auto m = replayMismatch(e)) {
    out << "replay mismatch: " << *m << "\n";
    return kViolation;
  }
  emitText(toJson(e).dump(2) + "\n", c.out, out);
  if (!c.out.empty()) {
    const History h = deriveHistory(e);
    std::size_t committed = 0, aborted = 0;
    for (const auto& t : h.txns()) {
      committed += t.committed();
      aborted += t.aborted();
    }
    out << "events=" << e.events.size() << " rmw=" << e.rmwCount() << " txns=" << h.txns().size()
        << " committed=" << committed << " aborted=" << aborted << " truncated=" << std::boolalpha << e.truncated
        << "\n";
  }
  return summary.truncated || !summary.allHalted ? kRefused : kPass;
}

inline Json txnList(const std::vector<TxnId>& ids) {
  Json a = Json::array();
  for (const auto& t : ids) a.push_back(t.k);
  return a;
}

inline int check(const ExperimentConfig& c, std::ostream& out) {
  const Json input = readJsonFile(c.in);
  const bool historyOnly = looksLikeHistoryJson(input);
  std::optional<Execution> exec;
  History h;
  if (historyOnly) {
    h = historyFromJson(input);
  } else {
    exec = executionFromJson(input);
    h = deriveHistory(*exec);
  }
  auto needExecution = [&] {
    if (!exec) throw UsageError("property " + c.property + " needs an execution log, not a history");
  };

  Json report;
  report["property"] = c.property;
  Json violations = Json::array();
  bool refused = false;
  if (c.property == "opacity" || c.property == "strict-ser") {
    const auto bound = c.bound ? c.bound : check::kDefaultSerializationBound;
    const auto r = c.property == "opacity" ? check::checkOpacity(h, bound) : check::checkStrictSerializability(h, bound);
    refused = r.verdict == check::Verdict::kRefused;
    if (r.witness) {
      Json w = txnList(r.witness->order);
      report["witness"] = w;
    } else {
      violations.push_back({{"reason", r.reason}});
    }
  } else if (c.property == "prog") {
    for (const auto& t : check::checkProgressiveness(h)) violations.push_back({{"txn", t.k}});
  } else if (c.property == "strong-prog") {
    const auto r = check::checkStrongProgressiveness(h, c.bound ? c.bound : check::kDefaultStrongProgressBound);
    refused = r.refused;
    if (refused) report["reason"] = r.reason;
    for (const auto& v : r.violations) {
      Json cobj = Json::array();
      for (const auto& x : v.cobj) cobj.push_back(x.index);
      violations.push_back({{"members", txnList(v.members)}, {"cobj", cobj}});
    }
  } else if (c.property == "weak-dap") {
    needExecution();
    for (const auto& v : check::checkWeakDap(*exec)) {
      violations.push_back(
          {{"first", v.first.k}, {"second", v.second.k}, {"object", v.object.index}, {"prefix", v.prefixLength}});
    }
  } else if (c.property == "inv-reads") {
    needExecution();
    if (c.mode != "weak" && c.mode != "strong") throw UsageError("--mode must be weak or strong");
    const auto mode = c.mode == "weak" ? check::InvisibleMode::kWeak : check::InvisibleMode::kStrong;
    for (const auto& v : check::checkInvisibleReads(*exec, mode)) {
      violations.push_back({{"txn", v.txn.k}, {"top", v.top}, {"event", v.eventSeq}});
    }
  } else {
    throw UsageError("unknown property " + c.property);
  }
  const int code = refused ? kRefused : (violations.empty() ? kPass : kViolation);
  report["verdict"] = code == kPass ? "pass" : (code == kRefused ? "refused" : "violation");
  if (!refused) report["violations"] = violations;
  emitText(report.dump(2) + "\n", c.out, out);
  return code;
}

inline int lowerbound(const ExperimentConfig& c, std::ostream& out) {
  auto tm = makeTm(c.tm);
  if (c.kind != "quadratic" && c.kind != "space") throw UsageError("lowerbound kind must be quadratic or space");
  if (c.m < (c.kind == "space" ? 2u : 1u)) throw UsageError("--m is too small");
  const auto rep = c.kind == "quadratic" ? lb::measureQuadratic(*tm, c.m) : lb::measureFinalReadSpace(*tm, c.m);
  const auto fmt = !c.format.empty() ? parseFormat(c.format) : (c.out.empty() ? ReportFormat::kCsv : formatForPath(c.out));
  emitText(renderCost(rep, fmt), c.out, out);
  for (const auto& f : rep.failures) out << "failure: " << f << "\n";
  return rep.pass() ? kPass : kViolation;
}

inline int mutexRun(const ExperimentConfig& c, std::ostream& out) {
  if (c.n < 2) throw UsageError("--n must be at least 2");
  if (c.exhaustive) {
    const auto r = mutex::exploreMutex(c.n, c.passes);
    Json j;
    j["states"] = r.states;
    j["transitions"] = r.transitions;
    j["terminal"] = r.terminal;
    j["stuck"] = r.stuck;
    j["complete"] = r.complete;
    j["mutualExclusion"] = r.mutualExclusion;
    Json ce = Json::array();
    for (auto p : r.counterexample) ce.push_back(p.value);
    j["counterexample"] = ce;
    emitText(j.dump(2) + "\n", c.out, out);
    if (!r.complete) return kRefused;
    return r.ok() ? kPass : kViolation;
  }
  mutex::MutexConfig mc;
  mc.n = c.n;
  mc.passes = c.passes;
  mc.schedule = resolveSchedule(c.schedule, c.seed);
  mc.maxTurns = c.maxSteps;
  mc.models = parseModels(c.model);
  const auto r = mutex::runMutexExperiment(mc);
  const auto fmt = !c.format.empty() ? parseFormat(c.format) : (c.out.empty() ? ReportFormat::kCsv : formatForPath(c.out));
  if (fmt == ReportFormat::kJson) {
    Json j = toJson(r, mc.models);
    j["nonTmPerProcess"] = Json::parse(renderRmr(r.nonTm, ReportFormat::kJson));
    emitText(j.dump(2) + "\n", c.out, out);
  } else {
    emitText(renderRmr(r.nonTm, ReportFormat::kCsv), c.out, out);
  }
  if (!c.out.empty() || fmt == ReportFormat::kCsv) {
    out << "mutualExclusion=" << std::boolalpha << r.mutualExclusion << " allFinished=" << r.allFinished
        << " passages=" << r.passages << " maxExitEvents=" << r.maxExitEvents;
    for (auto m : mc.models) {
      const auto i = static_cast<std::size_t>(m);
      out << " " << modelName(m) << ".maxNonTmPerPassage=" << r.maxNonTmPerPassage[i] << " " << modelName(m)
          << ".spin=" << r.spinRmr[i] << " " << modelName(m) << ".tm=" << r.tmRmr[i];
    }
    out << "\n";
  }
  if (!r.mutualExclusion && !c.trace.empty()) writeTextFile(c.trace, toJson(r.execution).dump(2) + "\n");
  if (!r.mutualExclusion) return kViolation;
  return r.allFinished ? kPass : kRefused;
}

/// Expands `--config FILE` (and a leading config `command=`) into flags.
inline std::vector<std::string> expandConfig(std::vector<std::string> args) {
  static const std::vector<std::string> commands{"simulate", "check", "lowerbound", "mutex"};
  auto it = std::find(args.begin(), args.end(), "--config");
  if (it == args.end()) return args;
  if (std::next(it) == args.end()) throw UsageError("--config needs a file");
  const auto kv = parseKeyValues(readTextFile(*std::next(it)));
  args.erase(it, std::next(it, 2));

  std::string command;
  std::vector<std::string> flags, positional;
  for (const auto& [k, v] : kv) {
    if (k == "command") {
      command = v;
    } else if (k == "kind") {
      positional.push_back(v);
    } else if (k == "exhaustive") {
      if (v == "true" || v == "1") flags.push_back("--exhaustive");
    } else {
      flags.push_back("--" + k);
      flags.push_back(v);
    }
  }
  auto cmd = std::find_first_of(args.begin(), args.end(), commands.begin(), commands.end());
  std::vector<std::string> outArgs;
  if (cmd != args.end()) {
    outArgs.assign(args.begin(), cmd);
    command = *cmd;
    ++cmd;
  } else {
    cmd = args.begin();  // no command on the line: everything is a trailing flag
  }
  if (command.empty()) throw UsageError("no command given on the command line or in the config file");
  outArgs.push_back(command);
  // Positional kind must come first; command-line flags come last and win.
  if (command == "lowerbound" && cmd != args.end() && (*cmd == "quadratic" || *cmd == "space")) {
    outArgs.push_back(*cmd++);
  } else if (command == "lowerbound") {
    outArgs.insert(outArgs.end(), positional.begin(), positional.end());
  }
  outArgs.insert(outArgs.end(), flags.begin(), flags.end());
  outArgs.insert(outArgs.end(), cmd, args.end());
  return outArgs;
}

}  // namespace detail

/// Runs the command line `args` (without the program name).
inline int runCli(std::vector<std::string> args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  ExperimentConfig cfg;
  CLI::App app{"Transactional memory simulation laboratory"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  auto* sim = app.add_subcommand("simulate", "Run TM transactions under a schedule and write the execution log");
  sim->add_option("--tm", cfg.tm, "TM name: ref or sp1")->check(CLI::IsMember({"ref", "sp1"}));
  sim->add_option("--processes", cfg.processes, "processes of the random workload");
  sim->add_option("--txns", cfg.txns, "transactions per process");
  sim->add_option("--objects", cfg.objects, "t-objects");
  sim->add_option("--ops", cfg.ops, "reads and writes per transaction");
  sim->add_option("--programs", cfg.programs, "JSON programs instead of a random workload");
  sim->add_option("--schedule", cfg.schedule, "roundrobin, random, or a schedule file");
  sim->add_option("--seed", cfg.seed, "workload and schedule seed");
  sim->add_option("--model", cfg.model, "all or a comma list of wt,wb,dsm");
  sim->add_option("--max-steps", cfg.maxSteps, "turn budget");
  sim->add_option("--out", cfg.out, "execution log path");

  auto* chk = app.add_subcommand("check", "Check a property of a recorded execution or history");
  chk->add_option("--property", cfg.property, "opacity, strict-ser, prog, strong-prog, weak-dap, inv-reads")
      ->required()
      ->check(CLI::IsMember({"opacity", "strict-ser", "prog", "strong-prog", "weak-dap", "inv-reads"}));
  chk->add_option("--in", cfg.in, "execution log or history JSON")->required();
  chk->add_option("--mode", cfg.mode, "inv-reads mode: weak or strong");
  chk->add_option("--bound", cfg.bound, "transaction bound of the exhaustive checkers");
  chk->add_option("--out", cfg.out, "verdict JSON path");

  auto* lbc = app.add_subcommand("lowerbound", "Measure the validation-time and final-read-space families");
  lbc->add_option("kind", cfg.kind, "quadratic or space")->required()->check(CLI::IsMember({"quadratic", "space"}));
  lbc->add_option("--tm", cfg.tm, "TM name")->check(CLI::IsMember({"ref", "sp1"}));
  lbc->add_option("--m", cfg.m, "read-set size");
  lbc->add_option("--out", cfg.out, "report path (.csv or .json)");
  lbc->add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  auto* mx = app.add_subcommand("mutex", "Run the TM-based mutual exclusion lock");
  mx->add_option("--n", cfg.n, "processes");
  mx->add_option("--passes", cfg.passes, "Entry/Exit passages per process");
  mx->add_option("--model", cfg.model, "all or a comma list of wt,wb,dsm");
  mx->add_option("--schedule", cfg.schedule, "roundrobin, random, or a schedule file");
  mx->add_option("--seed", cfg.seed, "seed of the random schedule");
  mx->add_flag("--exhaustive", cfg.exhaustive, "explore every interleaving instead");
  mx->add_option("--max-steps", cfg.maxSteps, "turn budget");
  mx->add_option("--out", cfg.out, "report path (.csv or .json)");
  mx->add_option("--trace", cfg.trace, "counterexample execution log path");
  mx->add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  cfg.maxSteps = 0;
  try {
    args = detail::expandConfig(std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  if (cfg.maxSteps == 0) cfg.maxSteps = cfg.command == "mutex" ? 1'000'000 : 100'000;
  err << "config: " << cfg.oneLine() << "\n";

  try {
    if (cfg.command == "simulate") return detail::simulate(cfg, out);
    if (cfg.command == "check") return detail::check(cfg, out);
    if (cfg.command == "lowerbound") return detail::lowerbound(cfg, out);
    return detail::mutexRun(cfg, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace tmlab::cli
