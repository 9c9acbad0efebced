#pragma once

#include <sstream>
#include <string>

#include "tmlab/core/io.hpp"
#include "tmlab/lb/families.hpp"
#include "tmlab/mutex/experiment.hpp"

namespace tmlab::cli {

enum class ReportFormat : std::uint8_t { kCsv, kJson };

inline ReportFormat parseFormat(const std::string& s) {
  if (s == "csv") return ReportFormat::kCsv;
  if (s == "json") return ReportFormat::kJson;
  throw Error("unknown report format: " + s);
}

/// JSON when the path ends in .json, CSV otherwise.
inline ReportFormat formatForPath(const std::string& path) {
  return path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0 ? ReportFormat::kJson : ReportFormat::kCsv;
}

inline const char* passText(bool b) { return b ? "true" : "false"; }

inline std::string renderCost(const lb::CostReport& r, ReportFormat f) {
  if (f == ReportFormat::kJson) {
    Json j;
    j["tm"] = r.tm;
    j["m"] = r.m;
    Json rows = Json::array();
    auto row = [](const lb::CostRow& c) {
      Json o;
      o["i"] = c.label;
      o["steps"] = c.steps;
      o["distinctObjects"] = c.distinctObjects;
      o["analyticBound"] = c.analyticBound;
      o["pass"] = c.pass;
      return o;
    };
    for (const auto& c : r.rows) rows.push_back(row(c));
    j["rows"] = rows;
    if (!r.rows.empty()) j["summary"] = row(r.summary);
    j["failures"] = r.failures;
    j["pass"] = r.pass();
    return j.dump(2) + "\n";
  }
  std::ostringstream os;
  os << "i,steps,distinctObjects,analyticBound,pass\n";
  auto line = [&](const lb::CostRow& c) {
    os << c.label << ',' << c.steps << ',' << c.distinctObjects << ',' << c.analyticBound << ',' << passText(c.pass)
       << '\n';
  };
  for (const auto& c : r.rows) line(c);
  if (!r.rows.empty()) line(r.summary);
  return os.str();
}

/// One row per process, one count per active model.
inline std::string renderRmr(const RmrReport& r, ReportFormat f) {
  if (f == ReportFormat::kJson) {
    Json rows = Json::array();
    for (std::size_t p = 0; p < r.perProcess.size(); ++p) {
      Json o;
      o["process"] = p;
      for (auto m : r.models) o[std::string(modelName(m))] = r.at(ProcessId{static_cast<std::uint32_t>(p)}, m);
      rows.push_back(o);
    }
    return rows.dump(2) + "\n";
  }
  std::ostringstream os;
  os << "process";
  for (auto m : r.models) os << ',' << modelName(m);
  os << '\n';
  for (std::size_t p = 0; p < r.perProcess.size(); ++p) {
    os << p;
    for (auto m : r.models) os << ',' << r.at(ProcessId{static_cast<std::uint32_t>(p)}, m);
    os << '\n';
  }
  return os.str();
}

inline Json toJson(const mutex::MutexResult& r, const std::vector<MemoryModel>& models) {
  Json j;
  j["mutualExclusion"] = r.mutualExclusion;
  j["allFinished"] = r.allFinished;
  j["passesDone"] = r.passesDone;
  j["turns"] = r.turns;
  j["passages"] = r.passages;
  j["maxExitEvents"] = r.maxExitEvents;
  for (const char* key : {"maxNonTmPerPassage", "totalNonTm", "spinRmr", "tmRmr"}) j[key] = Json::object();
  for (auto m : models) {
    const auto i = static_cast<std::size_t>(m);
    const std::string name(modelName(m));
    j["maxNonTmPerPassage"][name] = r.maxNonTmPerPassage[i];
    j["totalNonTm"][name] = r.totalNonTm[i];
    j["spinRmr"][name] = r.spinRmr[i];
    j["tmRmr"][name] = r.tmRmr[i];
  }
  return j;
}

inline void emitReport(const lb::CostReport& r, ReportFormat f, const std::string& path) {
  writeTextFile(path, renderCost(r, f));
}

inline void emitReport(const RmrReport& r, ReportFormat f, const std::string& path) {
  writeTextFile(path, renderRmr(r, f));
}

/// Writes `text` to `path`, or to `fallback` when path is empty.
inline void emitText(const std::string& text, const std::string& path, std::ostream& fallback) {
  if (path.empty()) {
    fallback << text;
  } else {
    writeTextFile(path, text);
  }
}

}  // namespace tmlab::cli
