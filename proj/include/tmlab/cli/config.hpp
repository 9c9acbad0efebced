#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tmlab/core/error.hpp"
#include "tmlab/core/io.hpp"

namespace tmlab::cli {

/// Everything a run depends on besides the code version.
struct ExperimentConfig {
  std::string command;
  std::string tm = "ref";
  // lowerbound
  std::string kind = "quadratic";
  std::uint32_t m = 8;
  // check
  std::string property = "opacity";
  std::string mode = "weak";
  std::size_t bound = 0;  // 0: the checker's default
  // simulate
  std::uint32_t processes = 2;
  std::uint32_t txns = 1;
  std::uint32_t objects = 2;
  std::uint32_t ops = 2;
  std::string programs;
  std::size_t maxSteps = 100000;
  // mutex
  std::uint32_t n = 2;
  std::uint32_t passes = 3;
  bool exhaustive = false;
  std::string trace;
  // shared
  std::uint64_t seed = 0;
  std::string model = "all";
  std::string schedule = "roundrobin";
  std::string in;
  std::string out;
  std::string format;

  /// Fields relevant to `command`, defaults included, in a fixed order.
  std::vector<std::pair<std::string, std::string>> resolved() const {
    std::vector<std::pair<std::string, std::string>> kv{{"command", command}};
    auto add = [&](const char* k, const auto& v) {
      std::ostringstream os;
      os << std::boolalpha << v;
      kv.emplace_back(k, os.str());
    };
    if (command == "simulate") {
      add("tm", tm);
      add("processes", processes);
      add("txns", txns);
      add("objects", objects);
      add("ops", ops);
      add("programs", programs);
      add("schedule", schedule);
      add("seed", seed);
      add("model", model);
      add("max-steps", maxSteps);
      add("out", out);
    } else if (command == "check") {
      add("property", property);
      add("mode", mode);
      add("bound", bound);
      add("in", in);
      add("out", out);
    } else if (command == "lowerbound") {
      add("kind", kind);
      add("tm", tm);
      add("m", m);
      add("out", out);
      add("format", format);
    } else if (command == "mutex") {
      add("n", n);
      add("passes", passes);
      add("model", model);
      add("schedule", schedule);
      add("seed", seed);
      add("exhaustive", exhaustive);
      add("max-steps", maxSteps);
      add("out", out);
      add("trace", trace);
      add("format", format);
    }
    return kv;
  }

  std::string toText() const {
    std::string s;
    for (const auto& [k, v] : resolved()) s += k + "=" + v + "\n";
    return s;
  }

  std::string oneLine() const {
    std::string s;
    for (const auto& [k, v] : resolved()) s += (s.empty() ? "" : " ") + k + "=" + v;
    return s;
  }
};

/// key=value lines; '#' starts a comment.
inline std::vector<std::pair<std::string, std::string>> parseKeyValues(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> kv;
  std::istringstream in(text);
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw Error("config line " + std::to_string(lineNo) + ": expected key=value");
    kv.emplace_back(trim(std::string_view(line).substr(0, eq)), trim(std::string_view(line).substr(eq + 1)));
  }
  return kv;
}

inline std::string readTextFile(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

}  // namespace tmlab::cli
