#pragma once

#include <cstdint>
#include <vector>

#include "tmlab/core/io.hpp"
#include "tmlab/core/simulation.hpp"
#include "tmlab/tm/algorithm.hpp"

namespace tmlab {

struct WorkloadShape {
  std::uint32_t processes = 2;
  std::uint32_t txnsPerProcess = 1;
  std::uint32_t objects = 2;
  std::uint32_t opsPerTxn = 2;  // reads and writes; tryC is appended
};

/// Seeded random programs. Transaction k = 1 + p * txnsPerProcess + t.
inline std::vector<std::vector<TxnScript>> randomPrograms(std::uint64_t seed, const WorkloadShape& shape) {
  if (shape.objects == 0) throw Error("a workload needs at least one t-object");
  SplitMix64 rng(seed);
  std::vector<std::vector<TxnScript>> programs(shape.processes);
  for (std::uint32_t p = 0; p < shape.processes; ++p) {
    for (std::uint32_t t = 0; t < shape.txnsPerProcess; ++t) {
      TxnScript s{TxnId{1 + static_cast<std::uint64_t>(p) * shape.txnsPerProcess + t, ProcessId{p}}, {}};
      for (std::uint32_t i = 0; i < shape.opsPerTxn; ++i) {
        const TObjectId x{static_cast<std::uint32_t>(rng.below(shape.objects))};
        if (rng.below(2) == 0) {
          s.ops.push_back(TOpCall::read(x));
        } else {
          s.ops.push_back(TOpCall::write(x, Value::integer(static_cast<std::int64_t>(1 + rng.below(9)))));
        }
      }
      s.ops.push_back(TOpCall::tryCommit());
      programs[p].push_back(std::move(s));
    }
  }
  return programs;
}

/// [[{"txn": k, "ops": [{"kind": "read", "object": 0}, ...]}, ...], ...], one
/// array per process.
inline std::vector<std::vector<TxnScript>> programsFromJson(const Json& j) {
  std::vector<std::vector<TxnScript>> programs;
  for (std::uint32_t p = 0; p < j.size(); ++p) {
    programs.emplace_back();
    for (const auto& t : j[p]) {
      TxnScript s{TxnId{t.at("txn").get<std::uint64_t>(), ProcessId{p}}, {}};
      for (const auto& op : t.at("ops")) {
        TOpCall c;
        c.kind = parseTOpKind(op.at("kind").get<std::string>());
        if (op.contains("object")) c.object = TObjectId{op["object"].get<std::uint32_t>()};
        if (op.contains("arg")) c.arg = valueFromJson(op["arg"]);
        s.ops.push_back(c);
      }
      programs.back().push_back(std::move(s));
    }
  }
  return programs;
}

}  // namespace tmlab
