#pragma once

#include <memory>
#include <string>

#include "tmlab/tm/ref_tm.hpp"
#include "tmlab/tm/sp1_tm.hpp"

namespace tmlab {

/// TM lookup by name ("ref", "sp1").
inline std::unique_ptr<TmAlgorithm> makeTm(const std::string& name) {
  if (name == "ref") return std::make_unique<RefTm>();
  if (name == "sp1") return std::make_unique<Sp1Tm>();
  throw Error("unknown TM: " + name);
}

}  // namespace tmlab
