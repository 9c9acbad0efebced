#pragma once

#include <stdexcept>
#include <string>

namespace tmlab {

/// Contract violation detected by the simulator, a checker, or a harness.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tmlab
