#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qdesign {

struct AmbientMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct MalformedEncoding : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// decode() refuses input whose rows are not already a canonical RREF basis
struct NotCanonical : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotPrimitive : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BudgetExceeded : std::runtime_error {
  std::uint64_t limit;
  explicit BudgetExceeded(const std::string& what, std::uint64_t limit_ = 0)
      : std::runtime_error(what), limit(limit_) {}
};

struct OrbitBudgetExceeded : BudgetExceeded {
  using BudgetExceeded::BudgetExceeded;
};

struct IncompleteCensus : std::logic_error {
  using std::logic_error::logic_error;
};

struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace qdesign
