#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace spf {

// Bad shapes, out-of-range parameters, out-of-range indices.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Zero matrices/vectors where a direction is required.
class DegenerateInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Allocation requests beyond the configured memory budget.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exhaustive support searches larger than the caller's budget.
class CombinatorialBudgetError : public std::runtime_error {
 public:
  CombinatorialBudgetError(std::uint64_t count, std::uint64_t budget)
      : std::runtime_error("support search needs " + std::to_string(count) +
                           " candidates, budget is " + std::to_string(budget)),
        count_(count),
        budget_(budget) {}

  std::uint64_t count() const noexcept { return count_; }
  std::uint64_t budget() const noexcept { return budget_; }

 private:
  std::uint64_t count_;
  std::uint64_t budget_;
};

}  // namespace spf
