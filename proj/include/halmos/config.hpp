#pragma once

#include <atomic>
#include <cstdint>
#include <string>

#include "halmos/errors.hpp"

namespace halmos {

/// Hard cap on the number of cells a point space or operation table may
/// occupy.  Exceeding it raises ResourceError; the default (2^24) keeps
/// accidental blowups from eating the machine.  Set once at startup.
inline std::atomic<std::uint64_t>& space_budget_cell() {
  static std::atomic<std::uint64_t> budget{std::uint64_t{1} << 24};
  return budget;
}

inline std::uint64_t space_budget() { return space_budget_cell().load(); }

inline void set_space_budget(std::uint64_t value) { space_budget_cell().store(value); }

/// base^exp with overflow detection, checked against the space budget.
/// `what` names the thing being sized so the error is self-explanatory.
inline std::uint64_t checked_pow(std::uint64_t base, int exp, const std::string& what) {
  const std::uint64_t limit = space_budget();
  std::uint64_t result = 1;
  for (int i = 0; i < exp; ++i) {
    if (base != 0 && result > limit / base) {
      throw ResourceError(what + " would need " + std::to_string(base) + "^" +
                          std::to_string(exp) + " cells, over the budget of " +
                          std::to_string(limit));
    }
    result *= base;
  }
  if (result > limit) {
    throw ResourceError(what + " needs " + std::to_string(result) +
                        " cells, over the budget of " + std::to_string(limit));
  }
  return result;
}

}  // namespace halmos
