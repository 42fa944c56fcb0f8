#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <vector>

namespace randword {

/// Every data-parallel sweep in the library takes an Execution tag. Serial is
/// the reference path; Parallel must produce bitwise identical results.
enum class Execution { Serial, Parallel };

/// Runs body(i) for i in [0, n). Each index must write only to its own slot.
/// An exception thrown by any index is rethrown on the calling thread (the
/// one with the lowest index wins, as in the serial loop).
template <class Body>
void for_each_index(std::size_t n, Execution exec, Body&& body) {
  if (exec == Execution::Serial) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace randword
