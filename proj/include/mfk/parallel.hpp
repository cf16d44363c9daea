#pragma once

#include <cstddef>
#include <exception>
#include <vector>

namespace mfk {

// Worker count used by parallel loops; 0 restores the OpenMP default.
void set_thread_count(int threads);
int thread_count();

/// Runs body(i) for i in [0, n) on the OpenMP team. Exceptions do not cross
/// the parallel region: the one thrown by the lowest index is rethrown after the loop.
template <typename Body>
void parallel_for(std::ptrdiff_t n, Body&& body, bool dynamic = true) {
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n > 0 ? n : 0));
  if (dynamic) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      try {
        body(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  } else {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      try {
        body(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace mfk
