#pragma once

#include <exception>
#include <vector>

namespace koiter::detail {

// Runs fn(i) for i in [0, n) across OpenMP threads. Exceptions cannot cross
// the parallel region, so they are collected and the one with the lowest
// index is rethrown afterwards.
template <class Fn>
void parallel_for(int n, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic, 8)
  for (int i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace koiter::detail
