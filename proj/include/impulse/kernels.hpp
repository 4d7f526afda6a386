#pragma once

// Index-parallel kernels. Every parallel kernel has a serial twin with the
// same signature; the serial versions are the reference the tests compare
// against and the baseline for bench/.

#include <algorithm>
#include <cstddef>
#include <exception>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace impulse {

enum class Execution { Serial, Parallel };

template <class Body>
void serial_for(std::size_t count, Body&& body) {
  for (std::size_t i = 0; i < count; ++i) body(i);
}

/// Runs body(i) for i in [0, count) across OpenMP threads. Exceptions are
/// captured per index and the one with the lowest index is rethrown after the
/// loop, so error reporting matches serial_for.
template <class Body>
void parallel_for(std::size_t count, Body&& body) {
  std::vector<std::exception_ptr> errors(count);
  const auto n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < n; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

template <class Body>
void for_each_index(std::size_t count, Execution exec, Body&& body) {
  if (exec == Execution::Parallel)
    parallel_for(count, body);
  else
    serial_for(count, body);
}

template <class Term>
double serial_max(std::size_t count, Term&& term) {
  double best = 0.0;
  for (std::size_t i = 0; i < count; ++i) best = std::max(best, term(i));
  return best;
}

/// max over i of term(i), clamped below at 0. max is order independent, so
/// the result is bitwise identical to serial_max.
template <class Term>
double parallel_max(std::size_t count, Term&& term) {
  double best = 0.0;
  const auto n = static_cast<long long>(count);
#pragma omp parallel for reduction(max : best) schedule(static)
  for (long long i = 0; i < n; ++i) best = std::max(best, term(static_cast<std::size_t>(i)));
  return best;
}

template <class Term>
double max_over(std::size_t count, Execution exec, Term&& term) {
  return exec == Execution::Parallel ? parallel_max(count, term) : serial_max(count, term);
}

inline int worker_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace impulse
