#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <functional>
#include <limits>
#include <span>
#include <thread>
#include <vector>

namespace contractforge::numeric {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct ScalarMax {
  double x = 0.0;
  double value = -kInf;
};

/// Keeps the larger of two candidates; ties go to the smaller abscissa so
/// that reductions do not depend on evaluation order.
inline ScalarMax better(const ScalarMax& lhs, const ScalarMax& rhs) {
  if (rhs.value > lhs.value) return rhs;
  if (rhs.value == lhs.value && rhs.x < lhs.x) return rhs;
  return lhs;
}

std::vector<double> linspace(double lo, double hi, std::size_t n);
std::vector<double> logspace(double lo, double hi, std::size_t n);

/// Golden-section search for a maximum of `f` on [lo, hi].
///
/// The objective does not need to be unimodal: the best point evaluated over
/// the whole run is returned, so the result is never worse than either
/// bracket end.
ScalarMax golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                             int max_iters, double x_tol = 1e-13);

/// Single-panel Simpson rule on [lo, hi].
double simpson(const std::function<double(double)>& f, double lo, double hi);

/// Bisection for the root of an increasing function on [lo, hi].
/// Throws ConvergenceError when the root is not bracketed.
double bisect_increasing(const std::function<double(double)>& f, double target, double lo,
                         double hi, double width_tol = 1e-12, int max_iters = 400);

/// Worker count for internal parallel loops. `requested == 0` means "use
/// CONTRACTFORGE_THREADS if set, otherwise the hardware concurrency".
std::size_t resolve_workers(std::size_t requested);

/// Splits [0, n) into contiguous chunks and runs `body(begin, end)` on each.
/// Chunks never share output slots, so results written by index are
/// independent of the worker count.
template <class Body>
void parallel_for(std::size_t n, std::size_t workers, Body&& body) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    body(std::size_t{0}, n);
    return;
  }
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(n, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back([&body, &errors, w, begin, end] {
        try {
          body(begin, end);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  // Rethrow the failure of the lowest chunk, as a serial loop would.
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

/// Evaluates `f` at every point, possibly in parallel.
std::vector<double> evaluate_all(std::span<const double> xs,
                                 const std::function<double(double)>& f, std::size_t workers);

/// Scans tabulated values, refines the best `max_peaks` local maxima with
/// golden-section search inside their bracketing cells, and returns the best
/// point seen. `xs` must be sorted ascending.
ScalarMax refine_grid_max(std::span<const double> xs, std::span<const double> values,
                          const std::function<double(double)>& f, int refine_iters,
                          std::size_t max_peaks = 4);

/// Relative-or-absolute closeness.
inline bool close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace contractforge::numeric
