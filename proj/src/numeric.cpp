#include "contractforge/numeric.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <string>

#include "contractforge/errors.hpp"

namespace contractforge::numeric {

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n < 2) return {lo};
  std::vector<double> xs(n);
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) xs[i] = lo + step * static_cast<double>(i);
  xs.back() = hi;
  return xs;
}

std::vector<double> logspace(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi > 0.0)) throw DomainError("logspace needs positive bounds");
  auto xs = linspace(std::log(lo), std::log(hi), n);
  for (auto& x : xs) x = std::exp(x);
  xs.front() = lo;
  if (n >= 2) xs.back() = hi;
  return xs;
}

ScalarMax golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                             int max_iters, double x_tol) {
  static const double kInvPhi = (std::sqrt(5.0) - 1.0) / 2.0;
  ScalarMax best{lo, f(lo)};
  best = better(best, {hi, f(hi)});
  double c = hi - kInvPhi * (hi - lo);
  double d = lo + kInvPhi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  best = better(best, {c, fc});
  best = better(best, {d, fd});
  for (int i = 0; i < max_iters; ++i) {
    if (std::abs(hi - lo) <= x_tol * std::max(1.0, std::abs(lo) + std::abs(hi))) break;
    if (fc >= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - kInvPhi * (hi - lo);
      fc = f(c);
      best = better(best, {c, fc});
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + kInvPhi * (hi - lo);
      fd = f(d);
      best = better(best, {d, fd});
    }
  }
  return best;
}

double simpson(const std::function<double(double)>& f, double lo, double hi) {
  const double mid = 0.5 * (lo + hi);
  return (hi - lo) / 6.0 * (f(lo) + 4.0 * f(mid) + f(hi));
}

double bisect_increasing(const std::function<double(double)>& f, double target, double lo,
                         double hi, double width_tol, int max_iters) {
  double flo = f(lo) - target;
  double fhi = f(hi) - target;
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (flo > 0.0 || fhi < 0.0) {
    throw ConvergenceError("bisection: target not bracketed on [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "]");
  }
  for (int i = 0; i < max_iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= width_tol * std::max(1.0, std::abs(mid)) || mid == lo || mid == hi) {
      return mid;
    }
    const double fm = f(mid) - target;
    if (fm == 0.0) return mid;
    if (fm < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  throw ConvergenceError("bisection did not reach the requested width");
}

std::size_t resolve_workers(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("CONTRACTFORGE_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<double> evaluate_all(std::span<const double> xs,
                                 const std::function<double(double)>& f, std::size_t workers) {
  std::vector<double> out(xs.size());
  parallel_for(xs.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] = f(xs[i]);
  });
  return out;
}

ScalarMax refine_grid_max(std::span<const double> xs, std::span<const double> values,
                          const std::function<double(double)>& f, int refine_iters,
                          std::size_t max_peaks) {
  ScalarMax best;
  const std::size_t n = xs.size();
  std::vector<std::size_t> peaks;
  for (std::size_t i = 0; i < n; ++i) {
    best = better(best, {xs[i], values[i]});
    const bool left_ok = i == 0 || values[i] >= values[i - 1];
    const bool right_ok = i + 1 == n || values[i] >= values[i + 1];
    if (left_ok && right_ok && std::isfinite(values[i])) peaks.push_back(i);
  }
  std::stable_sort(peaks.begin(), peaks.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  if (peaks.size() > max_peaks) peaks.resize(max_peaks);
  for (const std::size_t i : peaks) {
    const double lo = xs[i == 0 ? 0 : i - 1];
    const double hi = xs[i + 1 == n ? n - 1 : i + 1];
    if (!(hi > lo)) continue;
    best = better(best, golden_section_max(f, lo, hi, refine_iters));
  }
  return best;
}

}  // namespace contractforge::numeric
