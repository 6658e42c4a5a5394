#pragma once

// Brute-force reference implementations. These deliberately avoid the library's
// search routines so they can serve as independent checks.

#include <cmath>
#include <functional>
#include <utility>

namespace oracle {

// Dense scan followed by ternary refinement around the best cell.
inline std::pair<double, double> argmax(const std::function<double(double)>& f, double lo,
                                        double hi, int n = 4096) {
  double best_x = lo;
  double best_v = f(lo);
  const double h = (hi - lo) / (n - 1);
  int best_i = 0;
  for (int i = 1; i < n; ++i) {
    const double x = lo + h * i;
    const double v = f(x);
    if (v > best_v) {
      best_v = v;
      best_x = x;
      best_i = i;
    }
  }
  double a = std::max(lo, lo + h * (best_i - 1));
  double b = std::min(hi, lo + h * (best_i + 1));
  for (int k = 0; k < 200 && b - a > 1e-14; ++k) {
    const double m1 = a + (b - a) / 3;
    const double m2 = b - (b - a) / 3;
    if (f(m1) < f(m2)) {
      a = m1;
    } else {
      b = m2;
    }
  }
  const double x = 0.5 * (a + b);
  const double v = f(x);
  if (v >= best_v) return {x, v};
  return {best_x, best_v};
}

inline double central_diff(const std::function<double(double)>& f, double x, double h = 1e-5) {
  return (f(x + h) - f(x - h)) / (2 * h);
}

}  // namespace oracle
