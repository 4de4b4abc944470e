#pragma once

// Power-law fits on log-log data.

#include <cmath>
#include <vector>

#include "scarkit/errors.hpp"

namespace scarkit {

struct PowerFit {
  double exponent = 0.0;
  double prefactor = 0.0;  // exp(intercept)
  double stderr_exponent = 0.0;
  int n_points = 0;
};

/// Ordinary least squares of log y against log x.
inline PowerFit power_fit(const std::vector<double>& x, const std::vector<double>& y, int min_points = 2) {
  if (x.size() != y.size()) throw precondition_error("power_fit: x and y differ in length");
  const int n = static_cast<int>(x.size());
  if (n < min_points) throw precondition_error("power_fit: need at least " + std::to_string(min_points) + " points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) throw precondition_error("power_fit: non-positive value in log-log fit");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (std::abs(den) < 1e-300) throw precondition_error("power_fit: degenerate abscissae");
  PowerFit f;
  f.n_points = n;
  f.exponent = (n * sxy - sx * sy) / den;
  const double b = (sy - f.exponent * sx) / n;
  f.prefactor = std::exp(b);
  if (n > 2) {
    double ss = 0;
    for (int i = 0; i < n; ++i) {
      const double e = std::log(y[i]) - b - f.exponent * std::log(x[i]);
      ss += e * e;
    }
    f.stderr_exponent = std::sqrt(ss / (n - 2) * n / den);
  }
  return f;
}

}  // namespace scarkit
