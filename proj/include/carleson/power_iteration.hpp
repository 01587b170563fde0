#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace carleson {

struct PowerIterationResult {
  double eigenvalue = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Largest eigenvalue of a symmetric positive semidefinite operator given as
// apply(x, y) : y = K x on R^dim. Starts from the all-ones vector and stops
// once successive Rayleigh quotients agree to `tol` relatively.
template <class Apply>
PowerIterationResult power_iteration(std::size_t dim, Apply&& apply, double tol, int max_iter) {
  PowerIterationResult res;
  if (dim == 0) {
    res.converged = true;
    return res;
  }
  std::vector<double> x(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
  std::vector<double> y(dim, 0.0);
  double previous = -1.0;
  for (int it = 1; it <= max_iter; ++it) {
    std::fill(y.begin(), y.end(), 0.0);
    apply(std::span<const double>(x), std::span<double>(y));
    double rq = 0.0;
    double norm2 = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      rq += x[i] * y[i];
      norm2 += y[i] * y[i];
    }
    res.eigenvalue = rq;
    res.iterations = it;
    if (norm2 == 0.0) {
      res.eigenvalue = 0.0;
      res.converged = true;
      return res;
    }
    if (previous >= 0.0 && std::abs(rq - previous) <= tol * std::abs(rq)) {
      res.converged = true;
      return res;
    }
    previous = rq;
    double inv = 1.0 / std::sqrt(norm2);
    for (std::size_t i = 0; i < dim; ++i) x[i] = y[i] * inv;
  }
  return res;
}

}  // namespace carleson
