#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace cospec {

struct PowerIterationOptions {
  double tol = 1e-10;
  long max_iterations = 200000;
};

struct PowerIterationResult {
  double rayleigh = 0.0;  // <Ax, x> / <x, x> at the returned x
  std::vector<double> vector;
  long iterations = 0;
  double residual = 0.0;  // ||Ax - rayleigh x|| / ||x||
  bool converged = false;
};

// Power iteration for an operator A that is self-adjoint and positive
// semidefinite in the weighted inner product <x, y> = sum w_i x_i y_i (unit
// weights when `weights` is empty). `apply(x, y)` must write y = A x.
template <class Apply>
PowerIterationResult power_iterate(Apply&& apply, std::vector<double> x, std::span<const double> weights,
                                   const PowerIterationOptions& opts) {
  const std::size_t n = x.size();
  auto w = [&](std::size_t i) { return weights.empty() ? 1.0 : weights[i]; };
  auto norm = [&](const std::vector<double>& v) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += w(i) * v[i] * v[i];
    return std::sqrt(acc);
  };
  PowerIterationResult out;
  if (n == 0) return out;
  double nx = norm(x);
  if (nx == 0.0) return out;
  for (auto& v : x) v /= nx;
  std::vector<double> y(n);
  for (long it = 1; it <= opts.max_iterations; ++it) {
    apply(x, y);
    double theta = 0.0;
    for (std::size_t i = 0; i < n; ++i) theta += w(i) * y[i] * x[i];
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - theta * x[i];
      res += w(i) * r * r;
    }
    out.rayleigh = theta;
    out.residual = std::sqrt(res);
    out.iterations = it;
    if (out.residual < opts.tol) {
      out.converged = true;
      break;
    }
    if (it == opts.max_iterations) break;
    const double ny = norm(y);
    if (ny == 0.0) break;
    for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / ny;
  }
  out.vector = std::move(x);
  return out;
}

}  // namespace cospec
