#pragma once

// Co-spectral radius estimators for M = (1/|S|) sum_{s in S} s acting on
// functions on H\Gamma, and the Cohen-Grigorchuk bridge from cogrowth.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cospec/ball.hpp"
#include "cospec/errors.hpp"
#include "cospec/power_iteration.hpp"
#include "cospec/stallings.hpp"

namespace cospec {

enum class EstimateMethod { dirichlet, return_probability };

inline std::string to_string(EstimateMethod m) {
  return m == EstimateMethod::dirichlet ? "dirichlet" : "return_probability";
}

// A certified lower bound for rho(H\Gamma).
struct SpectralEstimate {
  double value = 0.0;
  EstimateMethod method = EstimateMethod::dirichlet;
  int radius = 0;  // ball radius (dirichlet) or truncation radius (return probability)
  int steps = 0;   // 2n for return probability
  long iterations = 0;
  double residual = 0.0;
  bool converged = true;
  bool truncated = false;
  bool empty_interior = false;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["method"] = to_string(method);
    j["value"] = value;
    j["radius"] = radius;
    if (method == EstimateMethod::return_probability) j["steps"] = steps;
    j["iterations"] = iterations;
    j["residual"] = residual;
    j["converged"] = converged;
    j["truncated"] = truncated;
    if (empty_interior) j["empty_interior"] = true;
    return j;
  }
};

struct DirichletSolution {
  SpectralEstimate estimate;
  std::vector<std::int32_t> interior;  // ball vertices carrying the test function
  std::vector<double> vector;          // values on `interior`
};

// Top Rayleigh quotient of M restricted to functions supported on the
// interior of the ball (vertices whose whole S-neighborhood is in the ball).
// Power iteration runs on (I + PMP)/2 so bipartite windows still converge;
// the reported value is the exact Rayleigh quotient of M at the final vector,
// hence a lower bound for rho whether or not the iteration converged.
inline DirichletSolution dirichlet_solve(const SchreierBall& ball, const PowerIterationOptions& opts = {}) {
  if (ball.radius < 1 && !ball.closed()) throw ValidationError("dirichlet_lower_bound: ball radius must be >= 1");
  if (!(opts.tol > 0.0)) throw ValidationError("dirichlet_lower_bound: tol must be positive");
  DirichletSolution sol;
  sol.estimate.method = EstimateMethod::dirichlet;
  sol.estimate.radius = ball.radius;

  const int deg = ball.degree();
  std::vector<std::int32_t> compact(ball.size(), -1);
  for (std::size_t v = 0; v < ball.size(); ++v) {
    if (ball.complete_at(v)) {
      compact[v] = static_cast<std::int32_t>(sol.interior.size());
      sol.interior.push_back(static_cast<std::int32_t>(v));
    }
  }
  const std::size_t m = sol.interior.size();
  if (m == 0) {
    sol.estimate.empty_interior = true;
    return sol;
  }
  std::vector<std::int32_t> nb(m * static_cast<std::size_t>(deg));
  for (std::size_t k = 0; k < m; ++k) {
    for (int s = 0; s < deg; ++s) nb[k * deg + s] = compact[static_cast<std::size_t>(ball.neighbor(sol.interior[k], s))];
  }
  const double inv_deg = 1.0 / deg;
  auto restricted_m = [&](const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t k = 0; k < m; ++k) {
      double acc = 0.0;
      const auto* row = &nb[k * deg];
      for (int s = 0; s < deg; ++s) {
        if (row[s] >= 0) acc += x[static_cast<std::size_t>(row[s])];
      }
      y[k] = acc * inv_deg;
    }
  };
  auto shifted = [&](const std::vector<double>& x, std::vector<double>& y) {
    restricted_m(x, y);
    for (std::size_t k = 0; k < m; ++k) y[k] = 0.5 * (x[k] + y[k]);
  };

  std::vector<double> start(m, 0.0);
  if (compact[0] >= 0) {
    start[static_cast<std::size_t>(compact[0])] = 1.0;
  } else {
    std::fill(start.begin(), start.end(), 1.0);
  }
  PowerIterationOptions shifted_opts = opts;
  shifted_opts.tol = opts.tol / 2;
  auto pi = power_iterate(shifted, std::move(start), {}, shifted_opts);

  std::vector<double> mx(m);
  restricted_m(pi.vector, mx);
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    num += mx[k] * pi.vector[k];
    den += pi.vector[k] * pi.vector[k];
  }
  // ||M|| <= 1; clamp rounding above it.
  sol.estimate.value = den > 0.0 ? std::min(1.0, num / den) : 0.0;
  sol.estimate.iterations = pi.iterations;
  sol.estimate.residual = 2.0 * pi.residual;
  sol.estimate.converged = pi.converged;
  sol.vector = std::move(pi.vector);
  return sol;
}

inline SpectralEstimate dirichlet_lower_bound(const SchreierBall& ball, double tol = 1e-10, long max_iterations = 200000) {
  return dirichlet_solve(ball, {tol, max_iterations}).estimate;
}

// Return probabilities p_k(o, o), k = 0..steps, of the simple random walk
// driven by M, computed exactly on the ball of the given radius. Mass that
// leaves the window is dropped, so each value is a lower bound, and exact
// whenever radius >= steps / 2.
inline std::vector<double> return_probabilities(const SchreierBall& ball, int steps) {
  const int deg = ball.degree();
  std::vector<double> p(ball.size(), 0.0), q(ball.size());
  p[0] = 1.0;
  std::vector<double> out{1.0};
  for (int k = 1; k <= steps; ++k) {
    std::fill(q.begin(), q.end(), 0.0);
    for (std::size_t v = 0; v < ball.size(); ++v) {
      if (p[v] == 0.0) continue;
      const double share = p[v] / deg;
      for (int s = 0; s < deg; ++s) {
        const auto t = ball.neighbor(v, s);
        if (t >= 0) q[static_cast<std::size_t>(t)] += share;
      }
    }
    std::swap(p, q);
    out.push_back(p[0]);
  }
  return out;
}

// p_{2n}(o, o)^{1/(2n)} <= rho, by self-adjointness of M. The walk is tracked
// on the ball of radius `truncation_radius` (default n, which is already
// exact for returning paths); a smaller radius or a vertex-cap hit marks the
// estimate truncated but it stays a lower bound.
inline SpectralEstimate return_probability_bound(const SubgroupOracle& oracle, int n, int truncation_radius = -1,
                                                 std::size_t vertex_cap = kDefaultVertexCap) {
  if (n < 1) throw ValidationError("return_probability_bound: n must be >= 1");
  int radius = truncation_radius < 0 ? n : truncation_radius;
  SpectralEstimate est;
  est.method = EstimateMethod::return_probability;
  est.steps = 2 * n;
  SchreierBall ball;
  try {
    ball = generate_ball(oracle, radius, vertex_cap);
  } catch (const PartialBallError& e) {
    radius = e.attained_radius();
    ball = generate_ball(oracle, radius, vertex_cap);
  }
  est.radius = radius;
  est.truncated = radius < n;
  const auto p = return_probabilities(ball, 2 * n);
  est.value = std::pow(p.back(), 1.0 / (2.0 * n));
  est.iterations = 2 * n;
  return est;
}

// Cohen-Grigorchuk: rho = sqrt(2d-1)/d when alpha <= sqrt(2d-1), otherwise
// (alpha + (2d-1)/alpha) / (2d).
inline double grigorchuk_rho(double alpha, int d) {
  if (d < 2) throw ValidationError("grigorchuk_rho: rank must be >= 2");
  const double top = 2.0 * d - 1.0;
  if (alpha < 0.0 || alpha > top + 1e-9) throw ValidationError("grigorchuk_rho: alpha must lie in [0, 2d-1]");
  const double root = std::sqrt(top);
  if (alpha <= root) return root / d;
  return (alpha + top / alpha) / (2.0 * d);
}

// delta = ln(alpha); empty (undefined) for the trivial subgroup.
inline std::optional<double> critical_exponent(const CogrowthResult& c) {
  if (c.alpha < 0.0) throw ValidationError("critical_exponent: alpha must be nonnegative");
  if (c.alpha == 0.0) return std::nullopt;
  return std::log(c.alpha);
}

}  // namespace cospec
