#pragma once

// Finite measure-preserving graphings (X, nu, (phi_i)): a finite weighted
// point set with partial bijections phi_i : U_i -> X and their inverses.
//
// Markov operator convention: M averages over the 2|I+| map slots (each map
// and its inverse) and an undefined slot leaves the point where it is. On a
// graphing coming from a Gamma-action every slot is defined and M is the
// usual averaging operator.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cospec/ball.hpp"
#include "cospec/errors.hpp"
#include "cospec/power_iteration.hpp"
#include "cospec/rng.hpp"

namespace cospec {

using PointId = std::int32_t;

struct PartialMap {
  std::string label;
  std::vector<PointId> image;  // image[x] = phi(x), or -1 when x is outside the domain
};

class Graphing {
 public:
  Graphing(std::vector<double> weights, std::vector<PartialMap> maps)
      : weights_(std::move(weights)), maps_(std::move(maps)) {
    const auto n = weights_.size();
    for (double w : weights_) {
      if (!(w > 0.0) || !std::isfinite(w)) throw ValidationError("graphing: point weights must be positive");
    }
    for (const auto& m : maps_) {
      if (m.image.size() != n) throw ValidationError("graphing: map '" + m.label + "' has the wrong length");
      std::vector<PointId> inv(n, -1);
      for (std::size_t x = 0; x < n; ++x) {
        const PointId y = m.image[x];
        if (y < 0) continue;
        if (static_cast<std::size_t>(y) >= n) throw ValidationError("graphing: map '" + m.label + "' leaves the point set");
        if (inv[static_cast<std::size_t>(y)] >= 0) throw ValidationError("graphing: map '" + m.label + "' is not injective");
        inv[static_cast<std::size_t>(y)] = static_cast<PointId>(x);
        const double wx = weights_[x], wy = weights_[static_cast<std::size_t>(y)];
        if (std::abs(wx - wy) > 1e-12 * std::max(wx, wy)) {
          throw ValidationError("graphing: map '" + m.label + "' does not preserve the measure");
        }
      }
      inverses_.push_back(std::move(inv));
    }
  }

  std::size_t size() const { return weights_.size(); }
  const std::vector<double>& weights() const { return weights_; }
  double weight(PointId x) const { return weights_[static_cast<std::size_t>(x)]; }
  const std::vector<PartialMap>& maps() const { return maps_; }
  int num_slots() const { return 2 * static_cast<int>(maps_.size()); }

  // Slot 2i is phi_i, slot 2i+1 its inverse; -1 when undefined.
  PointId apply(int slot, PointId x) const {
    const auto i = static_cast<std::size_t>(slot / 2);
    const auto& table = (slot % 2 == 0) ? maps_[i].image : inverses_[i];
    return table[static_cast<std::size_t>(x)];
  }

  bool is_total() const {
    for (const auto& m : maps_) {
      if (std::any_of(m.image.begin(), m.image.end(), [](PointId y) { return y < 0; })) return false;
    }
    return true;
  }

  double total_weight() const { return std::accumulate(weights_.begin(), weights_.end(), 0.0); }

  double weight_of(const std::vector<PointId>& set) const {
    double w = 0.0;
    for (auto x : set) w += weight(x);
    return w;
  }

 private:
  std::vector<double> weights_;
  std::vector<PartialMap> maps_;
  std::vector<std::vector<PointId>> inverses_;
};

// ---------------------------------------------------------------------------
// Text format:
//   weights: w_0 w_1 ... w_{n-1}
//   <label>: x -> y, x -> y, ...
// one map per line; '#' starts a comment.

inline Graphing parse_graphing(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<double> weights;
  bool have_weights = false;
  std::vector<std::pair<std::string, std::vector<std::pair<long, long>>>> raw;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto colon = line.find(':');
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (colon == std::string::npos) throw ValidationError("graphing line " + std::to_string(lineno) + ": missing ':'");
    std::string head = line.substr(0, colon);
    head.erase(std::remove_if(head.begin(), head.end(), [](unsigned char c) { return std::isspace(c); }), head.end());
    std::string body = line.substr(colon + 1);
    if (head == "weights") {
      std::istringstream ws(body);
      double w;
      while (ws >> w) weights.push_back(w);
      if (!ws.eof()) throw ValidationError("graphing line " + std::to_string(lineno) + ": bad weight");
      have_weights = true;
      continue;
    }
    if (head.empty()) throw ValidationError("graphing line " + std::to_string(lineno) + ": empty map label");
    std::vector<std::pair<long, long>> pairs;
    std::istringstream ps(body);
    std::string item;
    while (std::getline(ps, item, ',')) {
      if (item.find_first_not_of(" \t\r") == std::string::npos) continue;
      const auto arrow = item.find("->");
      if (arrow == std::string::npos) throw ValidationError("graphing line " + std::to_string(lineno) + ": expected 'x -> y'");
      try {
        pairs.emplace_back(std::stol(item.substr(0, arrow)), std::stol(item.substr(arrow + 2)));
      } catch (const std::logic_error&) {
        throw ValidationError("graphing line " + std::to_string(lineno) + ": bad point id");
      }
    }
    raw.emplace_back(head, std::move(pairs));
  }
  if (!have_weights) throw ValidationError("graphing: missing 'weights:' header");
  const auto n = static_cast<long>(weights.size());
  std::vector<PartialMap> maps;
  for (auto& [label, pairs] : raw) {
    PartialMap m{label, std::vector<PointId>(weights.size(), -1)};
    for (auto [x, y] : pairs) {
      if (x < 0 || x >= n || y < 0 || y >= n) throw ValidationError("graphing map '" + label + "': point out of range");
      if (m.image[static_cast<std::size_t>(x)] >= 0) throw ValidationError("graphing map '" + label + "': point mapped twice");
      m.image[static_cast<std::size_t>(x)] = static_cast<PointId>(y);
    }
    maps.push_back(std::move(m));
  }
  return Graphing(std::move(weights), std::move(maps));
}

inline std::string to_text(const Graphing& g) {
  std::ostringstream os;
  os.precision(17);
  os << "weights:";
  for (double w : g.weights()) os << ' ' << w;
  os << '\n';
  for (const auto& m : g.maps()) {
    os << m.label << ":";
    bool first = true;
    for (std::size_t x = 0; x < m.image.size(); ++x) {
      if (m.image[x] < 0) continue;
      os << (first ? " " : ", ") << x << " -> " << m.image[x];
      first = false;
    }
    os << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Orbit (ergodic) decomposition: for a finite system the ergodic components
// are the orbit classes, weighted by their mass.

struct OrbitDecomposition {
  std::vector<std::vector<PointId>> classes;  // each sorted; ordered by least point
  std::vector<double> class_weights;
  std::vector<std::int32_t> class_of;

  // tau: class masses normalized to a probability vector.
  std::vector<double> normalized_weights() const {
    const double total = std::accumulate(class_weights.begin(), class_weights.end(), 0.0);
    std::vector<double> out;
    for (double w : class_weights) out.push_back(w / total);
    return out;
  }
};

inline OrbitDecomposition orbit_decomposition(const Graphing& g) {
  OrbitDecomposition out;
  out.class_of.assign(g.size(), -1);
  std::vector<PointId> stack;
  for (std::size_t start = 0; start < g.size(); ++start) {
    if (out.class_of[start] >= 0) continue;
    const auto id = static_cast<std::int32_t>(out.classes.size());
    std::vector<PointId> members;
    out.class_of[start] = id;
    stack.assign(1, static_cast<PointId>(start));
    while (!stack.empty()) {
      const PointId x = stack.back();
      stack.pop_back();
      members.push_back(x);
      for (int s = 0; s < g.num_slots(); ++s) {
        const PointId y = g.apply(s, x);
        if (y >= 0 && out.class_of[static_cast<std::size_t>(y)] < 0) {
          out.class_of[static_cast<std::size_t>(y)] = id;
          stack.push_back(y);
        }
      }
    }
    std::sort(members.begin(), members.end());
    out.class_weights.push_back(g.weight_of(members));
    out.classes.push_back(std::move(members));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Mass transport principle: for a measure-preserving graphing,
//   int sum_{x' ~ x} K(x, x') dnu(x) = int sum_{x ~ x'} K(x, x') dnu(x').
// K is only evaluated on pairs in the same orbit.

using TransportKernel = std::function<double(PointId, PointId)>;

struct MtpResult {
  double lhs = 0.0;  // mass sent
  double rhs = 0.0;  // mass received

  nlohmann::ordered_json to_json() const {
    return {{"lhs", lhs}, {"rhs", rhs}, {"difference", lhs - rhs}};
  }
};

inline MtpResult mtp_check(const Graphing& g, const TransportKernel& kernel) {
  const auto orbits = orbit_decomposition(g);
  MtpResult r;
  for (const auto& cls : orbits.classes) {
    for (PointId x : cls) {
      double sent = 0.0;
      for (PointId y : cls) sent += kernel(x, y);
      r.lhs += g.weight(x) * sent;
    }
    for (PointId y : cls) {
      double received = 0.0;
      for (PointId x : cls) received += kernel(x, y);
      r.rhs += g.weight(y) * received;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Quadratic-form helpers.

inline std::vector<double> markov_apply(const Graphing& g, const std::vector<double>& f) {
  std::vector<double> out(g.size(), 0.0);
  const int slots = g.num_slots();
  if (slots == 0) return f;
  for (std::size_t x = 0; x < g.size(); ++x) {
    double acc = 0.0;
    for (int s = 0; s < slots; ++s) {
      const PointId y = g.apply(s, static_cast<PointId>(x));
      acc += f[y >= 0 ? static_cast<std::size_t>(y) : x];
    }
    out[x] = acc / slots;
  }
  return out;
}

inline double inner(const Graphing& g, const std::vector<double>& f, const std::vector<double>& h) {
  double acc = 0.0;
  for (std::size_t x = 0; x < g.size(); ++x) acc += g.weights()[x] * f[x] * h[x];
  return acc;
}

// <(I - M) f, f>.
inline double dirichlet_form(const Graphing& g, const std::vector<double>& f) {
  const auto mf = markov_apply(g, f);
  return inner(g, f, f) - inner(g, mf, f);
}

// int(P) = P \ boundary(X \ P): points of P whose defined neighbors all lie in P.
inline std::vector<char> graphing_interior(const Graphing& g, const std::vector<char>& in_set) {
  std::vector<char> out(g.size(), 0);
  for (std::size_t x = 0; x < g.size(); ++x) {
    if (!in_set[x]) continue;
    bool inner_point = true;
    for (int s = 0; s < g.num_slots() && inner_point; ++s) {
      const PointId y = g.apply(s, static_cast<PointId>(x));
      if (y >= 0 && !in_set[static_cast<std::size_t>(y)]) inner_point = false;
    }
    out[x] = inner_point ? 1 : 0;
  }
  return out;
}

inline std::vector<char> membership_mask(std::size_t n, const std::vector<PointId>& set) {
  std::vector<char> mask(n, 0);
  for (auto x : set) {
    if (x < 0 || static_cast<std::size_t>(x) >= n) throw ValidationError("point id out of range");
    mask[static_cast<std::size_t>(x)] = 1;
  }
  return mask;
}

// ---------------------------------------------------------------------------
// Test functions: nonnegative, nonzero, supported on int(P).

struct TestFunction {
  std::vector<double> values;
  std::vector<PointId> component;  // the finite connected component P
};

inline void validate_test_function(const Graphing& g, const TestFunction& f) {
  if (f.values.size() != g.size()) throw ValidationError("test function: wrong number of values");
  const auto interior = graphing_interior(g, membership_mask(g.size(), f.component));
  bool nonzero = false;
  for (std::size_t x = 0; x < g.size(); ++x) {
    if (f.values[x] < 0.0 || !std::isfinite(f.values[x])) throw ValidationError("test function: values must be nonnegative");
    if (f.values[x] != 0.0) {
      nonzero = true;
      if (!interior[x]) throw ValidationError("test function: support leaves the interior of its component");
    }
  }
  if (!nonzero) throw ValidationError("test function: must be nonzero");
}

// ---------------------------------------------------------------------------
// Embedded spectral radius of a finite connected component P: the largest
// Rayleigh quotient <Mf, f>/<f, f> over f supported on int(P), taken per
// connected component of P. The value is a supremum over this finite family;
// 0 when every interior is empty.

struct EmbeddedResult {
  double value = 0.0;
  std::vector<double> component_values;  // one per component of P, in order of least point
  bool converged = true;
};

inline EmbeddedResult embedded_spectral_radius(const Graphing& g, const std::vector<PointId>& set,
                                               const PowerIterationOptions& opts = {}) {
  const auto in_set = membership_mask(g.size(), set);
  const auto interior = graphing_interior(g, in_set);
  const int slots = g.num_slots();
  EmbeddedResult out;

  // Components of the graphing restricted to P.
  std::vector<std::int32_t> comp(g.size(), -1);
  std::vector<std::vector<PointId>> components;
  for (std::size_t start = 0; start < g.size(); ++start) {
    if (!in_set[start] || comp[start] >= 0) continue;
    const auto id = static_cast<std::int32_t>(components.size());
    std::vector<PointId> members{static_cast<PointId>(start)};
    comp[start] = id;
    for (std::size_t k = 0; k < members.size(); ++k) {
      for (int s = 0; s < slots; ++s) {
        const PointId y = g.apply(s, members[k]);
        if (y >= 0 && in_set[static_cast<std::size_t>(y)] && comp[static_cast<std::size_t>(y)] < 0) {
          comp[static_cast<std::size_t>(y)] = id;
          members.push_back(y);
        }
      }
    }
    components.push_back(std::move(members));
  }

  for (const auto& members : components) {
    std::vector<PointId> support;
    for (auto x : members) {
      if (interior[static_cast<std::size_t>(x)]) support.push_back(x);
    }
    std::sort(support.begin(), support.end());
    if (support.empty() || slots == 0) {
      out.component_values.push_back(support.empty() ? 0.0 : 1.0);
      continue;
    }
    const std::size_t m = support.size();
    std::map<PointId, std::size_t> local;
    for (std::size_t k = 0; k < m; ++k) local.emplace(support[k], k);
    // nb[k * slots + s]: local index of the slot-s image, or -1 if it lies
    // outside the support; -2 marks a lazy (undefined) slot.
    std::vector<std::int64_t> nb(m * static_cast<std::size_t>(slots));
    std::vector<double> w(m);
    for (std::size_t k = 0; k < m; ++k) {
      w[k] = g.weight(support[k]);
      for (int s = 0; s < slots; ++s) {
        const PointId y = g.apply(s, support[k]);
        if (y < 0) {
          nb[k * slots + s] = -2;
        } else {
          auto it = local.find(y);
          nb[k * slots + s] = it == local.end() ? -1 : static_cast<std::int64_t>(it->second);
        }
      }
    }
    auto restricted = [&](const std::vector<double>& x, std::vector<double>& y) {
      for (std::size_t k = 0; k < m; ++k) {
        double acc = 0.0;
        for (int s = 0; s < slots; ++s) {
          const auto t = nb[k * slots + s];
          if (t == -2) {
            acc += x[k];
          } else if (t >= 0) {
            acc += x[static_cast<std::size_t>(t)];
          }
        }
        y[k] = acc / slots;
      }
    };
    auto shifted = [&](const std::vector<double>& x, std::vector<double>& y) {
      restricted(x, y);
      for (std::size_t k = 0; k < m; ++k) y[k] = 0.5 * (x[k] + y[k]);
    };
    PowerIterationOptions shifted_opts = opts;
    shifted_opts.tol = opts.tol / 2;
    auto pi = power_iterate(shifted, std::vector<double>(m, 1.0), w, shifted_opts);
    std::vector<double> mx(m);
    restricted(pi.vector, mx);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      num += w[k] * mx[k] * pi.vector[k];
      den += w[k] * pi.vector[k] * pi.vector[k];
    }
    out.component_values.push_back(den > 0.0 ? num / den : 0.0);
    out.converged = out.converged && pi.converged;
  }
  for (double v : out.component_values) out.value = std::max(out.value, v);
  return out;
}

// ---------------------------------------------------------------------------
// Cesaro average x -> int f(x gamma^{-1}) dmu^m(gamma) with
// mu^m = (1/m) sum_{i<m} mu^{*i}, i.e. (1/m) sum_{i<m} M^i f.

inline std::vector<double> cesaro_average(const Graphing& g, const std::vector<double>& f, int m) {
  if (m < 1) throw ValidationError("cesaro_average: m must be >= 1");
  if (f.size() != g.size()) throw ValidationError("cesaro_average: wrong function length");
  std::vector<double> term = f, sum = f;
  for (int i = 1; i < m; ++i) {
    term = markov_apply(g, term);
    for (std::size_t x = 0; x < sum.size(); ++x) sum[x] += term[x];
  }
  for (auto& v : sum) v /= m;
  return sum;
}

// ---------------------------------------------------------------------------
// Rokhlin-type partition X = B + A_1 + ... + A_N with nu(B) <= delta nu(X) and
// A_j cap phi_i(A_j cap U_i) contained in Fix(phi_i) for every map.
//
// Per map phi: points on finite forward chains are split by the parity of
// their distance to the end of the chain (the sets E_n); fixed points form
// one class; points on even cycles are 2-colored by parity; points on odd
// cycles of period p get one of p phase classes counted from the least point
// of the cycle. Odd periods beyond the class cap go to B, and the cap is
// raised when B would exceed its share delta/|I+|. The per-map partitions are
// combined by the product partition.

struct RokhlinMapReport {
  std::string label;
  int classes = 0;
  int class_cap = 0;
  double absorbed_weight = 0.0;
  int chain_points = 0;
  int cycle_points = 0;
  int fixed_points = 0;
};

struct RokhlinPartition {
  std::vector<PointId> remainder;              // B
  std::vector<std::vector<PointId>> classes;   // A_1 .. A_N, ordered by least point
  std::vector<RokhlinMapReport> maps;

  std::size_t num_classes() const { return classes.size(); }
};

inline constexpr int kDefaultRokhlinClassCap = 64;

inline RokhlinPartition rokhlin_partition(const Graphing& g, double delta, int class_cap = kDefaultRokhlinClassCap) {
  if (!(delta > 0.0)) throw ValidationError("rokhlin_partition: delta must be positive");
  if (class_cap < 3) throw ValidationError("rokhlin_partition: class cap must be at least 3");
  const std::size_t n = g.size();
  const std::size_t num_maps = g.maps().size();
  const double budget = num_maps == 0 ? 0.0 : delta * g.total_weight() / static_cast<double>(num_maps);

  RokhlinPartition out;
  std::vector<char> in_b(n, 0);
  // label[i][x]: class label of x for map i (-1 when absorbed into B).
  std::vector<std::vector<std::int64_t>> labels(num_maps, std::vector<std::int64_t>(n, -1));

  for (std::size_t i = 0; i < num_maps; ++i) {
    const int fwd = static_cast<int>(2 * i);
    const int bwd = fwd + 1;
    RokhlinMapReport rep;
    rep.label = g.maps()[i].label;
    auto& label = labels[i];

    // Chains: distance to the end of the forward chain, by backward BFS from
    // the points outside the domain.
    std::vector<std::int64_t> depth(n, -1);
    std::vector<PointId> queue;
    for (std::size_t x = 0; x < n; ++x) {
      if (g.apply(fwd, static_cast<PointId>(x)) < 0) {
        depth[x] = 0;
        queue.push_back(static_cast<PointId>(x));
      }
    }
    for (std::size_t k = 0; k < queue.size(); ++k) {
      const PointId x = queue[k];
      const PointId y = g.apply(bwd, x);
      if (y >= 0 && depth[static_cast<std::size_t>(y)] < 0) {
        depth[static_cast<std::size_t>(y)] = depth[static_cast<std::size_t>(x)] + 1;
        queue.push_back(y);
      }
    }
    constexpr std::int64_t kEven = 0, kOdd = 1, kFixed = 2;
    for (std::size_t x = 0; x < n; ++x) {
      if (depth[x] >= 0) {
        label[x] = depth[x] % 2 == 0 ? kEven : kOdd;
        ++rep.chain_points;
      }
    }

    // Cycles: everything else.
    std::vector<char> visited(n, 0);
    std::map<std::int64_t, std::vector<std::vector<PointId>>> odd_cycles;  // period -> cycles from least point
    for (std::size_t x = 0; x < n; ++x) {
      if (depth[x] >= 0 || visited[x]) continue;
      std::vector<PointId> cycle;
      PointId y = static_cast<PointId>(x);
      do {
        visited[static_cast<std::size_t>(y)] = 1;
        cycle.push_back(y);
        y = g.apply(fwd, y);
      } while (y != static_cast<PointId>(x));
      // x is the least point of its cycle because points are scanned in order.
      const auto period = static_cast<std::int64_t>(cycle.size());
      rep.cycle_points += static_cast<int>(period);
      if (period == 1) {
        label[x] = kFixed;
        ++rep.fixed_points;
      } else if (period % 2 == 0) {
        for (std::size_t k = 0; k < cycle.size(); ++k) label[static_cast<std::size_t>(cycle[k])] = k % 2 == 0 ? kEven : kOdd;
      } else {
        odd_cycles[period].push_back(std::move(cycle));
      }
    }

    // Odd periods in ascending order while within the cap; the rest go to B
    // unless that would exceed the budget, in which case the cap is raised.
    int used = 3;
    double period_weight_total = 0.0;
    std::vector<std::pair<std::int64_t, double>> period_weights;
    for (const auto& [period, cycles] : odd_cycles) {
      double w = 0.0;
      for (const auto& c : cycles) w += g.weight_of(c);
      period_weights.emplace_back(period, w);
      period_weight_total += w;
    }
    int cap = class_cap;
    double absorbed = period_weight_total;
    std::size_t kept = 0;
    for (; kept < period_weights.size(); ++kept) {
      const auto [period, w] = period_weights[kept];
      if (used + period > cap) {
        if (absorbed <= budget) break;
        cap = used + static_cast<int>(period);
      }
      used += static_cast<int>(period);
      absorbed -= w;
    }
    for (std::size_t k = 0; k < period_weights.size(); ++k) {
      const auto period = period_weights[k].first;
      for (const auto& c : odd_cycles[period]) {
        for (std::size_t phase = 0; phase < c.size(); ++phase) {
          if (k < kept) {
            label[static_cast<std::size_t>(c[phase])] = 3 + period * (period - 1) / 2 + static_cast<std::int64_t>(phase);
          } else {
            in_b[static_cast<std::size_t>(c[phase])] = 1;
          }
        }
      }
    }
    rep.class_cap = cap;
    rep.absorbed_weight = absorbed;
    {
      std::vector<std::int64_t> distinct;
      for (std::size_t x = 0; x < n; ++x) {
        if (label[x] >= 0) distinct.push_back(label[x]);
      }
      std::sort(distinct.begin(), distinct.end());
      rep.classes = static_cast<int>(std::unique(distinct.begin(), distinct.end()) - distinct.begin());
    }
    out.maps.push_back(std::move(rep));
  }

  // Product partition over all maps.
  std::map<std::vector<std::int64_t>, std::size_t> class_index;
  for (std::size_t x = 0; x < n; ++x) {
    if (in_b[x]) {
      out.remainder.push_back(static_cast<PointId>(x));
      continue;
    }
    std::vector<std::int64_t> key(num_maps);
    for (std::size_t i = 0; i < num_maps; ++i) key[i] = labels[i][x];
    auto [it, fresh] = class_index.try_emplace(std::move(key), out.classes.size());
    if (fresh) out.classes.emplace_back();
    out.classes[it->second].push_back(static_cast<PointId>(x));
  }
  return out;
}

struct RokhlinCheck {
  bool partitions = false;       // B and the A_j partition X
  bool remainder_small = false;  // nu(B) <= delta nu(X)
  bool separated = false;        // A_j cap phi_i(A_j cap U_i) in Fix(phi_i), all i, j
  bool ok() const { return partitions && remainder_small && separated; }
};

// Set-algebra verification of the partition invariants.
inline RokhlinCheck verify_rokhlin(const Graphing& g, const RokhlinPartition& p, double delta) {
  RokhlinCheck c;
  std::vector<std::int32_t> owner(g.size(), -2);
  bool disjoint = true;
  for (auto x : p.remainder) {
    if (owner[static_cast<std::size_t>(x)] != -2) disjoint = false;
    owner[static_cast<std::size_t>(x)] = -1;
  }
  for (std::size_t j = 0; j < p.classes.size(); ++j) {
    for (auto x : p.classes[j]) {
      if (owner[static_cast<std::size_t>(x)] != -2) disjoint = false;
      owner[static_cast<std::size_t>(x)] = static_cast<std::int32_t>(j);
    }
  }
  c.partitions = disjoint && std::none_of(owner.begin(), owner.end(), [](std::int32_t o) { return o == -2; });
  c.remainder_small = g.weight_of(p.remainder) <= delta * g.total_weight() + 1e-12 * g.total_weight();
  c.separated = true;
  for (std::size_t x = 0; x < g.size() && c.separated; ++x) {
    if (owner[x] < 0) continue;
    for (int s = 0; s < g.num_slots(); ++s) {
      const PointId y = g.apply(s, static_cast<PointId>(x));
      if (y >= 0 && y != static_cast<PointId>(x) && owner[static_cast<std::size_t>(y)] == owner[x]) {
        c.separated = false;
        break;
      }
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// Product test function f = 1_F x f2 on the product of a Schreier window X1
// with a finite Gamma-system X2 (maps total, map i acting as generator i).

struct ProductTestFunctionReport {
  double folner_defect = 0.0;      // eps_1 = |FS sym-diff F| / |F|
  double lambda2 = 0.0;            // 1 - <(I-M)f2, f2> / ||f2||^2
  double form = 0.0;               // <(I-M)f, f> on the product
  double norm_squared = 0.0;       // ||f||^2 = |F| ||f2||^2
  double bound = 0.0;              // (1 - lambda2 + |S| eps_1) ||f||^2
  double slack = 0.0;              // bound - form
  int generators = 0;              // |S|
  bool support_in_interior = false;  // supp f in int((F u dF) x P2)
  std::vector<double> component_shares;  // ||f||^2_{orbit} / ||f||^2 for orbits meeting supp f

  bool holds(double tol = 1e-9) const { return slack >= -tol * std::max(1.0, bound); }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["folner_defect"] = folner_defect;
    j["lambda2"] = lambda2;
    j["form"] = form;
    j["norm_squared"] = norm_squared;
    j["bound"] = bound;
    j["slack"] = slack;
    j["generators"] = generators;
    j["support_in_interior"] = support_in_interior;
    j["component_shares"] = component_shares;
    j["holds"] = holds();
    return j;
  }
};

struct ProductTestFunction {
  Graphing product;
  std::vector<double> values;
  ProductTestFunctionReport report;
};

// Product point (v, x2) has index v * |X2| + x2 and weight nu2(x2).
inline ProductTestFunction product_test_function(const SchreierBall& x1, const std::vector<std::int32_t>& folner_set,
                                                 const Graphing& x2, const TestFunction& f2) {
  if (static_cast<int>(x2.maps().size()) != x1.rank) {
    throw ValidationError("product_test_function: X2 must have one map per generator of the group");
  }
  if (!x2.is_total()) throw ValidationError("product_test_function: X2 must be a Gamma-action (total maps)");
  validate_test_function(x2, f2);
  if (folner_set.empty()) throw ValidationError("product_test_function: empty Folner set");
  for (auto v : folner_set) {
    if (v < 0 || static_cast<std::size_t>(v) >= x1.size()) throw ValidationError("product_test_function: F outside the ball");
    if (!x1.complete_at(static_cast<std::size_t>(v))) {
      throw ValidationError("product_test_function: F touches the rim of the window");
    }
  }
  const std::size_t n1 = x1.size(), n2 = x2.size();
  std::vector<double> weights(n1 * n2);
  for (std::size_t v = 0; v < n1; ++v) {
    for (std::size_t y = 0; y < n2; ++y) weights[v * n2 + y] = x2.weights()[y];
  }
  std::vector<PartialMap> maps;
  for (int i = 0; i < x1.rank; ++i) {
    PartialMap m{x2.maps()[static_cast<std::size_t>(i)].label, std::vector<PointId>(n1 * n2, -1)};
    for (std::size_t v = 0; v < n1; ++v) {
      const auto t = x1.neighbor(v, 2 * i);
      if (t < 0) continue;
      for (std::size_t y = 0; y < n2; ++y) {
        m.image[v * n2 + y] = static_cast<PointId>(static_cast<std::size_t>(t) * n2 +
                                                   static_cast<std::size_t>(x2.apply(2 * i, static_cast<PointId>(y))));
      }
    }
    maps.push_back(std::move(m));
  }
  ProductTestFunction out{Graphing(std::move(weights), std::move(maps)), std::vector<double>(n1 * n2, 0.0), {}};
  std::vector<char> in_f(n1, 0);
  for (auto v : folner_set) in_f[static_cast<std::size_t>(v)] = 1;
  for (std::size_t v = 0; v < n1; ++v) {
    if (!in_f[v]) continue;
    for (std::size_t y = 0; y < n2; ++y) out.values[v * n2 + y] = f2.values[y];
  }

  auto& rep = out.report;
  rep.generators = 2 * x1.rank;
  {
    // eps_1 over the window's known edges; F has all neighbors known.
    std::vector<char> hit(n1, 0);
    for (auto v : folner_set) {
      for (int s = 0; s < x1.degree(); ++s) hit[static_cast<std::size_t>(x1.neighbor(static_cast<std::size_t>(v), s))] = 1;
    }
    std::size_t sym = 0, size = 0;
    for (std::size_t v = 0; v < n1; ++v) {
      sym += hit[v] != in_f[v] ? 1 : 0;
      size += in_f[v] ? 1 : 0;
    }
    rep.folner_defect = static_cast<double>(sym) / static_cast<double>(size);
  }
  const double f2_norm = inner(x2, f2.values, f2.values);
  rep.lambda2 = 1.0 - dirichlet_form(x2, f2.values) / f2_norm;
  rep.form = dirichlet_form(out.product, out.values);
  rep.norm_squared = inner(out.product, out.values, out.values);
  rep.bound = (1.0 - rep.lambda2 + rep.generators * rep.folner_defect) * rep.norm_squared;
  rep.slack = rep.bound - rep.form;

  // P = (F u dF) x P2 and its interior.
  {
    std::vector<char> closure = in_f;
    for (auto v : folner_set) {
      for (int s = 0; s < x1.degree(); ++s) closure[static_cast<std::size_t>(x1.neighbor(static_cast<std::size_t>(v), s))] = 1;
    }
    const auto p2 = membership_mask(n2, f2.component);
    std::vector<char> p(n1 * n2, 0);
    for (std::size_t v = 0; v < n1; ++v) {
      for (std::size_t y = 0; y < n2; ++y) p[v * n2 + y] = closure[v] && p2[y];
    }
    const auto interior = graphing_interior(out.product, p);
    rep.support_in_interior = true;
    for (std::size_t k = 0; k < out.values.size(); ++k) {
      if (out.values[k] != 0.0 && !interior[k]) rep.support_in_interior = false;
    }
  }
  {
    const auto orbits = orbit_decomposition(out.product);
    for (const auto& cls : orbits.classes) {
      double share = 0.0;
      for (auto x : cls) share += out.product.weight(x) * out.values[static_cast<std::size_t>(x)] * out.values[static_cast<std::size_t>(x)];
      if (share > 0.0) rep.component_shares.push_back(share / rep.norm_squared);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Random measure-preserving graphings: points are split into weight groups
// and every map is a random partial bijection inside each group, so weights
// are preserved by construction.

struct RandomGraphingOptions {
  int points = 100;
  int maps = 2;
  int weight_groups = 3;
  double domain_probability = 0.9;  // 1.0 gives total maps (a Gamma-action)
};

inline Graphing random_graphing(Rng& rng, const RandomGraphingOptions& opts) {
  if (opts.points < 1 || opts.maps < 0 || opts.weight_groups < 1) throw ValidationError("random_graphing: bad options");
  const auto n = static_cast<std::size_t>(opts.points);
  std::vector<double> group_weight;
  for (int k = 0; k < opts.weight_groups; ++k) group_weight.push_back(0.5 + 1.5 * rng.uniform01());
  std::vector<std::vector<PointId>> groups(static_cast<std::size_t>(opts.weight_groups));
  std::vector<double> weights(n);
  for (std::size_t x = 0; x < n; ++x) {
    const auto k = rng.uniform(static_cast<std::uint64_t>(opts.weight_groups));
    groups[k].push_back(static_cast<PointId>(x));
    weights[x] = group_weight[k];
  }
  std::vector<PartialMap> maps;
  for (int i = 0; i < opts.maps; ++i) {
    PartialMap m{"phi" + std::to_string(i), std::vector<PointId>(n, -1)};
    for (const auto& grp : groups) {
      const auto perm = rng.permutation(static_cast<int>(grp.size()));
      for (std::size_t k = 0; k < grp.size(); ++k) {
        if (opts.domain_probability >= 1.0 || rng.bernoulli(opts.domain_probability)) {
          m.image[static_cast<std::size_t>(grp[k])] = grp[static_cast<std::size_t>(perm[k])];
        }
      }
    }
    maps.push_back(std::move(m));
  }
  return Graphing(std::move(weights), std::move(maps));
}

inline nlohmann::ordered_json to_json(const RokhlinPartition& p, const Graphing& g, double delta) {
  nlohmann::ordered_json j;
  const auto check = verify_rokhlin(g, p, delta);
  j["delta"] = delta;
  j["classes"] = p.num_classes();
  j["remainder_points"] = p.remainder.size();
  j["remainder_weight"] = g.weight_of(p.remainder);
  j["total_weight"] = g.total_weight();
  j["partition_ok"] = check.partitions;
  j["remainder_ok"] = check.remainder_small;
  j["separation_ok"] = check.separated;
  nlohmann::ordered_json maps = nlohmann::ordered_json::array();
  for (const auto& m : p.maps) {
    maps.push_back({{"label", m.label},
                    {"classes", m.classes},
                    {"class_cap", m.class_cap},
                    {"absorbed_weight", m.absorbed_weight},
                    {"chain_points", m.chain_points},
                    {"cycle_points", m.cycle_points},
                    {"fixed_points", m.fixed_points}});
  }
  j["maps"] = maps;
  j["class_sizes"] = nlohmann::ordered_json::array();
  for (const auto& c : p.classes) j["class_sizes"].push_back(c.size());
  return j;
}

}  // namespace cospec
