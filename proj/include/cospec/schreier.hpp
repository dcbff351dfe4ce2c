#pragma once

// Operations on Schreier-graph windows: interior/boundary of vertex sets,
// Folner-set search, product graphs and their double-coset components, and
// exact counts of reduced closed paths at the root.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "cospec/ball.hpp"
#include "cospec/errors.hpp"
#include "cospec/oracle.hpp"
#include "cospec/spectral.hpp"

namespace cospec {

// A vertex set P of a ball with its outer boundary SP \ P and interior
// {x in P : Sx in P}. `truncated` is set when some member has a neighbor
// outside the window, in which case the boundary is a lower estimate and
// such members are not interior.
struct ComponentSet {
  std::vector<std::int32_t> members;
  std::vector<std::int32_t> interior;
  std::vector<std::int32_t> outer_boundary;
  bool truncated = false;
};

inline ComponentSet interior_boundary(const SchreierBall& ball, std::vector<std::int32_t> members) {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  std::vector<char> in(ball.size(), 0);
  for (auto v : members) {
    if (v < 0 || static_cast<std::size_t>(v) >= ball.size()) throw ValidationError("vertex set outside the ball");
    in[static_cast<std::size_t>(v)] = 1;
  }
  ComponentSet out;
  std::vector<char> on_boundary(ball.size(), 0);
  for (auto v : members) {
    bool inner = true;
    for (int s = 0; s < ball.degree(); ++s) {
      const auto t = ball.neighbor(static_cast<std::size_t>(v), s);
      if (t < 0) {
        out.truncated = true;
        inner = false;
      } else if (!in[static_cast<std::size_t>(t)]) {
        inner = false;
        on_boundary[static_cast<std::size_t>(t)] = 1;
      }
    }
    if (inner) out.interior.push_back(v);
  }
  for (std::size_t v = 0; v < ball.size(); ++v) {
    if (on_boundary[v]) out.outer_boundary.push_back(static_cast<std::int32_t>(v));
  }
  out.members = std::move(members);
  return out;
}

// |FS sym-diff F| / |F| over the window's known edges.
inline double folner_defect(const SchreierBall& ball, const std::vector<std::int32_t>& members) {
  if (members.empty()) throw ValidationError("folner_defect: empty set");
  std::vector<char> in(ball.size(), 0), hit(ball.size(), 0);
  for (auto v : members) in[static_cast<std::size_t>(v)] = 1;
  for (auto v : members) {
    for (int s = 0; s < ball.degree(); ++s) {
      const auto t = ball.neighbor(static_cast<std::size_t>(v), s);
      if (t >= 0) hit[static_cast<std::size_t>(t)] = 1;
    }
  }
  std::size_t sym = 0;
  for (std::size_t v = 0; v < ball.size(); ++v) sym += (hit[v] != in[v]) ? 1 : 0;
  const auto count = std::count(in.begin(), in.end(), 1);
  return static_cast<double>(sym) / static_cast<double>(count);
}

struct FolnerResult {
  ComponentSet set;
  double defect = 0.0;
  std::string method;  // "ball", "sweep" or "whole"
  std::size_t candidates = 0;
};

struct FolnerOptions {
  PowerIterationOptions eigen{1e-8, 5000};
};

namespace detail {

// Tracks |FS sym-diff F| while vertices are added to F one at a time.
class SweepDefect {
 public:
  explicit SweepDefect(const SchreierBall& ball) : ball_(ball), in_(ball.size(), 0), hits_(ball.size(), 0) {}

  void add(std::int32_t v) {
    const auto vi = static_cast<std::size_t>(v);
    // v moves into F: it was in FS \ F (if hit) or becomes F \ FS.
    if (hits_[vi] > 0) {
      --sym_;
    } else {
      ++sym_;
    }
    in_[vi] = 1;
    ++size_;
    for (int s = 0; s < ball_.degree(); ++s) {
      const auto t = ball_.neighbor(vi, s);
      if (t < 0) continue;
      const auto ti = static_cast<std::size_t>(t);
      if (hits_[ti]++ == 0) {
        if (in_[ti]) {
          --sym_;  // leaves F \ FS
        } else {
          ++sym_;  // joins FS \ F
        }
      }
    }
  }

  double defect() const { return static_cast<double>(sym_) / static_cast<double>(size_); }

 private:
  const SchreierBall& ball_;
  std::vector<char> in_;
  std::vector<std::uint32_t> hits_;
  std::size_t size_ = 0;
  long sym_ = 0;
};

}  // namespace detail

// Best Folner candidate among distance balls B(r), r < R, sweep cuts over the
// level sets of the top Dirichlet eigenvector, and the whole window when it
// is a closed finite graph. The reported defect is exact for the returned set.
inline FolnerResult folner_search(const SchreierBall& ball, const FolnerOptions& opts = {}) {
  if (ball.size() == 0) throw ValidationError("folner_search: empty ball");
  FolnerResult best;
  best.defect = std::numeric_limits<double>::infinity();
  std::vector<std::int32_t> best_members;
  auto consider = [&](double defect, const std::string& method, std::size_t prefix, const std::vector<std::int32_t>& order) {
    ++best.candidates;
    if (defect < best.defect) {
      best.defect = defect;
      best.method = method;
      best_members.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(prefix));
    }
  };

  if (ball.closed()) {
    std::vector<std::int32_t> all(ball.size());
    std::iota(all.begin(), all.end(), 0);
    consider(0.0, "whole", all.size(), all);
  } else {
    // Distance balls; BFS order is sorted by distance.
    std::vector<std::int32_t> order(ball.size());
    std::iota(order.begin(), order.end(), 0);
    detail::SweepDefect sweep(ball);
    std::size_t k = 0;
    for (int r = 0; r < ball.radius; ++r) {
      while (k < ball.size() && ball.dist[k] == r) sweep.add(static_cast<std::int32_t>(k++));
      consider(sweep.defect(), "ball", k, order);
    }
    if (ball.radius >= 1) {
      auto sol = dirichlet_solve(ball, opts.eigen);
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < sol.vector.size(); ++i) {
        if (sol.vector[i] > 0.0) idx.push_back(i);
      }
      std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return sol.vector[a] > sol.vector[b]; });
      std::vector<std::int32_t> level(idx.size());
      for (std::size_t i = 0; i < idx.size(); ++i) level[i] = sol.interior[idx[i]];
      detail::SweepDefect level_sweep(ball);
      for (std::size_t i = 0; i < level.size(); ++i) {
        level_sweep.add(level[i]);
        consider(level_sweep.defect(), "sweep", i + 1, level);
      }
    }
  }
  best.set = interior_boundary(ball, best_members);
  best.defect = folner_defect(ball, best.set.members);
  return best;
}

struct DoubleCosetEntry {
  Word representative;        // g: the component contains (root1, root2 g)
  CosetId start;              // product coset (root1, root2 g)
  std::size_t component_size = 0;  // vertices explored (all of them when finite)
  bool finite = false;
};

// One entry per component of the product Schreier graph meeting the pairs
// (root1, root2 g), |g| <= R. Components are explored up to explore_cap
// vertices; finite components are identified exactly, infinite ones only as
// far as exploration reached. At most max_components entries are returned,
// in BFS order of their representatives.
inline std::vector<DoubleCosetEntry> enumerate_double_cosets(const OraclePtr& o1, const OraclePtr& o2, int radius,
                                                             std::size_t explore_cap = 100000,
                                                             std::size_t max_components = SIZE_MAX) {
  if (radius < 0) throw ValidationError("enumerate_double_cosets: radius must be nonnegative");
  auto product = std::make_shared<ProductOracle>(o1, o2);
  const auto ball2 = generate_ball(*o2, radius);
  const CosetId root1 = o1->root();
  std::unordered_map<CosetId, std::size_t> owner;
  std::vector<DoubleCosetEntry> out;
  for (std::size_t v = 0; v < ball2.size(); ++v) {
    const CosetId start = ProductOracle::pair(root1, ball2.ids[v]);
    if (owner.contains(start)) continue;
    if (out.size() >= max_components) break;
    DoubleCosetEntry entry;
    entry.representative = ball2.word_to(v);
    entry.start = start;
    std::vector<CosetId> frontier{start};
    owner.emplace(start, out.size());
    std::size_t explored = 1;
    bool capped = false;
    for (std::size_t k = 0; k < frontier.size() && !capped; ++k) {
      for (int s = 0; s < product->degree() && !capped; ++s) {
        CosetId next = product->act(Generator::from_slot(s), frontier[k]);
        if (owner.contains(next)) continue;
        if (explored >= explore_cap) {
          capped = true;
          break;
        }
        owner.emplace(next, out.size());
        frontier.push_back(std::move(next));
        ++explored;
      }
    }
    entry.component_size = explored;
    entry.finite = !capped;
    out.push_back(std::move(entry));
  }
  return out;
}

// Sizes of all components of the product of two finite Schreier graphs,
// sorted ascending.
inline std::vector<std::size_t> product_component_sizes(const SubgroupOracle& o1, const SubgroupOracle& o2,
                                                        std::size_t vertex_cap = 100000) {
  if (!(o1.family() == o2.family())) throw ValidationError("product: group families differ");
  const auto g1 = closed_schreier_graph(o1, vertex_cap);
  const auto g2 = closed_schreier_graph(o2, vertex_cap);
  const std::size_t n1 = g1.size(), n2 = g2.size();
  if (n1 * n2 > vertex_cap * 10) throw ResourceCapError("product graph too large");
  std::vector<char> seen(n1 * n2, 0);
  std::vector<std::size_t> sizes;
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < n1 * n2; ++start) {
    if (seen[start]) continue;
    seen[start] = 1;
    stack.assign(1, start);
    std::size_t count = 0;
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      ++count;
      for (int s = 0; s < g1.degree(); ++s) {
        const std::size_t q = static_cast<std::size_t>(g1.neighbor(p / n2, s)) * n2 +
                              static_cast<std::size_t>(g2.neighbor(p % n2, s));
        if (!seen[q]) {
          seen[q] = 1;
          stack.push_back(q);
        }
      }
    }
    sizes.push_back(count);
  }
  std::sort(sizes.begin(), sizes.end());
  return sizes;
}

using BigCount = boost::multiprecision::cpp_int;

// c_n = #{reduced words w : |w| = n, root . w = root} for n = 0..max_length,
// i.e. the number of elements of length n in the stabilizer of the root.
// Counted by dynamic programming over (vertex, last letter) on the ball of
// radius ceil(max_length / 2), which contains every closed path of that length.
inline std::vector<BigCount> closed_reduced_path_counts(const SubgroupOracle& oracle, int max_length,
                                                        std::size_t vertex_cap = kDefaultVertexCap) {
  if (max_length < 0) throw ValidationError("closed path counts: length must be nonnegative");
  const auto ball = generate_ball(oracle, (max_length + 1) / 2, vertex_cap);
  const int deg = ball.degree();
  const std::size_t states = ball.size() * static_cast<std::size_t>(deg);
  std::vector<BigCount> cur(states), next(states);
  std::vector<BigCount> out{1};
  if (max_length == 0) return out;
  for (int s = 0; s < deg; ++s) {
    const auto t = ball.neighbor(0, s);
    if (t >= 0) cur[static_cast<std::size_t>(t) * deg + s] += 1;
  }
  auto closed_at_root = [&](const std::vector<BigCount>& c) {
    BigCount sum = 0;
    for (int s = 0; s < deg; ++s) sum += c[static_cast<std::size_t>(s)];
    return sum;
  };
  out.push_back(closed_at_root(cur));
  for (int len = 2; len <= max_length; ++len) {
    for (auto& x : next) x = 0;
    for (std::size_t v = 0; v < ball.size(); ++v) {
      for (int s = 0; s < deg; ++s) {
        const auto& c = cur[v * deg + s];
        if (c.is_zero()) continue;
        const int back = Generator::from_slot(s).inverse().slot();
        for (int t = 0; t < deg; ++t) {
          if (t == back) continue;
          const auto u = ball.neighbor(v, t);
          if (u >= 0) next[static_cast<std::size_t>(u) * deg + t] += c;
        }
      }
    }
    std::swap(cur, next);
    out.push_back(closed_at_root(cur));
  }
  return out;
}

}  // namespace cospec
