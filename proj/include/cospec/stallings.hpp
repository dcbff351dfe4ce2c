#pragma once

// Stallings core automata for finitely generated subgroups of F_d.
//
// A subgroup H = <w_1, ..., w_k> is represented by the folded core of the
// wedge of loops spelling the w_i. States are relabeled in BFS order from the
// base (slots explored in order a, A, b, B, ...), so two automata are
// labeled-isomorphic iff their transition tables are equal.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <queue>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cospec/errors.hpp"
#include "cospec/group.hpp"

namespace cospec {

// Edge u --label--> v with label a positive generator index; traversable
// backwards as the inverse letter.
struct LabeledEdge {
  int from = 0;
  int label = 0;
  int to = 0;

  friend auto operator<=>(const LabeledEdge&, const LabeledEdge&) = default;
};

// An arbitrary (possibly unfolded) based labeled graph; base is vertex 0.
struct LabeledGraph {
  int rank = 0;
  int num_vertices = 1;
  std::vector<LabeledEdge> edges;
};

class StallingsAutomaton {
 public:
  // The trivial subgroup of F_rank.
  explicit StallingsAutomaton(int rank = 2) : rank_(rank), next_(static_cast<std::size_t>(2 * rank), -1) {}

  int rank() const { return rank_; }
  int num_states() const { return static_cast<int>(next_.size()) / (2 * rank_); }
  static constexpr int base() { return 0; }

  // Target of the g-transition out of state, or -1.
  int target(int state, Generator g) const { return next_[static_cast<std::size_t>(state * 2 * rank_ + g.slot())]; }
  int target_slot(int state, int slot) const { return next_[static_cast<std::size_t>(state * 2 * rank_ + slot)]; }

  // Positive-labeled edges, each once, in table order.
  std::vector<LabeledEdge> edges() const {
    std::vector<LabeledEdge> out;
    for (int q = 0; q < num_states(); ++q) {
      for (int i = 0; i < rank_; ++i) {
        const int t = target(q, {i, 1});
        if (t >= 0) out.push_back({q, i, t});
      }
    }
    return out;
  }

  int degree(int state) const {
    int d = 0;
    for (int s = 0; s < 2 * rank_; ++s) d += target_slot(state, s) >= 0 ? 1 : 0;
    return d;
  }

  bool is_complete() const {
    return std::none_of(next_.begin(), next_.end(), [](int t) { return t < 0; });
  }

  LabeledGraph to_graph() const { return {rank_, num_states(), edges()}; }

  // Stable text key; equal keys <=> labeled-isomorphic automata.
  std::string canonical_form() const {
    std::string s = std::to_string(rank_) + "|" + std::to_string(num_states()) + "|";
    for (int t : next_) s += std::to_string(t) + ",";
    return s;
  }

  friend bool operator==(const StallingsAutomaton&, const StallingsAutomaton&) = default;

 private:
  friend StallingsAutomaton finalize_core(const LabeledGraph& g);

  int rank_;
  std::vector<int> next_;
};

namespace detail {

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(static_cast<std::size_t>(n)) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  // Keeps the smaller root so the base (0) always stays a root.
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
    return true;
  }

 private:
  std::vector<int> parent_;
};

}  // namespace detail

// Trims to the core of the base component and relabels canonically. The input
// must already be folded (deterministic in every direction).
inline StallingsAutomaton finalize_core(const LabeledGraph& g) {
  const int n = g.num_vertices;
  const int d = g.rank;
  std::vector<int> table(static_cast<std::size_t>(n) * 2 * d, -1);
  for (const auto& e : g.edges) {
    auto set = [&](int u, int slot, int v) {
      int& cell = table[static_cast<std::size_t>(u) * 2 * d + slot];
      if (cell >= 0 && cell != v) throw ValidationError("finalize_core: graph is not folded");
      cell = v;
    };
    set(e.from, 2 * e.label, e.to);
    set(e.to, 2 * e.label + 1, e.from);
  }

  // Base component.
  std::vector<char> alive(static_cast<std::size_t>(n), 0);
  {
    std::queue<int> q;
    q.push(0);
    alive[0] = 1;
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int s = 0; s < 2 * d; ++s) {
        const int v = table[static_cast<std::size_t>(u) * 2 * d + s];
        if (v >= 0 && !alive[v]) {
          alive[v] = 1;
          q.push(v);
        }
      }
    }
  }
  // Prune hanging trees: non-base vertices of degree <= 1 (a loop counts twice,
  // as both of its slots are occupied).
  auto degree = [&](int u) {
    int deg = 0;
    for (int s = 0; s < 2 * d; ++s) {
      const int v = table[static_cast<std::size_t>(u) * 2 * d + s];
      deg += (v >= 0 && alive[v]) ? 1 : 0;
    }
    return deg;
  };
  std::queue<int> leaves;
  for (int u = 1; u < n; ++u) {
    if (alive[u] && degree(u) <= 1) leaves.push(u);
  }
  while (!leaves.empty()) {
    const int u = leaves.front();
    leaves.pop();
    if (!alive[u]) continue;
    alive[u] = 0;
    for (int s = 0; s < 2 * d; ++s) {
      const int v = table[static_cast<std::size_t>(u) * 2 * d + s];
      if (v > 0 && alive[v] && degree(v) <= 1) leaves.push(v);
    }
  }

  // Canonical BFS relabeling.
  std::vector<int> relabel(static_cast<std::size_t>(n), -1);
  std::vector<int> order{0};
  relabel[0] = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const int u = order[k];
    for (int s = 0; s < 2 * d; ++s) {
      const int v = table[static_cast<std::size_t>(u) * 2 * d + s];
      if (v >= 0 && alive[v] && relabel[v] < 0) {
        relabel[v] = static_cast<int>(order.size());
        order.push_back(v);
      }
    }
  }
  StallingsAutomaton out(d);
  out.next_.assign(order.size() * 2 * d, -1);
  for (std::size_t k = 0; k < order.size(); ++k) {
    for (int s = 0; s < 2 * d; ++s) {
      const int v = table[static_cast<std::size_t>(order[k]) * 2 * d + s];
      if (v >= 0 && alive[v]) out.next_[k * 2 * d + s] = relabel[v];
    }
  }
  return out;
}

// Folds (identifies equally-labeled edges sharing an endpoint) until
// deterministic, then returns the canonical core. edge_order, if non-empty,
// is a permutation of the edge indices fixing the processing order; the
// result does not depend on it.
inline StallingsAutomaton fold(const LabeledGraph& g, std::span<const std::size_t> edge_order = {}) {
  std::vector<std::size_t> order(g.edges.size());
  if (edge_order.empty()) {
    std::iota(order.begin(), order.end(), std::size_t{0});
  } else {
    if (edge_order.size() != g.edges.size()) throw ValidationError("fold: edge order has the wrong length");
    order.assign(edge_order.begin(), edge_order.end());
  }
  for (const auto& e : g.edges) {
    if (e.label < 0 || e.label >= g.rank || e.from < 0 || e.to < 0 || e.from >= g.num_vertices ||
        e.to >= g.num_vertices) {
      throw ValidationError("fold: edge out of range");
    }
  }
  detail::UnionFind uf(g.num_vertices);
  std::unordered_map<std::int64_t, int> seen;
  auto key = [&](int u, int slot) { return static_cast<std::int64_t>(u) * 2 * g.rank + slot; };
  bool changed = true;
  while (changed) {
    changed = false;
    seen.clear();
    for (std::size_t idx : order) {
      const auto& e = g.edges[idx];
      const int u = uf.find(e.from);
      const int v = uf.find(e.to);
      auto [fwd, fresh_f] = seen.try_emplace(key(u, 2 * e.label), v);
      if (!fresh_f && uf.find(fwd->second) != v) {
        uf.unite(fwd->second, v);
        changed = true;
        continue;
      }
      auto [bwd, fresh_b] = seen.try_emplace(key(v, 2 * e.label + 1), u);
      if (!fresh_b && uf.find(bwd->second) != u) {
        uf.unite(bwd->second, u);
        changed = true;
      }
    }
  }
  LabeledGraph folded{g.rank, g.num_vertices, {}};
  for (const auto& e : g.edges) folded.edges.push_back({uf.find(e.from), e.label, uf.find(e.to)});
  std::sort(folded.edges.begin(), folded.edges.end());
  folded.edges.erase(std::unique(folded.edges.begin(), folded.edges.end()), folded.edges.end());
  return finalize_core(folded);
}

// Wedge of loops: one closed path at the base per generator word.
inline LabeledGraph wedge_of_loops(const std::vector<Word>& generators, int rank) {
  LabeledGraph g{rank, 1, {}};
  for (const auto& w : generators) {
    if (w.max_index() >= rank) throw ValidationError("generator word uses a letter outside the rank");
    int current = 0;
    for (std::size_t k = 0; k < w.size(); ++k) {
      const int next = (k + 1 == w.size()) ? 0 : g.num_vertices++;
      const auto& letter = w[k];
      if (letter.sign > 0) {
        g.edges.push_back({current, letter.index, next});
      } else {
        g.edges.push_back({next, letter.index, current});
      }
      current = next;
    }
  }
  return g;
}

inline StallingsAutomaton build_automaton(const std::vector<Word>& generators, int rank) {
  if (rank < 1) throw ValidationError("rank must be at least 1");
  return fold(wedge_of_loops(generators, rank));
}

// Whole group F_rank: one state with a loop per generator.
inline StallingsAutomaton whole_group_automaton(int rank) {
  std::vector<Word> gens;
  for (int i = 0; i < rank; ++i) gens.push_back(Word{{i, 1}});
  return build_automaton(gens, rank);
}

// End state of tracing w from the base, or -1 if the trace falls off.
inline int trace(const StallingsAutomaton& a, const Word& w, int start = StallingsAutomaton::base()) {
  int q = start;
  for (const auto& g : w.letters()) {
    if (g.index >= a.rank()) return -1;
    q = a.target(q, g);
    if (q < 0) return -1;
  }
  return q;
}

inline bool membership(const StallingsAutomaton& a, const Word& w) { return trace(a, w) == StallingsAutomaton::base(); }

// Core of the (base, base) component of the labeled product.
inline StallingsAutomaton intersect_automata(const StallingsAutomaton& a1, const StallingsAutomaton& a2) {
  if (a1.rank() != a2.rank()) throw ValidationError("intersect_automata: rank mismatch");
  const int d = a1.rank();
  const auto n2 = static_cast<std::int64_t>(a2.num_states());
  std::unordered_map<std::int64_t, int> index;
  std::vector<std::pair<int, int>> states{{0, 0}};
  index.emplace(0, 0);
  LabeledGraph g{d, 1, {}};
  for (std::size_t k = 0; k < states.size(); ++k) {
    const auto [p, q] = states[k];
    for (int i = 0; i < d; ++i) {
      const int p2 = a1.target(p, {i, 1});
      const int q2 = a2.target(q, {i, 1});
      if (p2 < 0 || q2 < 0) continue;
      const std::int64_t key = p2 * n2 + q2;
      auto [it, fresh] = index.try_emplace(key, static_cast<int>(states.size()));
      if (fresh) states.emplace_back(p2, q2);
      g.edges.push_back({static_cast<int>(k), i, it->second});
    }
    for (int i = 0; i < d; ++i) {
      const int p2 = a1.target(p, {i, -1});
      const int q2 = a2.target(q, {i, -1});
      if (p2 < 0 || q2 < 0) continue;
      const std::int64_t key = p2 * n2 + q2;
      auto [it, fresh] = index.try_emplace(key, static_cast<int>(states.size()));
      if (fresh) states.emplace_back(p2, q2);
    }
  }
  g.num_vertices = static_cast<int>(states.size());
  std::sort(g.edges.begin(), g.edges.end());
  g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
  return finalize_core(g);
}

// Index [F_d : H]; nullopt means infinite index.
inline std::optional<std::int64_t> subgroup_index(const StallingsAutomaton& a) {
  if (!a.is_complete()) return std::nullopt;
  return a.num_states();
}

// A free basis of H read off a BFS spanning tree: one generator per non-tree
// positive edge.
inline std::vector<Word> subgroup_generators(const StallingsAutomaton& a) {
  const int n = a.num_states();
  std::vector<Word> path(static_cast<std::size_t>(n));
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::vector<std::pair<int, int>> tree_edges;  // (state, slot)
  std::vector<int> order{0};
  seen[0] = 1;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const int u = order[k];
    for (int s = 0; s < 2 * a.rank(); ++s) {
      const int v = a.target_slot(u, s);
      if (v >= 0 && !seen[v]) {
        seen[v] = 1;
        path[v] = path[u];
        path[v].push_back(Generator::from_slot(s));
        order.push_back(v);
        tree_edges.emplace_back(u, s);
        tree_edges.emplace_back(v, Generator::from_slot(s).inverse().slot());
      }
    }
  }
  std::sort(tree_edges.begin(), tree_edges.end());
  std::vector<Word> gens;
  for (const auto& e : a.edges()) {
    if (std::binary_search(tree_edges.begin(), tree_edges.end(), std::pair{e.from, 2 * e.label})) continue;
    Word w = path[e.from];
    w.push_back({e.label, 1});
    gens.push_back(w * path[e.to].inverse());
  }
  return gens;
}

struct CogrowthResult {
  double alpha = 0.0;
  std::optional<double> delta;  // ln(alpha); empty when alpha == 0
  long iterations = 0;
  double residual = 0.0;
  bool converged = true;
};

struct CogrowthOptions {
  double tol = 1e-10;
  long max_iterations = 100000;
};

// Growth base of |{h in H : |h| = n}|, computed as the Perron value of the
// non-backtracking operator on directed edges of the core graph. Iterates
// (I + B) with sup-norm normalization so periodic B still converges.
inline CogrowthResult cogrowth_rate(const StallingsAutomaton& a, CogrowthOptions opts = {}) {
  const int d = a.rank();
  struct DirectedEdge {
    int from, slot, to;
  };
  std::vector<DirectedEdge> dirs;
  std::vector<int> edge_id(static_cast<std::size_t>(a.num_states()) * 2 * d, -1);
  for (int q = 0; q < a.num_states(); ++q) {
    for (int s = 0; s < 2 * d; ++s) {
      const int t = a.target_slot(q, s);
      if (t >= 0) {
        edge_id[static_cast<std::size_t>(q) * 2 * d + s] = static_cast<int>(dirs.size());
        dirs.push_back({q, s, t});
      }
    }
  }
  CogrowthResult result;
  if (dirs.empty()) return result;

  // successors[e] = non-backtracking continuations of e.
  std::vector<std::vector<int>> successors(dirs.size());
  for (std::size_t e = 0; e < dirs.size(); ++e) {
    const int back = Generator::from_slot(dirs[e].slot).inverse().slot();
    for (int s = 0; s < 2 * d; ++s) {
      if (s == back) continue;
      const int f = edge_id[static_cast<std::size_t>(dirs[e].to) * 2 * d + s];
      if (f >= 0) successors[e].push_back(f);
    }
  }
  std::vector<double> x(dirs.size(), 1.0), bx(dirs.size());
  double rho = 0.0;
  for (long it = 1; it <= opts.max_iterations; ++it) {
    double top = 0.0;
    for (std::size_t e = 0; e < dirs.size(); ++e) {
      double acc = 0.0;
      for (int f : successors[e]) acc += x[f];
      bx[e] = acc;
      top = std::max(top, x[e] + acc);
    }
    // x is sup-normalized, so the growth of the sup norm estimates 1 + rho.
    rho = top - 1.0;
    double residual = 0.0;
    for (std::size_t e = 0; e < dirs.size(); ++e) residual = std::max(residual, std::abs(bx[e] - rho * x[e]));
    result.iterations = it;
    result.residual = residual;
    if (residual < opts.tol) break;
    for (std::size_t e = 0; e < dirs.size(); ++e) x[e] = (x[e] + bx[e]) / top;
  }
  result.converged = result.residual < opts.tol;
  result.alpha = std::max(0.0, rho);
  if (result.alpha > 0.0) result.delta = std::log(result.alpha);
  return result;
}

// Automaton of the stabilizer of `start` in a finite permutation action;
// action[i][p] is the image of point p under generator i.
inline StallingsAutomaton automaton_from_action(const std::vector<std::vector<int>>& action, int start = 0) {
  const int d = static_cast<int>(action.size());
  if (d == 0) throw ValidationError("automaton_from_action: empty action");
  const int n = static_cast<int>(action[0].size());
  LabeledGraph g{d, n, {}};
  for (int i = 0; i < d; ++i) {
    if (static_cast<int>(action[i].size()) != n) throw ValidationError("automaton_from_action: ragged action");
    for (int p = 0; p < n; ++p) {
      // Put `start` at vertex 0 so it becomes the base.
      auto relabel = [&](int x) { return x == start ? 0 : (x == 0 ? start : x); };
      g.edges.push_back({relabel(p), i, relabel(action[i][p])});
    }
  }
  return fold(g);
}

// DOT rendering; the base state is drawn as a double circle.
inline std::string to_dot(const StallingsAutomaton& a, std::string_view alphabet = kFreeAlphabet) {
  std::ostringstream os;
  os << "digraph stallings {\n  rankdir=LR;\n";
  for (int q = 0; q < a.num_states(); ++q) {
    os << "  " << q << (q == 0 ? " [shape=doublecircle, style=filled, fillcolor=lightgray];\n" : " [shape=circle];\n");
  }
  for (const auto& e : a.edges()) {
    os << "  " << e.from << " -> " << e.to << " [label=\"" << alphabet.at(static_cast<std::size_t>(e.label)) << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

// One generator word per line; blank lines and '#' comments are skipped.
inline std::vector<Word> parse_generator_list(std::string_view text, int rank) {
  std::vector<Word> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line.erase(std::remove_if(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); }), line.end());
    if (line.empty()) continue;
    out.push_back(parse_word(line, rank));
  }
  return out;
}

}  // namespace cospec
