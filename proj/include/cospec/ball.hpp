#pragma once

// Finite radius-R windows of Schreier graphs.

#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "cospec/errors.hpp"
#include "cospec/oracle.hpp"

namespace cospec {

inline constexpr std::size_t kDefaultVertexCap = 5'000'000;

// BFS ball around the root coset. Vertex 0 is the root. Every vertex has one
// neighbor slot per element of S (slot 2i = generator i, 2i+1 = inverse);
// loops and multi-edges are kept. A slot is -1 when the neighbor lies outside
// the window, which only happens at distance == radius.
struct SchreierBall {
  int rank = 0;
  int radius = 0;
  std::vector<CosetId> ids;
  std::vector<int> dist;
  std::vector<std::int32_t> neighbors;
  std::vector<std::int32_t> parent;
  std::vector<std::int8_t> parent_slot;
  std::unordered_map<CosetId, std::int32_t> index;

  std::size_t size() const { return ids.size(); }
  int degree() const { return 2 * rank; }
  std::int32_t neighbor(std::size_t v, int slot) const {
    return neighbors[v * static_cast<std::size_t>(degree()) + static_cast<std::size_t>(slot)];
  }
  // All |S| neighbors of v lie in the window.
  bool complete_at(std::size_t v) const {
    for (int s = 0; s < degree(); ++s) {
      if (neighbor(v, s) < 0) return false;
    }
    return true;
  }
  // No vertex has a neighbor outside the window: the ball is a whole finite
  // Schreier graph.
  bool closed() const {
    for (auto n : neighbors) {
      if (n < 0) return false;
    }
    return true;
  }
  std::int32_t find(const CosetId& c) const {
    auto it = index.find(c);
    return it == index.end() ? -1 : it->second;
  }
  // A shortest word from the root to v (BFS tree path).
  Word word_to(std::size_t v) const {
    std::vector<Generator> rev;
    while (v != 0) {
      rev.push_back(Generator::from_slot(parent_slot[v]));
      v = static_cast<std::size_t>(parent[v]);
    }
    return Word(std::vector<Generator>(rev.rbegin(), rev.rend()));
  }
  std::size_t edge_count() const {
    std::size_t e = 0;
    for (std::size_t v = 0; v < size(); ++v) {
      for (int i = 0; i < rank; ++i) e += neighbor(v, 2 * i) >= 0 ? 1 : 0;
    }
    return e;
  }
};

inline SchreierBall generate_ball(const SubgroupOracle& oracle, int radius, std::size_t vertex_cap = kDefaultVertexCap) {
  if (radius < 0) throw ValidationError("ball radius must be nonnegative");
  SchreierBall ball;
  ball.rank = oracle.rank();
  ball.radius = radius;
  const int deg = ball.degree();
  auto add = [&](CosetId id, int d, std::int32_t parent, int slot) {
    ball.index.emplace(id, static_cast<std::int32_t>(ball.ids.size()));
    ball.ids.push_back(std::move(id));
    ball.dist.push_back(d);
    ball.parent.push_back(parent);
    ball.parent_slot.push_back(static_cast<std::int8_t>(slot));
    ball.neighbors.resize(ball.neighbors.size() + static_cast<std::size_t>(deg), -1);
  };
  add(oracle.root(), 0, -1, -1);
  for (std::size_t v = 0; v < ball.ids.size(); ++v) {
    const int d = ball.dist[v];
    for (int s = 0; s < deg; ++s) {
      CosetId next;
      try {
        next = oracle.act(Generator::from_slot(s), ball.ids[v]);
      } catch (const WindowExceededError&) {
        if (d == radius) continue;  // would lie outside the ball anyway
        throw;
      }
      auto it = ball.index.find(next);
      std::int32_t target;
      if (it != ball.index.end()) {
        target = it->second;
      } else if (d < radius) {
        if (ball.ids.size() >= vertex_cap) {
          throw PartialBallError("vertex cap " + std::to_string(vertex_cap) + " exceeded at radius " +
                                     std::to_string(d + 1),
                                 d);
        }
        target = static_cast<std::int32_t>(ball.ids.size());
        add(std::move(next), d + 1, static_cast<std::int32_t>(v), s);
      } else {
        continue;
      }
      ball.neighbors[v * static_cast<std::size_t>(deg) + static_cast<std::size_t>(s)] = target;
    }
  }
  if (radius == std::numeric_limits<int>::max()) ball.radius = ball.dist.empty() ? 0 : ball.dist.back();
  return ball;
}

// The whole (finite) Schreier graph; throws PartialBallError past the cap.
inline SchreierBall closed_schreier_graph(const SubgroupOracle& oracle, std::size_t vertex_cap = kDefaultVertexCap) {
  return generate_ball(oracle, std::numeric_limits<int>::max(), vertex_cap);
}

// Root drawn as a double circle; one line per vertex and per positive edge.
inline std::string to_dot(const SchreierBall& ball, const SubgroupOracle& oracle) {
  std::ostringstream os;
  os << "digraph schreier {\n";
  for (std::size_t v = 0; v < ball.size(); ++v) {
    os << "  v" << v << " [label=\"" << oracle.describe(ball.ids[v]) << "\""
       << (v == 0 ? ", shape=doublecircle" : "") << "];\n";
  }
  const auto alphabet = oracle.alphabet();
  for (std::size_t v = 0; v < ball.size(); ++v) {
    for (int i = 0; i < ball.rank; ++i) {
      const auto t = ball.neighbor(v, 2 * i);
      if (t >= 0) os << "  v" << v << " -> v" << t << " [label=\"" << alphabet[static_cast<std::size_t>(i)] << "\"];\n";
    }
  }
  os << "}\n";
  return os.str();
}

inline nlohmann::ordered_json ball_summary(const SchreierBall& ball) {
  nlohmann::ordered_json j;
  j["vertices"] = ball.size();
  j["edges"] = ball.edge_count();
  j["radius"] = ball.radius;
  j["truncated"] = !ball.closed();
  return j;
}

}  // namespace cospec
