#pragma once

// Subgroup oracles: the right action of S on the coset space H\Gamma, with a
// canonical hashable identifier per coset.
//
// Canonical coset encodings per family:
//   Stallings   (state, reduced suffix u) with u empty or not readable from state
//   kernel->Z   weighted exponent sum
//   permutation point of [N]
//   wreath H_A  (f restricted to positions outside A, shift n)
//   product     (c1, c2)

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cospec/errors.hpp"
#include "cospec/group.hpp"
#include "cospec/stallings.hpp"

namespace cospec {

// Opaque canonical byte string; equal iff the cosets are equal.
using CosetId = std::string;

namespace coset_codec {

inline void put(CosetId& out, std::int64_t v) {
  // Zigzag varint.
  auto u = (static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63);
  while (u >= 0x80) {
    out.push_back(static_cast<char>((u & 0x7f) | 0x80));
    u >>= 7;
  }
  out.push_back(static_cast<char>(u));
}

inline std::int64_t get(std::string_view in, std::size_t& pos) {
  std::uint64_t u = 0;
  int shift = 0;
  while (true) {
    if (pos >= in.size()) throw ValidationError("malformed coset id");
    const auto byte = static_cast<unsigned char>(in[pos++]);
    u |= static_cast<std::uint64_t>(byte & 0x7f) << shift;
    if (!(byte & 0x80)) break;
    shift += 7;
  }
  return static_cast<std::int64_t>(u >> 1) ^ -static_cast<std::int64_t>(u & 1);
}

inline CosetId single(std::int64_t v) {
  CosetId c;
  put(c, v);
  return c;
}

}  // namespace coset_codec

// Which group the oracle's generators belong to.
struct FamilyTag {
  std::string name;  // "free" or "wreath"
  int rank = 0;      // number of positive generators; |S| = 2 * rank

  friend bool operator==(const FamilyTag&, const FamilyTag&) = default;
};

class SubgroupOracle {
 public:
  virtual ~SubgroupOracle() = default;

  virtual FamilyTag family() const = 0;
  virtual CosetId root() const = 0;
  virtual CosetId act(Generator g, const CosetId& c) const = 0;
  virtual std::string describe(const CosetId& c) const = 0;

  int rank() const { return family().rank; }
  int degree() const { return 2 * rank(); }

  std::string_view alphabet() const { return family().name == "wreath" ? kWreathAlphabet : kFreeAlphabet; }

  CosetId act_word(const Word& w, CosetId c) const {
    for (const auto& g : w.letters()) c = act(g, c);
    return c;
  }

  // Membership of w in the subgroup: w fixes the root coset.
  virtual bool contains(const Word& w) const { return act_word(w, root()) == root(); }
};

using OraclePtr = std::shared_ptr<const SubgroupOracle>;

inline FamilyTag free_family(int rank) { return {"free", rank}; }

// Right cosets of a finitely generated subgroup of F_d via its Stallings core.
class StallingsOracle final : public SubgroupOracle {
 public:
  explicit StallingsOracle(StallingsAutomaton automaton) : automaton_(std::move(automaton)) {}

  const StallingsAutomaton& automaton() const { return automaton_; }

  FamilyTag family() const override { return free_family(automaton_.rank()); }
  CosetId root() const override { return coset_codec::single(StallingsAutomaton::base()); }

  CosetId act(Generator g, const CosetId& c) const override {
    std::size_t pos = 0;
    const auto state = static_cast<int>(coset_codec::get(c, pos));
    if (pos == c.size()) {
      const int t = automaton_.target(state, g);
      if (t >= 0) return coset_codec::single(t);
      CosetId out = c;
      coset_codec::put(out, g.slot());
      return out;
    }
    // Suffix letters are stored one slot per byte (ranks are small).
    const auto last = static_cast<int>(static_cast<unsigned char>(c.back()) >> 1);
    if (last == g.inverse().slot()) return c.substr(0, c.size() - 1);
    CosetId out = c;
    coset_codec::put(out, g.slot());
    return out;
  }

  std::string describe(const CosetId& c) const override {
    std::size_t pos = 0;
    const auto state = coset_codec::get(c, pos);
    Word suffix;
    while (pos < c.size()) suffix.push_back(Generator::from_slot(static_cast<int>(coset_codec::get(c, pos))));
    return "q" + std::to_string(state) + (suffix.empty() ? "" : "." + to_string(suffix));
  }

  bool contains(const Word& w) const override { return membership(automaton_, w); }

 private:
  StallingsAutomaton automaton_;
};

// Kernel of the homomorphism F_d -> Z sending generator i to weights[i].
class KernelToZOracle final : public SubgroupOracle {
 public:
  explicit KernelToZOracle(std::vector<std::int64_t> weights) : weights_(std::move(weights)) {
    if (weights_.empty()) throw ValidationError("kernel_to_Z: need at least one generator weight");
    bool any = false;
    for (auto w : weights_) any = any || w != 0;
    if (!any) throw ValidationError("kernel_to_Z: all-zero weights give the whole group; use a whole-group oracle");
  }

  const std::vector<std::int64_t>& weights() const { return weights_; }

  FamilyTag family() const override { return free_family(static_cast<int>(weights_.size())); }
  CosetId root() const override { return coset_codec::single(0); }
  CosetId act(Generator g, const CosetId& c) const override {
    std::size_t pos = 0;
    return coset_codec::single(coset_codec::get(c, pos) + g.sign * weights_.at(static_cast<std::size_t>(g.index)));
  }
  std::string describe(const CosetId& c) const override {
    std::size_t pos = 0;
    return std::to_string(coset_codec::get(c, pos));
  }

 private:
  std::vector<std::int64_t> weights_;
};

// Stabilizer of a point under a permutation action of F_d on [N].
// Points are 0-based internally and printed 1-based.
class PermutationOracle final : public SubgroupOracle {
 public:
  PermutationOracle(std::vector<std::vector<int>> perms, int root_point = 0)
      : perms_(std::move(perms)), root_(root_point) {
    if (perms_.empty()) throw ValidationError("permutation oracle: need at least one generator");
    const std::size_t n = perms_[0].size();
    if (n == 0) throw ValidationError("permutation oracle: N must be at least 1");
    for (const auto& p : perms_) {
      if (p.size() != n) throw ValidationError("permutation oracle: permutations of different sizes");
      std::vector<int> inv(n, -1);
      for (std::size_t x = 0; x < n; ++x) {
        if (p[x] < 0 || static_cast<std::size_t>(p[x]) >= n || inv[p[x]] >= 0) {
          throw ValidationError("permutation oracle: not a permutation");
        }
        inv[p[x]] = static_cast<int>(x);
      }
      inverses_.push_back(std::move(inv));
    }
    if (root_ < 0 || static_cast<std::size_t>(root_) >= n) throw ValidationError("permutation oracle: bad root");
  }

  int size() const { return static_cast<int>(perms_[0].size()); }
  const std::vector<std::vector<int>>& permutations() const { return perms_; }
  int root_point() const { return root_; }

  FamilyTag family() const override { return free_family(static_cast<int>(perms_.size())); }
  CosetId root() const override { return coset_codec::single(root_); }
  CosetId act(Generator g, const CosetId& c) const override {
    std::size_t pos = 0;
    const auto p = static_cast<std::size_t>(coset_codec::get(c, pos));
    const auto& table = g.sign > 0 ? perms_.at(static_cast<std::size_t>(g.index)) : inverses_.at(static_cast<std::size_t>(g.index));
    return coset_codec::single(table[p]);
  }
  std::string describe(const CosetId& c) const override {
    std::size_t pos = 0;
    return std::to_string(coset_codec::get(c, pos) + 1);
  }

 private:
  std::vector<std::vector<int>> perms_;
  std::vector<std::vector<int>> inverses_;
  int root_;
};

// H_A = F_2^(+A) in F_2^(+Z) x| Z with A materialized inside [-W, W].
// Generators: 0 = s, 1 = a, 2 = b.
class WreathOracle final : public SubgroupOracle {
 public:
  WreathOracle(std::set<std::int64_t> subset, std::int64_t window) : subset_(std::move(subset)), window_(window) {
    if (window_ < 0) throw ValidationError("wreath oracle: window must be nonnegative");
    for (auto x : subset_) {
      if (x < -window_ || x > window_) throw ValidationError("wreath oracle: A must lie inside [-W, W]");
    }
  }

  const std::set<std::int64_t>& subset() const { return subset_; }
  std::int64_t window() const { return window_; }

  FamilyTag family() const override { return {"wreath", 3}; }
  CosetId root() const override { return encode(WreathElement{}); }

  // Canonical coset element: (f restricted to the complement of A, n).
  CosetId coset_of(const WreathElement& x) const {
    WreathElement::Support kept;
    for (const auto& [pos, w] : x.support()) {
      if (!subset_.contains(pos)) kept.emplace(pos, w);
    }
    return encode(WreathElement(std::move(kept), x.shift()));
  }

  CosetId act(Generator g, const CosetId& c) const override {
    WreathElement x = decode(c);
    if (g.index == 0) {
      const std::int64_t n = x.shift() + g.sign;
      if (n < -window_ || n > window_) {
        throw WindowExceededError("wreath coset shift " + std::to_string(n) + " leaves the window [-" +
                                  std::to_string(window_) + ", " + std::to_string(window_) + "]");
      }
    } else if (subset_.contains(x.shift())) {
      return c;  // lamps inside A are absorbed by H_A
    }
    x.apply(g);
    return encode(x);
  }

  std::string describe(const CosetId& c) const override { return to_string(decode(c)); }

  bool contains_element(const WreathElement& x) const {
    if (x.shift() != 0) return false;
    for (const auto& [pos, w] : x.support()) {
      if (!subset_.contains(pos)) return false;
    }
    return true;
  }

  static CosetId encode(const WreathElement& x) {
    CosetId out;
    coset_codec::put(out, x.shift());
    for (const auto& [pos, w] : x.support()) {
      coset_codec::put(out, pos);
      coset_codec::put(out, static_cast<std::int64_t>(w.size()));
      for (const auto& g : w.letters()) coset_codec::put(out, g.slot());
    }
    return out;
  }

  static WreathElement decode(const CosetId& c) {
    std::size_t pos = 0;
    const std::int64_t shift = coset_codec::get(c, pos);
    WreathElement::Support support;
    while (pos < c.size()) {
      const std::int64_t at = coset_codec::get(c, pos);
      const std::int64_t len = coset_codec::get(c, pos);
      std::vector<Generator> letters;
      for (std::int64_t k = 0; k < len; ++k) letters.push_back(Generator::from_slot(static_cast<int>(coset_codec::get(c, pos))));
      support.emplace(at, Word(letters));
    }
    return WreathElement(std::move(support), shift);
  }

 private:
  std::set<std::int64_t> subset_;
  std::int64_t window_;
};

// Diagonal action on coset pairs; the orbit of (root1, root2) is the Schreier
// graph of H1 cap H2, the orbit of (root1, root2 g) that of H1 cap H2^g.
class ProductOracle final : public SubgroupOracle {
 public:
  ProductOracle(OraclePtr first, OraclePtr second) : first_(std::move(first)), second_(std::move(second)) {
    if (!(first_->family() == second_->family())) throw ValidationError("product oracle: group families differ");
  }

  static CosetId pair(const CosetId& c1, const CosetId& c2) {
    CosetId out;
    coset_codec::put(out, static_cast<std::int64_t>(c1.size()));
    out += c1;
    out += c2;
    return out;
  }
  static std::pair<CosetId, CosetId> split(const CosetId& c) {
    std::size_t pos = 0;
    const auto len = static_cast<std::size_t>(coset_codec::get(c, pos));
    return {c.substr(pos, len), c.substr(pos + len)};
  }

  const OraclePtr& first() const { return first_; }
  const OraclePtr& second() const { return second_; }

  FamilyTag family() const override { return first_->family(); }
  CosetId root() const override { return pair(first_->root(), second_->root()); }
  CosetId act(Generator g, const CosetId& c) const override {
    auto [c1, c2] = split(c);
    return pair(first_->act(g, c1), second_->act(g, c2));
  }
  std::string describe(const CosetId& c) const override {
    auto [c1, c2] = split(c);
    return "(" + first_->describe(c1) + ", " + second_->describe(c2) + ")";
  }

 private:
  OraclePtr first_;
  OraclePtr second_;
};

// Same action, different base coset: the stabilizer of root() is the
// conjugate g^{-1} H g when root() = H g.
class RerootedOracle final : public SubgroupOracle {
 public:
  RerootedOracle(OraclePtr base, CosetId root) : base_(std::move(base)), root_(std::move(root)) {}

  FamilyTag family() const override { return base_->family(); }
  CosetId root() const override { return root_; }
  CosetId act(Generator g, const CosetId& c) const override { return base_->act(g, c); }
  std::string describe(const CosetId& c) const override { return base_->describe(c); }
  bool contains(const Word& w) const override { return act_word(w, root_) == root_; }

 private:
  OraclePtr base_;
  CosetId root_;
};

inline OraclePtr make_stallings_oracle(const std::vector<Word>& generators, int rank) {
  return std::make_shared<StallingsOracle>(build_automaton(generators, rank));
}
inline OraclePtr make_trivial_oracle(int rank) { return make_stallings_oracle({}, rank); }
inline OraclePtr make_whole_group_oracle(int rank) {
  return std::make_shared<StallingsOracle>(whole_group_automaton(rank));
}
inline OraclePtr product_oracle(OraclePtr o1, OraclePtr o2) {
  return std::make_shared<ProductOracle>(std::move(o1), std::move(o2));
}
inline OraclePtr reroot(OraclePtr base, const Word& g) {
  CosetId r = base->act_word(g, base->root());
  return std::make_shared<RerootedOracle>(std::move(base), std::move(r));
}

}  // namespace cospec
