#pragma once

// Random subgroup samplers (invariant in law under conjugation) and the
// deterministic co-amenable oracles used alongside them.

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cospec/errors.hpp"
#include "cospec/oracle.hpp"
#include "cospec/rng.hpp"

namespace cospec {

// A subset of the window [-W, W], each site kept independently with
// probability p.
struct PercolationSample {
  std::set<std::int64_t> sites;
  std::int64_t window = 0;
  double p = 0.0;
  std::uint64_t seed = 0;

  // Longest run of consecutive sites inside (or outside) the subset, within
  // the window.
  std::int64_t longest_segment(bool inside = true) const {
    std::int64_t best = 0, run = 0;
    for (std::int64_t x = -window; x <= window; ++x) {
      run = sites.contains(x) == inside ? run + 1 : 0;
      best = std::max(best, run);
    }
    return best;
  }
};

inline PercolationSample sample_bernoulli_percolation(double p, std::int64_t window, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("percolation: p must lie in [0, 1]");
  if (window < 0) throw ValidationError("percolation: window must be nonnegative");
  PercolationSample s{{}, window, p, seed};
  Rng rng(seed);
  for (std::int64_t x = -window; x <= window; ++x) {
    if (rng.bernoulli(p)) s.sites.insert(x);
  }
  return s;
}

inline std::shared_ptr<const WreathOracle> wreath_percolation_oracle(const PercolationSample& s) {
  return std::make_shared<WreathOracle>(s.sites, s.window);
}

// d independent uniform permutations of [N].
inline std::vector<std::vector<int>> sample_permutations(int n, int d, std::uint64_t seed) {
  if (n < 1) throw ValidationError("permutation sampler: N must be >= 1");
  if (d < 1) throw ValidationError("permutation sampler: rank must be >= 1");
  Rng rng(seed);
  std::vector<std::vector<int>> perms;
  for (int i = 0; i < d; ++i) perms.push_back(rng.permutation(n));
  return perms;
}

// Stabilizer of point 1 (0 internally) for a uniform random action of F_d on [N].
inline std::shared_ptr<const PermutationOracle> permutation_stabilizer_oracle(int n, int d, std::uint64_t seed) {
  return std::make_shared<PermutationOracle>(sample_permutations(n, d, seed), 0);
}

inline std::shared_ptr<const KernelToZOracle> kernel_to_Z_oracle(std::vector<std::int64_t> weights) {
  return std::make_shared<KernelToZOracle>(std::move(weights));
}

// ---------------------------------------------------------------------------
// Sample serialization: {family, params, seed, data}.

inline nlohmann::ordered_json to_json(const PercolationSample& s) {
  nlohmann::ordered_json j;
  j["family"] = "percolation";
  j["params"] = {{"p", s.p}, {"window", s.window}};
  j["seed"] = s.seed;
  j["data"] = {{"sites", std::vector<std::int64_t>(s.sites.begin(), s.sites.end())},
               {"longest_segment_inside", s.longest_segment(true)},
               {"longest_segment_outside", s.longest_segment(false)}};
  return j;
}

inline nlohmann::ordered_json permutation_sample_json(int n, int d, std::uint64_t seed) {
  nlohmann::ordered_json j;
  j["family"] = "permutation";
  j["params"] = {{"N", n}, {"d", d}};
  j["seed"] = seed;
  j["data"] = {{"permutations", sample_permutations(n, d, seed)}, {"root", 0}};
  return j;
}

inline PercolationSample percolation_from_json(const nlohmann::json& j) {
  try {
    if (j.at("family") != "percolation") throw ValidationError("sample: not a percolation sample");
    PercolationSample s;
    s.p = j.at("params").at("p").get<double>();
    s.window = j.at("params").at("window").get<std::int64_t>();
    s.seed = j.at("seed").get<std::uint64_t>();
    for (auto x : j.at("data").at("sites")) s.sites.insert(x.get<std::int64_t>());
    for (auto x : s.sites) {
      if (x < -s.window || x > s.window) throw ValidationError("sample: site outside the window");
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("sample: ") + e.what());
  }
}

// Rebuilds the oracle from serialized data (the data, not the seed, is
// authoritative).
inline OraclePtr oracle_from_sample(const nlohmann::json& j) {
  try {
    const auto family = j.at("family").get<std::string>();
    if (family == "percolation") return wreath_percolation_oracle(percolation_from_json(j));
    if (family == "permutation") {
      auto perms = j.at("data").at("permutations").get<std::vector<std::vector<int>>>();
      return std::make_shared<PermutationOracle>(std::move(perms), j.at("data").value("root", 0));
    }
    throw ValidationError("sample: unknown family '" + family + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("sample: ") + e.what());
  }
}

}  // namespace cospec
