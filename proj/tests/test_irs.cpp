#include <gtest/gtest.h>

#include <map>
#include <numbers>

#include "oracles.hpp"

using namespace cospec;

namespace {

// Rooted-isomorphism invariant of a radius-2 ball: sphere sizes and the
// number of loops at the root.
std::string ball_class(const SchreierBall& b) {
  std::vector<int> spheres(static_cast<std::size_t>(b.radius) + 1, 0);
  for (std::size_t v = 0; v < b.size(); ++v) ++spheres[static_cast<std::size_t>(b.dist[v])];
  int loops = 0;
  for (int s = 0; s < b.degree(); ++s) loops += b.neighbor(0, s) == 0;
  std::string key;
  for (int n : spheres) key += std::to_string(n) + ",";
  return key + "/" + std::to_string(loops);
}

}  // namespace

TEST(Percolation, Extremes) {
  const auto full = sample_bernoulli_percolation(1.0, 50, 3);
  EXPECT_EQ(full.sites.size(), 101u);
  EXPECT_EQ(*full.sites.begin(), -50);
  EXPECT_EQ(full.longest_segment(true), 101);
  EXPECT_EQ(full.longest_segment(false), 0);
  const auto empty = sample_bernoulli_percolation(0.0, 50, 3);
  EXPECT_TRUE(empty.sites.empty());
  EXPECT_EQ(empty.longest_segment(false), 101);
  EXPECT_THROW(sample_bernoulli_percolation(1.5, 10, 1), ValidationError);
  EXPECT_THROW(sample_bernoulli_percolation(-0.1, 10, 1), ValidationError);
  EXPECT_THROW(sample_bernoulli_percolation(0.5, -1, 1), ValidationError);
}

// Hoeffding: P(|X/n - 1/2| > 0.02) <= 2 exp(-2 n 0.02^2) ~ 2e-7 at n = 20001.
TEST(Percolation, DensityConcentrates) {
  const std::int64_t w = 10000;
  const double n = 2.0 * w + 1.0;
  EXPECT_LT(2.0 * std::exp(-2.0 * n * 0.02 * 0.02), 1e-6);
  int good = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto s = sample_bernoulli_percolation(0.5, w, seed);
    const double density = static_cast<double>(s.sites.size()) / n;
    good += density >= 0.48 && density <= 0.52;
  }
  EXPECT_GE(good, 95);
}

// 0.03 is about 2.7 binomial standard deviations at 2000 seeds, which an
// exactly i.i.d. sampler overshoots at one of 17 sites ~7% of the time;
// 20000 seeds keep the same tolerance well clear of sampling noise.
TEST(Percolation, SiteMarginalsShiftInvariant) {
  const std::int64_t w = 8;
  for (double p : {0.3, 0.5}) {
    std::vector<double> hits(2 * w + 1, 0.0);
    const int seeds = 20000;
    for (int seed = 0; seed < seeds; ++seed) {
      for (auto x : sample_bernoulli_percolation(p, w, static_cast<std::uint64_t>(seed)).sites) hits[static_cast<std::size_t>(x + w)] += 1.0;
    }
    double mean = 0.0;
    for (auto& h : hits) mean += (h /= seeds) / static_cast<double>(hits.size());
    for (double h : hits) EXPECT_NEAR(h, mean, 0.03) << "p=" << p;
  }
}

TEST(Percolation, Deterministic) {
  const auto s1 = sample_bernoulli_percolation(0.4, 200, 17), s2 = sample_bernoulli_percolation(0.4, 200, 17);
  EXPECT_EQ(s1.sites, s2.sites);
  EXPECT_NE(s1.sites, sample_bernoulli_percolation(0.4, 200, 18).sites);
}

TEST(WreathPercolation, Membership) {
  PercolationSample with_zero{{0, 3}, 5, 0.5, 0}, without_zero{{3}, 5, 0.5, 0};
  const auto x = parse_wreath("(0:a; 0)");
  EXPECT_TRUE(wreath_percolation_oracle(with_zero)->contains_element(x));
  EXPECT_FALSE(wreath_percolation_oracle(without_zero)->contains_element(x));
  EXPECT_FALSE(wreath_percolation_oracle(with_zero)->contains_element(parse_wreath("(0:a; 2)")));
  EXPECT_TRUE(wreath_percolation_oracle(with_zero)->contains_element(parse_wreath("(0:ab, 3:B; 0)")));
}

TEST(WreathPercolation, FullWindowIsZLine) {
  const auto o = wreath_percolation_oracle(sample_bernoulli_percolation(1.0, 40, 5));
  const auto ball = generate_ball(*o, 10);
  ASSERT_EQ(ball.size(), 21u);
  // Hand construction: vertex s^k, s-edges k -> k+1, a and b loops.
  std::map<std::int64_t, std::size_t> at;
  for (std::size_t v = 0; v < ball.size(); ++v) {
    const auto e = WreathOracle::decode(ball.ids[v]);
    EXPECT_TRUE(e.support().empty());
    at[e.shift()] = v;
  }
  for (std::int64_t k = -10; k <= 10; ++k) {
    ASSERT_TRUE(at.contains(k));
    const auto v = at[k];
    if (k < 10) EXPECT_EQ(ball.neighbor(v, 0), static_cast<std::int32_t>(at[k + 1]));
    if (k > -10) EXPECT_EQ(ball.neighbor(v, 1), static_cast<std::int32_t>(at[k - 1]));
    for (int s = 2; s < 6; ++s) EXPECT_EQ(ball.neighbor(v, s), static_cast<std::int32_t>(v));
  }
}

TEST(Permutations, SinglePointIsWholeGroup) {
  const auto o = permutation_stabilizer_oracle(1, 2, 9);
  for (const auto& x : oracle::reduced_words(2, 4)) EXPECT_TRUE(o->contains(x));
}

TEST(Permutations, Transpositions) {
  const auto o = std::make_shared<PermutationOracle>(std::vector<std::vector<int>>{{1, 0}, {1, 0}}, 0);
  EXPECT_EQ(generate_ball(*o, 3).size(), 2u);
  for (const auto& x : oracle::reduced_words(2, 4)) EXPECT_EQ(o->contains(x), x.size() % 2 == 0);
}

TEST(Permutations, MostlyTransitive) {
  int transitive = 0;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const auto perms = sample_permutations(50, 2, seed);
    const auto orbit = oracle::orbit(perms, 0);
    transitive += orbit.size() == 50u;
    EXPECT_EQ(closed_schreier_graph(*permutation_stabilizer_oracle(50, 2, seed)).size(), orbit.size());
  }
  EXPECT_GE(transitive, 475);
}

TEST(Permutations, Deterministic) {
  EXPECT_EQ(sample_permutations(30, 3, 4), sample_permutations(30, 3, 4));
  EXPECT_NE(sample_permutations(30, 3, 4), sample_permutations(30, 3, 5));
  for (const auto& perm : sample_permutations(30, 3, 4)) {
    std::vector<int> sorted = perm;
    std::sort(sorted.begin(), sorted.end());
    for (int k = 0; k < 30; ++k) EXPECT_EQ(sorted[static_cast<std::size_t>(k)], k);
  }
  EXPECT_THROW(sample_permutations(0, 2, 1), ValidationError);
}

// H^g is the stabilizer of the point reached by g. Its law matches that of H.
TEST(Permutations, ConjugationInvariantInLaw) {
  const int seeds = 2000;
  for (const auto* word : {"ab", "aBa"}) {
    const auto g = parse_word(word, 2);
    std::map<std::string, double> base, conj;
    for (int seed = 0; seed < seeds; ++seed) {
      const auto h = permutation_stabilizer_oracle(6, 2, static_cast<std::uint64_t>(seed));
      base[ball_class(generate_ball(*h, 2))] += 1.0 / seeds;
      const RerootedOracle hg(h, h->act_word(g, h->root()));
      conj[ball_class(generate_ball(hg, 2))] += 1.0 / seeds;
    }
    std::set<std::string> keys;
    for (const auto& [k, v] : base) keys.insert(k);
    for (const auto& [k, v] : conj) keys.insert(k);
    double tv = 0.0;
    for (const auto& k : keys) tv += std::abs(base[k] - conj[k]);
    EXPECT_LE(tv / 2.0, 0.05) << word;
  }
}

TEST(Kernel, ExamplesAndMembership) {
  const auto o = kernel_to_Z_oracle({1, 0});
  EXPECT_GE(dirichlet_lower_bound(generate_ball(*o, 40)).value, 0.99);
  // b-loops make M = 1/2 + (path walk)/2 on the 79-vertex interior.
  EXPECT_NEAR(dirichlet_lower_bound(generate_ball(*o, 40)).value, 0.5 + 0.5 * std::cos(std::numbers::pi / 80.0), 1e-6);
  EXPECT_NEAR(dirichlet_lower_bound(generate_ball(*kernel_to_Z_oracle({1}), 40)).value, std::cos(std::numbers::pi / 80.0), 1e-6);
  for (const auto& x : oracle::reduced_words(2, 6)) {
    int exponent = 0;
    for (const auto& g : x.letters()) exponent += g.index == 0 ? g.sign : 0;
    EXPECT_EQ(o->act_word(x, o->root()) == o->root(), exponent == 0);
  }
  EXPECT_THROW(kernel_to_Z_oracle({0, 0}), ValidationError);
}

TEST(Serialization, PercolationRoundTrip) {
  const auto s = sample_bernoulli_percolation(0.3, 60, 12);
  const auto j = to_json(s);
  EXPECT_EQ(j["family"], "percolation");
  const auto back = percolation_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(back.sites, s.sites);
  EXPECT_EQ(back.window, s.window);
  EXPECT_EQ(back.seed, s.seed);
  EXPECT_EQ(back.p, s.p);
  const auto o1 = oracle_from_sample(nlohmann::json::parse(j.dump()));
  const auto o2 = wreath_percolation_oracle(s);
  EXPECT_EQ(generate_ball(*o1, 4).ids, generate_ball(*o2, 4).ids);
}

TEST(Serialization, PermutationRoundTrip) {
  const auto j = permutation_sample_json(20, 2, 8);
  const auto o1 = oracle_from_sample(nlohmann::json::parse(j.dump()));
  const auto o2 = permutation_stabilizer_oracle(20, 2, 8);
  EXPECT_EQ(closed_schreier_graph(*o1).neighbors, closed_schreier_graph(*o2).neighbors);
}

TEST(Serialization, Errors) {
  EXPECT_THROW(oracle_from_sample(nlohmann::json{{"family", "nope"}}), ValidationError);
  EXPECT_THROW(oracle_from_sample(nlohmann::json::object()), ValidationError);
  auto j = nlohmann::json::parse(to_json(sample_bernoulli_percolation(1.0, 2, 1)).dump());
  j["data"]["sites"].push_back(99);
  EXPECT_THROW(percolation_from_json(j), ValidationError);
}
