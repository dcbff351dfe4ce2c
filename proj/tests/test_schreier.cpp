#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace cospec;

namespace {

Word w(std::string_view s, int rank = 2) { return parse_word(s, rank); }

std::int64_t decode_int(const CosetId& c) {
  std::size_t pos = 0;
  return coset_codec::get(c, pos);
}

std::vector<std::int32_t> ball_vertices_where(const SchreierBall& ball, const std::function<bool(std::size_t)>& pred) {
  std::vector<std::int32_t> out;
  for (std::size_t v = 0; v < ball.size(); ++v) {
    if (pred(v)) out.push_back(static_cast<std::int32_t>(v));
  }
  return out;
}

}  // namespace

TEST(CosetCodec, RoundTrip) {
  for (std::int64_t v : {0L, 1L, -1L, 63L, -64L, 1000000L, -987654321L}) {
    CosetId c;
    coset_codec::put(c, v);
    coset_codec::put(c, -v);
    std::size_t pos = 0;
    EXPECT_EQ(coset_codec::get(c, pos), v);
    EXPECT_EQ(coset_codec::get(c, pos), -v);
    EXPECT_EQ(pos, c.size());
  }
}

TEST(Ball, TrivialSubgroupRadiusTwo) {
  const auto ball = generate_ball(*make_trivial_oracle(2), 2);
  EXPECT_EQ(ball.size(), 17u);
  EXPECT_EQ(ball.edge_count(), 16u);
}

TEST(Ball, KernelToZ) {
  const auto o = kernel_to_Z_oracle({1, 0});
  const auto ball = generate_ball(*o, 5);
  ASSERT_EQ(ball.size(), 11u);
  std::set<std::int64_t> labels;
  for (std::size_t v = 0; v < ball.size(); ++v) {
    labels.insert(decode_int(ball.ids[v]));
    EXPECT_EQ(ball.neighbor(v, 2), static_cast<std::int32_t>(v));  // b-loop
    EXPECT_EQ(ball.neighbor(v, 3), static_cast<std::int32_t>(v));
  }
  EXPECT_EQ(*labels.begin(), -5);
  EXPECT_EQ(*labels.rbegin(), 5);
}

TEST(Ball, SinglePointActionIsWholeGroup) {
  for (int r : {0, 1, 7}) {
    const auto ball = generate_ball(*permutation_stabilizer_oracle(1, 2, 5), r);
    ASSERT_EQ(ball.size(), 1u);
    for (int s = 0; s < 4; ++s) EXPECT_EQ(ball.neighbor(0, s), 0);
  }
}

TEST(Ball, Errors) {
  EXPECT_THROW(generate_ball(*make_trivial_oracle(2), -1), ValidationError);
  try {
    generate_ball(*make_trivial_oracle(2), 10, 1000);
    FAIL() << "expected the vertex cap to trigger";
  } catch (const PartialBallError& e) {
    EXPECT_EQ(e.attained_radius(), 5);  // |B(5)| = 485, |B(6)| = 1457
  }
}

TEST(Ball, DeterministicAndSymmetric) {
  Rng rng(3);
  std::vector<OraclePtr> oracles{make_stallings_oracle({w("aab"), w("bAb")}, 2), kernel_to_Z_oracle({2, -1}),
                                 permutation_stabilizer_oracle(30, 2, 9),
                                 std::make_shared<WreathOracle>(parse_site_set("0..3+7"), 20)};
  for (const auto& o : oracles) {
    const auto b1 = generate_ball(*o, 5), b2 = generate_ball(*o, 5);
    EXPECT_EQ(b1.ids, b2.ids);
    EXPECT_EQ(b1.neighbors, b2.neighbors);
    for (std::size_t v = 0; v < b1.size(); ++v) {
      EXPECT_LE(b1.dist[v], 5);
      for (int s = 0; s < b1.degree(); ++s) {
        const auto t = b1.neighbor(v, s);
        if (t < 0) {
          EXPECT_EQ(b1.dist[v], 5);
          continue;
        }
        EXPECT_EQ(b1.neighbor(static_cast<std::size_t>(t), s ^ 1), static_cast<std::int32_t>(v));
      }
      // The BFS tree word leads from the root to the vertex.
      EXPECT_EQ(o->act_word(b1.word_to(v), o->root()), b1.ids[v]);
      EXPECT_EQ(static_cast<int>(b1.word_to(v).size()), b1.dist[v]);
    }
  }
}

TEST(Ball, SummaryAndDot) {
  const auto o = make_trivial_oracle(2);
  const auto ball = generate_ball(*o, 2);
  const auto j = ball_summary(ball);
  EXPECT_EQ(j["vertices"], 17);
  EXPECT_EQ(j["edges"], 16);
  EXPECT_EQ(j["radius"], 2);
  EXPECT_EQ(j["truncated"], true);
  const auto dot = to_dot(ball, *o);
  std::size_t node_lines = 0;
  std::istringstream in(dot);
  std::string line;
  while (std::getline(in, line)) node_lines += line.find("[label=") != std::string::npos && line.find("->") == std::string::npos;
  EXPECT_EQ(node_lines, 17u);
  EXPECT_NE(dot.find("doublecircle"), std::string::npos);
}

TEST(Ball, ClosedGraphOfFiniteAction) {
  const auto ball = closed_schreier_graph(*make_stallings_oracle({w("aa"), w("b"), w("abA")}, 2));
  EXPECT_EQ(ball.size(), 2u);
  EXPECT_TRUE(ball.closed());
  EXPECT_EQ(ball.radius, 1);
}

TEST(Interior, IntervalInZ) {
  const auto ball = generate_ball(*kernel_to_Z_oracle({1}), 10);
  const auto p = ball_vertices_where(ball, [&](std::size_t v) { return std::abs(decode_int(ball.ids[v])) <= 2; });
  const auto set = interior_boundary(ball, p);
  EXPECT_EQ(set.interior.size(), 3u);
  EXPECT_EQ(set.outer_boundary.size(), 2u);
  EXPECT_FALSE(set.truncated);
  for (auto v : set.outer_boundary) EXPECT_EQ(std::abs(decode_int(ball.ids[static_cast<std::size_t>(v)])), 3);
}

TEST(Interior, WholeComponentAndTreeRoot) {
  const auto closed = closed_schreier_graph(*permutation_stabilizer_oracle(12, 2, 4));
  std::vector<std::int32_t> all(closed.size());
  std::iota(all.begin(), all.end(), 0);
  const auto whole = interior_boundary(closed, all);
  EXPECT_TRUE(whole.outer_boundary.empty());
  EXPECT_EQ(whole.interior, whole.members);

  const auto tree = generate_ball(*make_trivial_oracle(2), 3);
  const auto root = interior_boundary(tree, {0});
  EXPECT_TRUE(root.interior.empty());
  EXPECT_EQ(root.outer_boundary.size(), 4u);

  const auto rim = interior_boundary(tree, ball_vertices_where(tree, [&](std::size_t v) { return tree.dist[v] == 3; }));
  EXPECT_TRUE(rim.truncated);
}

// int(P) = P \ boundary(X \ P), computed from the complement's boundary.
TEST(Interior, DualityOnRandomSubsets) {
  Rng rng(5);
  const auto ball = generate_ball(*make_stallings_oracle({w("abA"), w("bb")}, 2), 6);
  for (int t = 0; t < 50; ++t) {
    std::vector<std::int32_t> p, complement;
    for (std::size_t v = 0; v < ball.size(); ++v) {
      (ball.dist[v] < 6 && rng.bernoulli(0.7) ? p : complement).push_back(static_cast<std::int32_t>(v));
    }
    if (p.empty() || complement.empty()) continue;
    const auto set = interior_boundary(ball, p);
    const auto co = interior_boundary(ball, complement);
    std::set<std::int32_t> expected(p.begin(), p.end());
    for (auto v : co.outer_boundary) expected.erase(v);
    EXPECT_EQ(std::vector<std::int32_t>(expected.begin(), expected.end()), set.interior);
  }
}

TEST(ProductOracle, WholeTimesWhole) {
  const auto ball = closed_schreier_graph(*product_oracle(make_whole_group_oracle(2), make_whole_group_oracle(2)));
  EXPECT_EQ(ball.size(), 1u);
}

TEST(ProductOracle, IndicesTwoAndThree) {
  const auto o2 = make_stallings_oracle({w("aa"), w("b"), w("abA")}, 2);
  const auto o3 = make_stallings_oracle({w("aaa"), w("b"), w("abA"), w("aabAA")}, 2);
  ASSERT_EQ(closed_schreier_graph(*o3).size(), 3u);
  const auto sizes = product_component_sizes(*o2, *o3);
  EXPECT_EQ(std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}), 6u);
}

TEST(ProductOracle, FamilyMismatchRejected) {
  EXPECT_THROW(product_oracle(make_trivial_oracle(3), std::make_shared<WreathOracle>(std::set<std::int64_t>{}, 3)),
               ValidationError);
  EXPECT_THROW(product_oracle(make_trivial_oracle(2), make_trivial_oracle(3)), ValidationError);
}

// Kernel of b-exponent times the index-2 a-parity kernel: the root
// component is the strip Z x {0, 1}, with b moving along Z and a switching
// the parity. Compared against the explicit strip graph.
TEST(ProductOracle, StripOverZ) {
  const auto h1 = kernel_to_Z_oracle({0, 1});
  const auto h2 = make_stallings_oracle({w("aa"), w("b"), w("abA")}, 2);
  const auto product = product_oracle(h1, h2);
  const int radius = 9;
  const auto ball = generate_ball(*product, radius);
  std::set<std::pair<std::int64_t, int>> expected;
  for (std::int64_t k = -radius; k <= radius; ++k) {
    for (int p : {0, 1}) {
      if (std::abs(k) + p <= radius) expected.emplace(k, p);
    }
  }
  std::set<std::pair<std::int64_t, int>> got;
  for (std::size_t v = 0; v < ball.size(); ++v) {
    const auto [c1, c2] = ProductOracle::split(ball.ids[v]);
    const auto k = decode_int(c1);
    const auto p = static_cast<int>(decode_int(c2));
    got.emplace(k, p);
    const auto a_nb = ball.neighbor(v, 0), b_nb = ball.neighbor(v, 2);
    if (a_nb >= 0) {
      const auto [d1, d2] = ProductOracle::split(ball.ids[static_cast<std::size_t>(a_nb)]);
      EXPECT_EQ(decode_int(d1), k);
      EXPECT_EQ(decode_int(d2), 1 - p);
    }
    if (b_nb >= 0) {
      const auto [d1, d2] = ProductOracle::split(ball.ids[static_cast<std::size_t>(b_nb)]);
      EXPECT_EQ(decode_int(d1), k + 1);
      EXPECT_EQ(decode_int(d2), p);
    }
  }
  EXPECT_EQ(got, expected);
  EXPECT_EQ(got.size(), 36u);
}

TEST(Reroot, StabilizerIsConjugate) {
  const auto h = make_stallings_oracle({w("aab"), w("bA")}, 2);
  Rng rng(8);
  for (const auto& g : {w("b"), w("aB"), w("ba")}) {
    const auto conj = reroot(h, g);
    for (const auto& x : oracle::reduced_words(2, 5)) {
      // x fixes H g  <=>  g x g^-1 in H.
      EXPECT_EQ(conj->contains(x), h->contains(g * x * g.inverse()));
    }
  }
}

TEST(DoubleCosets, WholeGroup) {
  const auto whole = make_whole_group_oracle(2);
  const auto dc = enumerate_double_cosets(whole, whole, 3);
  ASSERT_EQ(dc.size(), 1u);
  EXPECT_TRUE(dc[0].finite);
  EXPECT_EQ(dc[0].component_size, 1u);
}

// For the normal subgroup K = ker(a -> 1, b -> 0), K\F/K is Z and the
// component of (0, c) is the fiber k1 - k2 = -c.
TEST(DoubleCosets, NormalKernel) {
  const auto k = kernel_to_Z_oracle({1, 0});
  const int radius = 4;
  const auto dc = enumerate_double_cosets(k, k, radius, 200);
  ASSERT_EQ(dc.size(), static_cast<std::size_t>(2 * radius + 1));
  std::set<std::int64_t> offsets;
  for (const auto& e : dc) {
    EXPECT_FALSE(e.finite);
    const auto [c1, c2] = ProductOracle::split(e.start);
    offsets.insert(decode_int(c1) - decode_int(c2));
    // Representative is a power of a.
    for (const auto& g : e.representative.letters()) EXPECT_EQ(g.index, 0);
    EXPECT_EQ(static_cast<std::int64_t>(e.representative.size()), std::abs(decode_int(c2)));
  }
  EXPECT_EQ(offsets.size(), dc.size());
  // Brute-force pair BFS from each start stays on its fiber.
  const auto product = product_oracle(k, k);
  for (const auto& e : dc) {
    RerootedOracle comp(product, e.start);
    const auto ball = generate_ball(comp, 6);
    const auto [s1, s2] = ProductOracle::split(e.start);
    for (const auto& id : ball.ids) {
      const auto [c1, c2] = ProductOracle::split(id);
      EXPECT_EQ(decode_int(c1) - decode_int(c2), decode_int(s1) - decode_int(s2));
    }
  }
}

TEST(DoubleCosets, FiniteIndexPairMatchesBruteForce) {
  Rng rng(12);
  for (int t = 0; t < 20; ++t) {
    const std::vector<std::vector<int>> p1{rng.permutation(4), rng.permutation(4)};
    const std::vector<std::vector<int>> p2{rng.permutation(5), rng.permutation(5)};
    auto o1 = std::make_shared<PermutationOracle>(p1, 0);
    auto o2 = std::make_shared<PermutationOracle>(p2, 0);
    const auto brute = oracle::double_coset_sizes(p1, 0, p2, 0);
    const auto dc = enumerate_double_cosets(o1, o2, 6);
    std::vector<std::size_t> sizes;
    for (const auto& e : dc) {
      EXPECT_TRUE(e.finite);
      sizes.push_back(e.component_size);
    }
    std::sort(sizes.begin(), sizes.end());
    EXPECT_EQ(sizes, brute);
    EXPECT_EQ(product_component_sizes(*o1, *o2), brute);
  }
}

TEST(DoubleCosets, ComponentLimit) {
  const auto k = kernel_to_Z_oracle({1, 0});
  EXPECT_EQ(enumerate_double_cosets(k, k, 5, 100, 3).size(), 3u);
}

TEST(Folner, IntervalInZ) {
  const auto ball = generate_ball(*kernel_to_Z_oracle({1}), 10);
  const auto interval = ball_vertices_where(ball, [&](std::size_t v) { return std::abs(decode_int(ball.ids[v])) <= 7; });
  ASSERT_EQ(interval.size(), 15u);
  EXPECT_NEAR(folner_defect(ball, interval), 2.0 / 15.0, 1e-15);
  const auto found = folner_search(ball);
  EXPECT_LE(found.defect, 2.0 / 15.0);
  EXPECT_DOUBLE_EQ(found.defect, folner_defect(ball, found.set.members));
}

TEST(Folner, WholeGroupHasZeroDefect) {
  const auto found = folner_search(generate_ball(*make_whole_group_oracle(2), 3));
  EXPECT_EQ(found.defect, 0.0);
  EXPECT_EQ(found.set.members.size(), 1u);
}

// Observed minimum over the produced candidates, not a proof of isoperimetry.
TEST(Folner, TreeCandidatesStayAboveOneHalf) {
  const auto found = folner_search(generate_ball(*make_trivial_oracle(2), 8));
  EXPECT_GE(found.defect, 0.5);
  EXPECT_GT(found.candidates, 8u);
}

TEST(Folner, FiniteGraphFindsWholeComponent) {
  const auto ball = closed_schreier_graph(*permutation_stabilizer_oracle(20, 2, 3));
  const auto found = folner_search(ball);
  EXPECT_EQ(found.defect, 0.0);
}

TEST(Wreath, MembershipAndCosets) {
  const WreathOracle in_a({0}, 10), not_in_a({1}, 10);
  const auto x = parse_wreath("(0:a; 0)");
  EXPECT_TRUE(in_a.contains_element(x));
  EXPECT_FALSE(not_in_a.contains_element(x));
  EXPECT_FALSE(in_a.contains_element(parse_wreath("(; 1)")));
  // Acting by a word from the root lands on the coset of its value.
  Rng rng(2);
  for (int t = 0; t < 200; ++t) {
    std::vector<Generator> letters;
    for (int k = 0; k < 12; ++k) letters.push_back(Generator::from_slot(static_cast<int>(rng.uniform(6))));
    const Word word(letters);
    EXPECT_EQ(in_a.act_word(word, in_a.root()), in_a.coset_of(evaluate_wreath_word(word)));
    EXPECT_EQ(in_a.contains(word), in_a.contains_element(evaluate_wreath_word(word)));
  }
}

TEST(Wreath, FullWindowGivesZLine) {
  const auto sample = sample_bernoulli_percolation(1.0, 30, 1);
  const auto o = wreath_percolation_oracle(sample);
  const auto ball = generate_ball(*o, 8);
  ASSERT_EQ(ball.size(), 17u);
  for (std::size_t v = 0; v < ball.size(); ++v) {
    for (int s = 2; s < 6; ++s) EXPECT_EQ(ball.neighbor(v, s), static_cast<std::int32_t>(v));
    EXPECT_TRUE(WreathOracle::decode(ball.ids[v]).support().empty());
  }
}

TEST(Wreath, WindowExceeded) {
  const auto o = std::make_shared<WreathOracle>(std::set<std::int64_t>{0}, 3);
  EXPECT_NO_THROW(generate_ball(*o, 3));
  EXPECT_THROW(generate_ball(*o, 5), WindowExceededError);
  EXPECT_THROW(WreathOracle({5}, 3), ValidationError);
}

TEST(Permutation, TranspositionPair) {
  const auto o = std::make_shared<PermutationOracle>(std::vector<std::vector<int>>{{1, 0}, {1, 0}}, 0);
  const auto ball = closed_schreier_graph(*o);
  EXPECT_EQ(ball.size(), 2u);
  EXPECT_EQ(o->describe(o->root()), "1");
  EXPECT_THROW(PermutationOracle({{0, 0}}, 0), ValidationError);
}

TEST(Kernel, ZeroWeightsRejectedAndMembership) {
  EXPECT_THROW(kernel_to_Z_oracle({0, 0}), ValidationError);
  const auto k = kernel_to_Z_oracle({1, 0});
  for (const auto& x : oracle::reduced_words(2, 5)) {
    int sum = 0;
    for (const auto& g : x.letters()) sum += g.index == 0 ? g.sign : 0;
    EXPECT_EQ(k->contains(x), sum == 0);
  }
}
