#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "mrfsl/learners.hpp"
#include "oracles.hpp"

using namespace mrfsl;

namespace {
const double kLn2 = std::log(2.0);

EstimatorConfig plugin() { return {EstimatorMethod::PlugIn, 3, false}; }
EstimatorConfig knn() { return {EstimatorMethod::KnnMixed, 3, false}; }
LearnerConfig plugin_at(double lambda) { return {lambda, plugin(), std::nullopt}; }

/// X0 fair coin, X1 = X0, X2 independent coin.
Dataset copy_and_coin(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<int> a(n), c(n);
  for (std::size_t r = 0; r < n; ++r) {
    a[r] = static_cast<int>(rng() >> 63);
    c[r] = static_cast<int>(rng() >> 63);
  }
  return oracle::discrete({a, a, c});
}

/// Exactly balanced XOR table: X0, X2 fair coins, X1 = X0 xor X2.
Dataset balanced_xor(int reps) {
  std::vector<int> x0, x1, x2;
  for (int r = 0; r < reps; ++r)
    for (int a = 0; a < 2; ++a)
      for (int c = 0; c < 2; ++c) {
        x0.push_back(a);
        x1.push_back(a ^ c);
        x2.push_back(c);
      }
  return oracle::discrete({x0, x1, x2});
}
}  // namespace

TEST(ObjectiveJ, CompleteGraphIsZero) {
  const auto d = oracle::random_bn_data(4, 200, 3);
  EdgeSet full(4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j) full.insert(i, j);
  EXPECT_EQ(objective_j(d, full, plugin()), 0.0);
}

TEST(ObjectiveJ, EmptyGraphMatchesEntropyOracle) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto d = oracle::random_bn_data(4, 300, 40 + seed);
    double expected = 0;
    for (std::size_t i = 0; i < 4; ++i) {
      VarSet rest;
      for (std::size_t v = 0; v < 4; ++v)
        if (v != i) rest.push_back(v);
      expected += oracle::cmi(d, {i}, rest, {});
    }
    EXPECT_NEAR(objective_j(d, EdgeSet(4), plugin()), expected, 1e-12);
  }
}

TEST(ObjectiveJ, MatchesOracleOnRandomEdgeSets) {
  std::mt19937_64 rng(4);
  const auto d = oracle::random_bn_data(5, 250, 5);
  for (int trial = 0; trial < 30; ++trial) {
    EdgeSet es(5);
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = i + 1; j < 5; ++j)
        if (rng() % 2) es.insert(i, j);
    EXPECT_NEAR(objective_j(d, es, plugin()), oracle::objective(d, es), 1e-12);
  }
}

TEST(Scores, EmptyGraphGrowIsTwiceMi) {
  const auto d = oracle::random_bn_data(4, 300, 6);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      if (i == j) continue;
      EXPECT_NEAR(grow_score(d, EdgeSet(4), i, j, plugin()), 2 * oracle::cmi(d, {i}, {j}, {}),
                  1e-12);
    }
}

TEST(Scores, SymmetricExactly) {
  const auto c = oracle::continuous(oracle::correlated_gaussian(150, 0.6, 2));
  Eigen::MatrixXd x(150, 4);
  x.leftCols(2) = c.values();
  x.rightCols(2) = oracle::correlated_gaussian(150, 0.3, 3);
  const auto d = oracle::continuous(x);
  const EdgeSet es(4, {{0, 2}, {1, 3}, {2, 3}});
  EXPECT_EQ(grow_score(d, es, 0, 1, knn()), grow_score(d, es, 1, 0, knn()));
  EXPECT_EQ(grow_score(d, es, 0, 3, knn()), grow_score(d, es, 3, 0, knn()));
  EXPECT_EQ(shrink_score(d, es, 2, 3, knn()), shrink_score(d, es, 3, 2, knn()));
  EXPECT_EQ(shrink_score(d, es, 0, 2, knn()), shrink_score(d, es, 2, 0, knn()));
}

TEST(Scores, ChainGrowScoreAgainstContingencyOracle) {
  const auto d = oracle::noisy_chain(3, 800, 0.8, 7);
  const EdgeSet es(3, {{0, 1}});
  const double expected = oracle::cmi(d, {1}, {2}, {0}) + oracle::cmi(d, {1}, {2}, {});
  EXPECT_NEAR(grow_score(d, es, 1, 2, plugin()), expected, 1e-12);
}

TEST(Scores, SingleEdgeShrinkIsTwiceMi) {
  const auto d = oracle::random_bn_data(3, 300, 8);
  EXPECT_NEAR(shrink_score(d, EdgeSet(3, {{0, 2}}), 0, 2, plugin()),
              2 * oracle::cmi(d, {0}, {2}, {}), 1e-12);
}

TEST(Scores, ShrinkAfterGrowEqualsGrow) {
  std::mt19937_64 rng(9);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto d = oracle::random_bn_data(5, 200, 60 + seed);
    EdgeSet es(5);
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = i + 1; j < 5; ++j)
        if (rng() % 3 == 0) es.insert(i, j);
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = i + 1; j < 5; ++j) {
        if (es.contains(i, j)) continue;
        EXPECT_EQ(shrink_score(d, add_edge(es, i, j), i, j, plugin()),
                  grow_score(d, es, i, j, plugin()));
      }
  }
}

TEST(Scores, Errors) {
  const auto d = oracle::independent_coins(3, 50, 1);
  const EdgeSet es(3, {{0, 1}});
  EXPECT_THROW(grow_score(d, es, 0, 1, plugin()), ArgumentError);
  EXPECT_THROW(grow_score(d, es, 2, 2, plugin()), ArgumentError);
  EXPECT_THROW(shrink_score(d, es, 0, 2, plugin()), ArgumentError);
  EXPECT_THROW(grow_score(d, es, 0, 3, plugin()), IndexError);
  EXPECT_THROW(objective_j(d, EdgeSet(4), plugin()), ArgumentError);
}

TEST(ChainRule, GrowAndShrinkStepsMatchObjectiveDifferences) {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const auto d = oracle::random_bn_data(5, 150, 200 + seed);
    const auto result = gs_mple(d, plugin_at(0.0));
    EdgeSet es(5);
    for (const auto& step : result.trace) {
      if (!step.accepted) continue;
      const double before = oracle::objective(d, es);
      if (step.phase == Phase::Grow) {
        EXPECT_NEAR(grow_score(d, es, step.i, step.j, plugin()), step.score, 1e-12);
        es.insert(step.i, step.j);
        EXPECT_NEAR(before - oracle::objective(d, es), step.score, 1e-9) << "seed " << seed;
      } else {
        es.erase(step.i, step.j);
        EXPECT_NEAR(oracle::objective(d, es) - before, step.score, 1e-9) << "seed " << seed;
      }
    }
    EXPECT_EQ(es, result.edges);
  }
}

TEST(ChainRule, ShrinkIdentityOnArbitraryEdgeSets) {
  std::mt19937_64 rng(10);
  const auto d = oracle::random_bn_data(5, 300, 11);
  for (int trial = 0; trial < 40; ++trial) {
    EdgeSet es(5);
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = i + 1; j < 5; ++j)
        if (rng() % 2) es.insert(i, j);
    for (auto [i, j] : es.edges()) {
      const double delta = oracle::objective(d, remove_edge(es, i, j)) - oracle::objective(d, es);
      EXPECT_NEAR(shrink_score(d, es, i, j, plugin()), delta, 1e-9);
    }
  }
}

TEST(GsMple, IndependentCoinsGiveEmptyGraph) {
  int empty = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed)
    empty += gs_mple(oracle::independent_coins(5, 1000, 300 + seed), plugin_at(0.05)).edges.empty();
  EXPECT_GE(empty, 45);
}

TEST(GsMple, CopiedCoinMatchesExhaustiveMinimizer) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto d = copy_and_coin(5000, seed);
    const auto result = gs_mple(d, plugin_at(0.1));
    EXPECT_EQ(result.edges, EdgeSet(3, {{0, 1}}));
    EXPECT_EQ(oracle::exhaustive_minimizer(d, 0.1), result.edges);
  }
}

TEST(GsMple, TraceInvariants) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto d = oracle::random_bn_data(6, 200, 400 + seed);
    const auto result = gs_mple(d, plugin_at(0.02));
    EdgeSet es(6);
    bool in_shrink = false;
    for (std::size_t s = 0; s < result.trace.size(); ++s) {
      const auto& step = result.trace[s];
      EXPECT_LT(step.i, step.j);
      if (step.phase == Phase::Shrink) in_shrink = true;
      EXPECT_FALSE(in_shrink && step.phase == Phase::Grow) << "grow after shrink";
      if (step.phase == Phase::Grow) {
        EXPECT_EQ(step.accepted, step.score > 0.02);
        if (step.accepted) {
          EXPECT_FALSE(es.contains(step.i, step.j));
          es.insert(step.i, step.j);
        }
      } else {
        EXPECT_EQ(step.accepted, step.score <= 0.02);
        if (step.accepted) {
          EXPECT_TRUE(es.contains(step.i, step.j));
          es.erase(step.i, step.j);
        }
      }
      // only the last step of each phase may be rejected
      if (!step.accepted && s + 1 < result.trace.size())
        EXPECT_EQ(step.phase, Phase::Grow);
    }
    EXPECT_EQ(es, result.edges);
  }
}

TEST(GsMple, Deterministic) {
  const auto d = oracle::continuous(oracle::correlated_gaussian(120, 0.7, 12));
  Eigen::MatrixXd x(120, 4);
  x.leftCols(2) = d.values();
  x.rightCols(2) = oracle::correlated_gaussian(120, 0.4, 13);
  const auto data = oracle::continuous(x);
  const LearnerConfig cfg{0.01, knn(), std::nullopt};
  const auto a = gs_mple(data, cfg), b = gs_mple(data, cfg);
  EXPECT_EQ(a.edges, b.edges);
  EXPECT_EQ(format_trace(a.trace), format_trace(b.trace));
  EXPECT_EQ(iamb(data, cfg), iamb(data, cfg));
  EXPECT_EQ(gsmn(data, cfg), gsmn(data, cfg));
  EXPECT_EQ(chow_liu(data, knn()), chow_liu(data, knn()));
}

TEST(GsMple, GrowPathIsNestedAcrossLambda) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto d = oracle::random_bn_data(6, 150, 500 + seed);
    auto grown = [&](double lambda) {
      EdgeSet es(6);
      for (const auto& s : gs_mple(d, plugin_at(lambda)).trace)
        if (s.phase == Phase::Grow && s.accepted) es.insert(s.i, s.j);
      return es;
    };
    const auto loose = grown(0.0), tight = grown(0.05);
    for (auto [i, j] : tight.edges()) EXPECT_TRUE(loose.contains(i, j));
  }
}

TEST(GsMple, MaxEdgesCapsGrowth) {
  const auto d = oracle::random_bn_data(6, 200, 14);
  LearnerConfig cfg = plugin_at(0.0);
  cfg.max_edges = 2;
  const auto result = gs_mple(d, cfg);
  std::size_t grown = 0;
  for (const auto& s : result.trace) grown += s.phase == Phase::Grow && s.accepted;
  EXPECT_LE(grown, 2u);
  EXPECT_LE(result.edges.size(), 2u);
}

TEST(GsMple, RejectsBadConfig) {
  const auto d = oracle::independent_coins(3, 50, 1);
  EXPECT_THROW(gs_mple(d, plugin_at(-0.1)), ArgumentError);
  EXPECT_THROW(gs_mple(d, plugin_at(NAN)), ArgumentError);
  EXPECT_THROW(gs_mple(oracle::continuous(oracle::correlated_gaussian(30, 0.5, 1)), plugin_at(0)),
               EstimatorMismatch);
}

TEST(GsMple, TraceFormat) {
  const LearnTrace trace{{Phase::Grow, 0, 2, 0.5, true}, {Phase::Shrink, 0, 2, 0.5, false}};
  const auto text = format_trace(trace);
  EXPECT_EQ(text.substr(0, 9), "grow 0 2 ");
  EXPECT_NE(text.find("\nshrink 0 2 "), std::string::npos);
  EXPECT_EQ(text.back(), '\n');
}

TEST(Iamb, IndependentVariablesGiveEmptyGraph) {
  int empty = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed)
    empty += iamb(oracle::independent_coins(5, 1000, 600 + seed), plugin_at(0.05)).empty();
  EXPECT_GE(empty, 45);
}

TEST(Iamb, NoisyChainRecovered) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto d = oracle::noisy_chain(3, 2000, 0.9, 700 + seed);
    const double lambda = 0.05;
    // the empirical table's conditional-independence structure is a chain
    ASSERT_LE(oracle::cmi(d, {0}, {2}, {1}), lambda);
    ASSERT_GT(oracle::cmi(d, {0}, {1}, {2}), lambda);
    ASSERT_GT(oracle::cmi(d, {1}, {2}, {0}), lambda);
    EXPECT_EQ(iamb(d, plugin_at(lambda)), EdgeSet(3, {{0, 1}, {1, 2}}));
  }
}

TEST(Iamb, OutputIsOrOfBlankets) {
  Eigen::MatrixXd x(150, 5);
  x.leftCols(2) = oracle::correlated_gaussian(150, 0.6, 20);
  x.middleCols(2, 2) = oracle::correlated_gaussian(150, 0.3, 21);
  x.col(4) = x.col(0) + x.col(3);
  const auto d = oracle::continuous(x);
  for (double lambda : {0.0, 0.02, 0.1}) {
    const LearnerConfig cfg{lambda, knn(), std::nullopt};
    MiCache cache(d, knn());
    const auto blankets = markov_blankets(cache, cfg);
    EdgeSet expected(5);
    for (std::size_t i = 0; i < 5; ++i)
      for (auto j : blankets[i]) expected.insert(i, j);
    EXPECT_EQ(iamb(d, cfg), expected);
  }
}

TEST(Gsmn, ShrinkIsIdentityWhenBothTermsExceedLambda) {
  const auto d = oracle::noisy_chain(4, 1000, 0.9, 22);
  MiCache cache(d, plugin());
  const EdgeSet chain(4, {{0, 1}, {1, 2}, {2, 3}});
  EXPECT_EQ(gsmn_shrink(cache, chain, 0.05), chain);
}

TEST(Gsmn, MinRuleDiffersFromPairedScore) {
  // E = {01, 02}: I(0;1 | 2) = ln 2 but I(1;0) = 0, so the min rule drops
  // the edge while the paired shrink score stays at ln 2 > lambda.
  const auto d = balanced_xor(50);
  const EdgeSet es(3, {{0, 1}, {0, 2}});
  MiCache cache(d, plugin());
  const Neighborhood nb(es);
  EXPECT_NEAR(local_term(cache, 0, 1, {2}), kLn2, 1e-12);
  EXPECT_NEAR(local_term(cache, 1, 0, {}), 0.0, 1e-12);
  EXPECT_NEAR(shrink_score(cache, nb, 0, 1), kLn2, 1e-12);
  EXPECT_FALSE(gsmn_shrink(cache, es, 0.1).contains(0, 1));
}

TEST(Gsmn, IndependentVariablesGiveEmptyGraph) {
  int empty = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed)
    empty += gsmn(oracle::independent_coins(5, 1000, 800 + seed), plugin_at(0.05)).empty();
  EXPECT_GE(empty, 45);
}

TEST(ChowLiu, TwoVariables) {
  EXPECT_EQ(chow_liu(oracle::independent_coins(2, 40, 1), plugin()), EdgeSet(2, {{0, 1}}));
  EXPECT_THROW(chow_liu(oracle::independent_coins(1, 40, 1), plugin()), ArgumentError);
}

TEST(ChowLiu, ThreeNodeWeightOrder) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<int> a(2000), b(2000), c(2000);
  for (std::size_t r = 0; r < 2000; ++r) {
    a[r] = u(rng) < 0.5;
    b[r] = u(rng) < 0.95 ? a[r] : 1 - a[r];
    c[r] = u(rng) < 0.8 ? a[r] : 1 - a[r];
  }
  const auto d = oracle::discrete({a, b, c});
  const double w01 = oracle::cmi(d, {0}, {1}, {}), w02 = oracle::cmi(d, {0}, {2}, {}),
               w12 = oracle::cmi(d, {1}, {2}, {});
  ASSERT_GT(w01, w02);
  ASSERT_GT(w02, w12);
  EXPECT_EQ(chow_liu(d, plugin()), EdgeSet(3, {{0, 1}, {0, 2}}));
}

TEST(ChowLiu, ChainRecoveredAndMatchesExhaustiveTree) {
  const EdgeSet chain(4, {{0, 1}, {1, 2}, {2, 3}});
  // spanning trees of K4: the 3-edge subsets that connect all four nodes
  std::vector<EdgeSet> trees;
  for (const auto& es : oracle::all_edge_sets(4)) {
    if (es.size() != 3) continue;
    std::vector<std::size_t> reach{0};
    for (std::size_t k = 0; k < reach.size(); ++k)
      for (auto v : neighborhood(es, reach[k]))
        if (std::find(reach.begin(), reach.end(), v) == reach.end()) reach.push_back(v);
    if (reach.size() == 4) trees.push_back(es);
  }
  ASSERT_EQ(trees.size(), 16u);

  int recovered = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto d = oracle::noisy_chain(4, 2000, 0.8, 900 + seed);
    const auto tree = chow_liu(d, plugin());
    ASSERT_EQ(tree.size(), 3u);
    const EdgeSet* best = nullptr;
    double best_w = -1;
    for (const auto& t : trees) {
      double w = 0;
      for (auto [i, j] : t.edges()) w += oracle::cmi(d, {i}, {j}, {});
      if (w > best_w + 1e-12) best_w = w, best = &t;
    }
    EXPECT_EQ(tree, *best) << "seed " << seed;
    recovered += tree == chain;
  }
  EXPECT_GE(recovered, 48);
}

TEST(Dispatch, NamesRoundTrip) {
  for (auto a : {Algorithm::GsMple, Algorithm::Iamb, Algorithm::Gsmn, Algorithm::ChowLiu})
    EXPECT_EQ(parse_algorithm(to_string(a)), a);
  EXPECT_THROW(parse_algorithm("pc"), ArgumentError);
  const auto d = copy_and_coin(2000, 1);
  MiCache cache(d, plugin());
  EXPECT_EQ(learn(Algorithm::GsMple, cache, plugin_at(0.1)), gs_mple(d, plugin_at(0.1)).edges);
}
