#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "fanova/anova.hpp"
#include "fanova/selection.hpp"
#include "fanova/validation.hpp"

using namespace fanova;

namespace {

std::shared_ptr<EmpiricalDistribution> toy_distribution() {
  HyperGrid grid;
  grid.cardinalities = {2, 2};
  return std::make_shared<EmpiricalDistribution>(
      EmpiricalDistribution::from_support({{0, 0}, {0, 1}, {1, 0}},
                                          {0.5, 0.2, 0.3}, grid));
}

}  // namespace

TEST_CASE("greedy selection on the paper's three-point support") {
  auto dist = toy_distribution();
  SelectedBasis basis = greedy_select(*dist, SelectionConfig{});
  REQUIRE(basis.keys.size() == 3);
  CHECK(basis.keys[0] == IndexKey::empty());
  CHECK(basis.keys[1] == IndexKey{{0}, {0}});
  CHECK(basis.keys[2] == IndexKey{{1}, {0}});
  CHECK(basis.achieved_rank == 3);
  CHECK(basis.scanned == 3);  // full rank reached before u12 is examined

  // u12 is indeed dependent: replaying the accepted columns through a fresh
  // tracker leaves it with a negligible residual.
  RankTracker tracker(*dist, 1e-9);
  for (const IndexKey& key : basis.keys) {
    REQUIRE(tracker.add(evaluate_phi(*dist, key).values).accepted);
  }
  auto rejected = tracker.add(
      evaluate_phi(*dist, IndexKey{{0, 1}, {0, 0}}).values);
  CHECK(!rejected.accepted);
}

TEST_CASE("perfectly correlated pair collapses to rank 2") {
  HyperGrid grid;
  grid.cardinalities = {2, 2};
  auto dist = std::make_shared<EmpiricalDistribution>(
      EmpiricalDistribution::from_support({{0, 0}, {1, 1}}, {0.4, 0.6}, grid));
  SelectedBasis basis = greedy_select(*dist, SelectionConfig{});
  REQUIRE(basis.keys.size() == 2);
  CHECK(basis.keys[0] == IndexKey::empty());
  CHECK(basis.keys[1] == IndexKey{{0}, {0}});  // phi_2's column is dependent
  CHECK(basis.achieved_rank == 2);
}

TEST_CASE("full independent grid selects every key") {
  std::mt19937_64 rng(67);
  auto dist = gen::random_product_distribution(rng, 3, 3, 32);
  SelectedBasis basis = greedy_select(*dist, SelectionConfig{});
  CHECK(basis.achieved_rank == dist->size());
  CHECK(basis.keys.size() == dist->grid().full_size());
}

TEST_CASE("inactive feature screening") {
  // feature 0 nearly constant, feature 1 balanced, feature 2 single-category
  std::vector<Row> rows;
  for (int n = 0; n < 999; ++n) rows.push_back({0, n % 2, 0});
  rows.push_back({1, 0, 0});
  auto dist = EmpiricalDistribution::from_dataset(rows);
  const std::vector<int> inactive = inactive_features(dist, 0.01);
  CHECK(inactive == std::vector<int>{0, 2});
  // a tight threshold keeps the rare-category feature
  CHECK(inactive_features(dist, 0.0001) == std::vector<int>{2});
  CHECK_THROWS_AS(inactive_features(dist, -1.0), DataError);
}

TEST_CASE("prune_inactive removes a degenerate feature from selection") {
  std::vector<Row> rows;
  for (int n = 0; n < 999; ++n) rows.push_back({n % 2, (n / 2) % 2, 0});
  rows.push_back({0, 0, 1});
  auto dist = std::make_shared<EmpiricalDistribution>(
      EmpiricalDistribution::from_dataset(rows));

  SelectionConfig config;
  config.prune_inactive = true;
  SelectedBasis basis = greedy_select(*dist, config);
  CHECK(basis.pruned_features == std::vector<int>{2});
  for (const IndexKey& key : basis.keys) {
    CHECK(!key.contains(2));
  }
}

TEST_CASE("rank tracker accepts, rejects, and measures residuals") {
  std::mt19937_64 rng(71);
  auto dist = gen::random_sparse_distribution(rng, 4, 3, 64, 0.5);
  RankTracker tracker(*dist, 1e-9);

  std::vector<double> ones(dist->size(), 1.0);
  auto first = tracker.add(ones);
  CHECK(first.accepted);
  CHECK(first.residual_norm == doctest::Approx(1.0).epsilon(1e-12));

  auto dup = tracker.add(ones);
  CHECK(!dup.accepted);
  CHECK(dup.residual_norm < 1e-12);

  std::vector<double> second = gen::random_values(rng, dist->size());
  REQUIRE(tracker.add(second).accepted);

  // a column in the accepted span, up to 1e-15 noise, must be rejected
  std::vector<double> combo(dist->size());
  for (std::size_t k = 0; k < combo.size(); ++k) {
    combo[k] = 2.0 * ones[k] + 3.0 * second[k] + 1e-15;
  }
  CHECK(!tracker.add(combo).accepted);
  CHECK(tracker.rank() == 2);
}

TEST_CASE("selection is deterministic and independent of f") {
  std::mt19937_64 rng(73);
  auto dist = gen::random_sparse_distribution(rng, 4, 4, 128, 0.3);
  SelectionConfig config;
  config.rank_budget = dist->size() / 2 + 1;
  SelectedBasis a = greedy_select(*dist, config);
  SelectedBasis b = greedy_select(*dist, config);
  CHECK(a.keys == b.keys);
  CHECK(a.scanned == b.scanned);
  // the API takes no f at all: Algorithm 1 sees only the distribution
}

TEST_CASE("budget handling") {
  std::mt19937_64 rng(79);
  auto dist = gen::random_sparse_distribution(rng, 4, 3, 64, 0.5);

  SelectionConfig small;
  small.rank_budget = 3;
  SelectedBasis basis = greedy_select(*dist, small);
  CHECK(basis.keys.size() == 3);
  CHECK(!basis.budget_clamped);

  SelectionConfig big;
  big.rank_budget = dist->size() + 1000;
  SelectedBasis clamped = greedy_select(*dist, big);
  CHECK(clamped.budget_clamped);
  CHECK(clamped.achieved_rank == dist->size());

  SelectionConfig zero;
  zero.rank_budget = 0;
  CHECK_THROWS_AS(greedy_select(*dist, zero), DataError);
}

TEST_CASE("max_order restricts selection to main effects") {
  std::mt19937_64 rng(83);
  auto dist = gen::random_full_grid_distribution(rng, 4, 3, 128);
  SelectionConfig config;
  config.max_order = 1;
  SelectedBasis basis = greedy_select(*dist, config);
  std::size_t expected = 1;
  for (int n : dist->grid().cardinalities) {
    expected += static_cast<std::size_t>(n - 1);
  }
  CHECK(basis.keys.size() == expected);
  for (const IndexKey& key : basis.keys) CHECK(key.order() <= 1);
}

TEST_CASE("monotone R^2 over nested selection prefixes") {
  std::mt19937_64 rng(89);
  auto dist = gen::random_sparse_distribution(rng, 4, 4, 128, 0.3);
  std::vector<double> f = gen::random_values(rng, dist->size());
  SelectedBasis basis = greedy_select(*dist, SelectionConfig{});

  double previous = -1.0;
  for (std::size_t m = 1; m <= basis.keys.size(); m += 3) {
    std::vector<IndexKey> prefix(basis.keys.begin(), basis.keys.begin() + m);
    Decomposition dec = assemble_decomposition(
        dist, prefix, fit_least_squares(*dist, f, prefix).values);
    const double r2 = metrics(dec, f).r_squared;
    CHECK(r2 >= previous - 1e-10);
    previous = r2;
  }
}

TEST_CASE("variance-ranked ordering prioritizes the dominant feature") {
  // f depends strongly on feature 1 and not at all on feature 0
  auto dist = std::make_shared<EmpiricalDistribution>(
      EmpiricalDistribution::from_dataset({{0, 0}, {0, 1}, {1, 0}, {1, 1}}));
  std::vector<double> f(dist->size());
  for (std::size_t k = 0; k < dist->size(); ++k) {
    f[k] = dist->row(k)[1] == 0 ? -5.0 : 5.0;
  }
  OrderingStrategy strategy = OrderingStrategy::variance_ranked(*dist, f);
  REQUIRE(strategy.feature_rank.size() == 2);
  CHECK(strategy.feature_rank[0] == 1);

  SelectionConfig config;
  config.ordering = strategy;
  config.rank_budget = 2;
  SelectedBasis basis = greedy_select(*dist, config);
  REQUIRE(basis.keys.size() == 2);
  CHECK(basis.keys[1] == IndexKey{{1}, {0}});  // ranked ahead of feature 0
}

TEST_CASE("neighborhood ordering restricts pairs to cliques") {
  std::mt19937_64 rng(97);
  auto dist = gen::random_full_grid_distribution(rng, 3, 2, 8);
  const int d = dist->dimension();
  REQUIRE(d >= 2);

  std::vector<std::vector<int>> adjacency(d);
  adjacency[0].push_back(1);
  adjacency[1].push_back(0);  // only the 0-1 edge

  SelectionConfig config;
  config.ordering = OrderingStrategy::neighborhood(adjacency);
  SelectedBasis basis = greedy_select(*dist, config);
  for (const IndexKey& key : basis.keys) {
    if (key.order() < 2) continue;
    CHECK(key.features == Subset{0, 1});
  }

  SelectionConfig bad;
  bad.ordering = OrderingStrategy::neighborhood({{0}});  // wrong size
  CHECK_THROWS_AS(greedy_select(*dist, bad), DataError);
}
