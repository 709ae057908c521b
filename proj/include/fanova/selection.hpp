#pragma once

#include <limits>

#include "fanova/basis.hpp"

namespace fanova {

/// Candidate enumeration order for the greedy basis construction.
struct OrderingStrategy {
  enum class Kind { Canonical, VarianceRanked, Neighborhood };

  Kind kind = Kind::Canonical;
  // VarianceRanked: all features, sorted by decreasing score.
  std::vector<int> feature_rank;
  // Neighborhood: per-feature neighbor lists; subsets of order >= 2 are
  // restricted to cliques of this graph.
  std::vector<std::vector<int>> adjacency;

  static OrderingStrategy canonical() { return {}; }

  /// Rank features by the weighted variance of the conditional mean of f
  /// given the feature (a main-effect proxy). Ties break on feature index,
  /// so the ordering stays deterministic.
  static OrderingStrategy variance_ranked(const EmpiricalDistribution& dist,
                                          std::span<const double> f_values);

  static OrderingStrategy neighborhood(std::vector<std::vector<int>> adjacency);
};

struct SelectionConfig {
  int max_order = -1;  // -1: up to d
  std::size_t rank_budget = std::numeric_limits<std::size_t>::max();
  double rank_tolerance = 1e-9;
  OrderingStrategy ordering;
  bool prune_inactive = false;
  double prune_threshold = 0.01;
};

struct SelectedBasis {
  std::vector<IndexKey> keys;
  std::size_t achieved_rank = 0;  // == keys.size()
  std::size_t scanned = 0;        // candidates examined
  std::vector<int> pruned_features;
  bool budget_clamped = false;
};

/// Features whose empirical category distribution is within threshold of
/// degenerate (some category has probability >= 1 - threshold). Features with
/// a single category are always included.
std::vector<int> inactive_features(const EmpiricalDistribution& dist,
                                   double threshold);

/// Incremental numerical-rank test under the weighted inner product.
/// Classical Gram-Schmidt with one reorthogonalization pass; a column is
/// accepted iff its residual norm exceeds tolerance times its original norm.
class RankTracker {
 public:
  RankTracker(const EmpiricalDistribution& dist, double tolerance);

  struct Result {
    bool accepted;
    double residual_norm;
  };

  Result add(std::vector<double> column);

  std::size_t rank() const { return basis_.size(); }

 private:
  const EmpiricalDistribution& dist_;
  double tolerance_;
  std::vector<std::vector<double>> basis_;  // weighted-orthonormal
};

/// Walk the configured ordering starting from the empty key, keeping each
/// candidate column iff it strictly increases numerical rank; stop at the
/// rank budget, at full rank r, or on exhaustion. Depends only on the
/// distribution, never on f.
SelectedBasis greedy_select(const EmpiricalDistribution& dist,
                            const SelectionConfig& config);

}  // namespace fanova
