#include "fanova/selection.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>

namespace fanova {

OrderingStrategy OrderingStrategy::variance_ranked(
    const EmpiricalDistribution& dist, std::span<const double> f_values) {
  if (f_values.size() != dist.size()) {
    throw DataError("f_values length does not match support size");
  }
  const int d = dist.dimension();
  const double overall_mean = dist.mean(f_values);

  std::vector<double> scores(d, 0.0);
  for (int i = 0; i < d; ++i) {
    // conditional means of f per category of feature i
    std::vector<double> mass(dist.grid().cardinalities[i], 0.0);
    std::vector<double> acc(dist.grid().cardinalities[i], 0.0);
    for (std::size_t k = 0; k < dist.size(); ++k) {
      const int c = dist.row(k)[i];
      mass[c] += dist.weight(k);
      acc[c] += dist.weight(k) * f_values[k];
    }
    double var = 0.0;
    for (std::size_t c = 0; c < mass.size(); ++c) {
      if (mass[c] <= 0.0) continue;
      const double dev = acc[c] / mass[c] - overall_mean;
      var += mass[c] * dev * dev;
    }
    scores[i] = var;
  }

  OrderingStrategy strategy;
  strategy.kind = Kind::VarianceRanked;
  strategy.feature_rank.resize(d);
  std::iota(strategy.feature_rank.begin(), strategy.feature_rank.end(), 0);
  std::stable_sort(strategy.feature_rank.begin(), strategy.feature_rank.end(),
                   [&](int a, int b) { return scores[a] > scores[b]; });
  return strategy;
}

OrderingStrategy OrderingStrategy::neighborhood(
    std::vector<std::vector<int>> adjacency) {
  OrderingStrategy strategy;
  strategy.kind = Kind::Neighborhood;
  strategy.adjacency = std::move(adjacency);
  return strategy;
}

std::vector<int> inactive_features(const EmpiricalDistribution& dist,
                                   double threshold) {
  if (threshold < 0.0) throw DataError("prune threshold must be >= 0");
  std::vector<int> inactive;
  for (int i = 0; i < dist.dimension(); ++i) {
    if (dist.grid().cardinalities[i] <= 1) {
      inactive.push_back(i);
      continue;
    }
    std::vector<double> mass(dist.grid().cardinalities[i], 0.0);
    for (std::size_t k = 0; k < dist.size(); ++k) {
      mass[dist.row(k)[i]] += dist.weight(k);
    }
    if (*std::max_element(mass.begin(), mass.end()) >= 1.0 - threshold) {
      inactive.push_back(i);
    }
  }
  return inactive;
}

RankTracker::RankTracker(const EmpiricalDistribution& dist, double tolerance)
    : dist_(dist), tolerance_(tolerance) {
  if (tolerance <= 0.0) throw DataError("rank tolerance must be > 0");
}

RankTracker::Result RankTracker::add(std::vector<double> column) {
  if (column.size() != dist_.size()) {
    throw DataError("column length does not match support size");
  }
  const double original_norm =
      std::sqrt(dist_.inner_product(column, column));
  // CGS2: project out the accepted span, twice.
  for (int pass = 0; pass < 2; ++pass) {
    std::vector<double> coeffs(basis_.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(basis_.size());
         ++j) {
      coeffs[j] = dist_.inner_product(basis_[j], column);
    }
    for (std::size_t j = 0; j < basis_.size(); ++j) {
      const double cj = coeffs[j];
      const std::vector<double>& q = basis_[j];
      for (std::size_t k = 0; k < column.size(); ++k) column[k] -= cj * q[k];
    }
  }
  const double residual_norm =
      std::sqrt(dist_.inner_product(column, column));
  if (residual_norm <= tolerance_ * original_norm) {
    return {false, residual_norm};
  }
  for (double& v : column) v /= residual_norm;
  basis_.push_back(std::move(column));
  return {true, residual_norm};
}

SelectedBasis greedy_select(const EmpiricalDistribution& dist,
                            const SelectionConfig& config) {
  const std::size_t r = dist.size();
  SelectedBasis result;

  std::size_t budget = config.rank_budget;
  if (budget < 1) throw DataError("rank budget must be >= 1");
  if (budget > r) {
    if (budget != std::numeric_limits<std::size_t>::max()) {
      std::cerr << "warning: rank budget " << budget << " clamped to r = " << r
                << "\n";
      result.budget_clamped = true;
    }
    budget = r;
  }

  KeyStream::Options options;
  options.max_order = config.max_order;

  std::vector<char> skip(dist.dimension(), 0);
  if (config.prune_inactive) {
    result.pruned_features = inactive_features(dist, config.prune_threshold);
    for (int i : result.pruned_features) skip[i] = 1;
  }

  std::vector<int> sequence;
  if (config.ordering.kind == OrderingStrategy::Kind::VarianceRanked) {
    sequence = config.ordering.feature_rank;
  } else {
    sequence.resize(dist.dimension());
    std::iota(sequence.begin(), sequence.end(), 0);
  }
  std::erase_if(sequence, [&](int i) { return skip[i]; });
  options.feature_sequence = sequence;

  std::vector<std::vector<char>> pair_mask;
  if (config.ordering.kind == OrderingStrategy::Kind::Neighborhood) {
    const auto d = static_cast<std::size_t>(dist.dimension());
    if (config.ordering.adjacency.size() != d) {
      throw DataError("adjacency size does not match feature count");
    }
    pair_mask.assign(d, std::vector<char>(d, 0));
    for (std::size_t i = 0; i < d; ++i) {
      for (int j : config.ordering.adjacency[i]) {
        if (j < 0 || j >= static_cast<int>(d)) {
          throw DataError("adjacency entry out of range");
        }
        pair_mask[i][j] = 1;
      }
    }
    options.pair_mask = &pair_mask;
  }

  KeyStream stream(dist.grid(), options);
  RankTracker tracker(dist, config.rank_tolerance);

  while (tracker.rank() < budget) {
    std::optional<IndexKey> key = stream.next();
    if (!key) break;
    ++result.scanned;
    BasisColumn column = evaluate_phi(dist, *key);
    if (tracker.add(std::move(column.values)).accepted) {
      result.keys.push_back(std::move(*key));
    }
  }
  result.achieved_rank = tracker.rank();

  if (result.achieved_rank < budget && budget == r &&
      config.max_order < 0 &&
      config.ordering.kind != OrderingStrategy::Kind::Neighborhood &&
      !config.prune_inactive) {
    // The unrestricted key space provably spans L^2; falling short here means
    // the rank test itself broke down.
    throw NumericalError(
        "greedy selection exhausted the index space at rank " +
        std::to_string(result.achieved_rank) + " < r = " + std::to_string(r));
  }
  return result;
}

}  // namespace fanova
