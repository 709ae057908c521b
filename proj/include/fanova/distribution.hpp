#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <unordered_map>

#include "fanova/common.hpp"

namespace fanova {

/// Cartesian product of per-feature category sets {0..N_i-1}.
struct HyperGrid {
  std::vector<int> cardinalities;

  int dimension() const { return static_cast<int>(cardinalities.size()); }

  /// |E| = prod N_i. Throws OverflowError when it exceeds 64 bits.
  std::uint64_t full_size() const;

  void validate() const;
};

/// Marginal pmf p_A over the observed projections of a feature subset.
class MarginalTable {
 public:
  MarginalTable(Subset subset, std::map<Row, double> probabilities);

  const Subset& subset() const { return subset_; }
  const std::map<Row, double>& probabilities() const { return probabilities_; }

  /// p_A(x_A); throws DataError for an unobserved projection.
  double at(const Row& projection) const;

 private:
  Subset subset_;
  std::map<Row, double> probabilities_;
};

/// Empirical categorical distribution: r distinct support rows with strictly
/// positive weights summing to one. Immutable after construction; marginal
/// tables are memoized per subset behind a mutex so concurrent readers are
/// safe.
class EmpiricalDistribution {
 public:
  /// Deduplicate raw observations into a weighted support. Without an
  /// explicit grid, N_i = 1 + max observed category of feature i. Optional
  /// per-sample weights generalize the uniform 1/n case.
  static EmpiricalDistribution from_dataset(
      const std::vector<Row>& rows, std::optional<HyperGrid> grid = {},
      std::span<const double> sample_weights = {});

  /// Build directly from distinct rows and normalized weights.
  static EmpiricalDistribution from_support(std::vector<Row> support,
                                            std::vector<double> weights,
                                            std::optional<HyperGrid> grid = {});

  const HyperGrid& grid() const { return grid_; }
  int dimension() const { return grid_.dimension(); }

  /// r, the number of distinct support rows.
  std::size_t size() const { return support_.size(); }

  const std::vector<Row>& support() const { return support_; }
  const Row& row(std::size_t k) const { return support_[k]; }
  double weight(std::size_t k) const { return weights_[k]; }
  const std::vector<double>& weights() const { return weights_; }

  std::optional<std::size_t> find_row(const Row& x) const;

  Row project(std::size_t k, const Subset& a) const;

  /// Memoized marginal table for subset A (A = {} gives the trivial table).
  const MarginalTable& marginal(const Subset& a) const;

  /// <u, v> = sum_k u_k v_k w_k.
  double inner_product(std::span<const double> u,
                       std::span<const double> v) const;

  double mean(std::span<const double> u) const;
  double variance(std::span<const double> u) const;

 private:
  EmpiricalDistribution(HyperGrid grid, std::vector<Row> support,
                        std::vector<double> weights);

  // The memoized marginal cache sits behind a pointer so the distribution
  // stays movable despite the mutex.
  struct MarginalCache {
    std::mutex mutex;
    std::map<Subset, std::unique_ptr<MarginalTable>> tables;
  };

  HyperGrid grid_;
  std::vector<Row> support_;
  std::vector<double> weights_;
  std::map<Row, std::size_t> row_index_;
  std::unique_ptr<MarginalCache> marginal_cache_;
};

}  // namespace fanova
