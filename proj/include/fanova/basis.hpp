#pragma once

#include <compare>
#include <optional>

#include "fanova/distribution.hpp"

namespace fanova {

/// One index (A, z): a feature subset together with one category per feature
/// from the truncated grid (each z_j < N_j - 1). The pair (A={}, z=()) is the
/// unique empty key.
struct IndexKey {
  Subset features;
  Row categories;

  static IndexKey empty() { return IndexKey{}; }

  bool is_empty() const { return features.empty(); }
  int order() const { return static_cast<int>(features.size()); }

  bool contains(int feature) const;

  auto operator<=>(const IndexKey&) const = default;

  std::string describe() const;
};

void validate_key(const HyperGrid& grid, const IndexKey& key);

/// Evaluation of phi_A^(z) on the r support rows.
struct BasisColumn {
  IndexKey key;
  std::vector<double> values;
};

/// Number of admissible keys with |A| <= max_order:
/// sum over subsets of prod (N_i - 1). Equals |E| at max_order = d.
/// Throws OverflowError when the count exceeds 64 bits.
std::uint64_t index_space_size(const HyperGrid& grid, int max_order);

/// psi_i^(z): +1 where x_i = z, -1 where x_i = N_i - 1, else 0.
std::vector<double> evaluate_psi(const EmpiricalDistribution& dist, int feature,
                                 int category);

/// phi_A^(z)(x) = prod_{i in A} psi_i^(z_i)(x) / p_A(x_A); all-ones for the
/// empty key.
BasisColumn evaluate_phi(const EmpiricalDistribution& dist,
                         const IndexKey& key);

/// Batch evaluation, parallel over keys.
std::vector<BasisColumn> evaluate_phi_batch(const EmpiricalDistribution& dist,
                                            std::span<const IndexKey> keys);

/// Serial reference for the batch kernel.
std::vector<BasisColumn> evaluate_phi_batch_serial(
    const EmpiricalDistribution& dist, std::span<const IndexKey> keys);

/// Lazy enumeration of the index space. Keys are produced grouped by subset
/// cardinality; within a cardinality, subsets follow the lexicographic order
/// of the configured feature sequence, and z runs lexicographically over the
/// truncated grid of the (sorted) subset. The full space is never
/// materialized: |I| can be astronomically larger than r.
class KeyStream {
 public:
  struct Options {
    int max_order = -1;                 // -1: no cap beyond d
    std::vector<int> feature_sequence;  // enumeration priority; empty: 0..d-1
    // Optional pair constraint: subsets of order >= 2 must be cliques.
    const std::vector<std::vector<char>>* pair_mask = nullptr;
  };

  KeyStream(const HyperGrid& grid, Options options);

  /// Next admissible key, or nullopt when exhausted. Features with N_i = 1
  /// never appear (their truncated grid is empty).
  std::optional<IndexKey> next();

 private:
  bool advance_subset();
  bool subset_allowed() const;
  void load_subset();

  HyperGrid grid_;
  std::vector<int> sequence_;  // active features in enumeration order
  std::vector<std::vector<char>> pair_mask_;
  int max_order_ = 0;
  int order_ = 0;
  bool emitted_empty_ = false;
  bool done_ = false;
  std::vector<int> combo_;  // positions into sequence_, increasing
  Subset subset_;           // sorted feature ids of current combo
  Row z_;                   // odometer over the truncated grid of subset_
};

}  // namespace fanova
