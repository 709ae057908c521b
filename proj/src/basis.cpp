#include "fanova/basis.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fanova {

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (b != 0 && a > std::numeric_limits<std::uint64_t>::max() / b) {
    throw OverflowError("index space size exceeds 64-bit range");
  }
  return a * b;
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  if (a > std::numeric_limits<std::uint64_t>::max() - b) {
    throw OverflowError("index space size exceeds 64-bit range");
  }
  return a + b;
}

}  // namespace

bool IndexKey::contains(int feature) const {
  return std::binary_search(features.begin(), features.end(), feature);
}

std::string IndexKey::describe() const {
  std::ostringstream os;
  os << subset_to_string(features) << ":(";
  for (std::size_t j = 0; j < categories.size(); ++j) {
    if (j) os << ',';
    os << categories[j];
  }
  os << ')';
  return os.str();
}

void validate_key(const HyperGrid& grid, const IndexKey& key) {
  if (key.features.size() != key.categories.size()) {
    throw DataError("key " + key.describe() + ": |z| != |A|");
  }
  if (!std::is_sorted(key.features.begin(), key.features.end()) ||
      std::adjacent_find(key.features.begin(), key.features.end()) !=
          key.features.end()) {
    throw DataError("key features must be strictly increasing");
  }
  for (std::size_t j = 0; j < key.features.size(); ++j) {
    const int i = key.features[j];
    if (i < 0 || i >= grid.dimension()) {
      throw DataError("key feature out of range");
    }
    if (key.categories[j] < 0 ||
        key.categories[j] >= grid.cardinalities[i] - 1) {
      throw DataError("key " + key.describe() +
                      ": category outside truncated grid");
    }
  }
}

std::uint64_t index_space_size(const HyperGrid& grid, int max_order) {
  const int d = grid.dimension();
  if (max_order < 0 || max_order > d) {
    throw DataError("max_order must lie in [0, d]");
  }
  // counts[j] = sum over subsets of size j of prod (N_i - 1)
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(max_order) + 1, 0);
  counts[0] = 1;
  for (int i = 0; i < d; ++i) {
    const auto factor = static_cast<std::uint64_t>(grid.cardinalities[i] - 1);
    for (int j = std::min(max_order, i + 1); j >= 1; --j) {
      counts[j] = checked_add(counts[j], checked_mul(counts[j - 1], factor));
    }
  }
  std::uint64_t total = 0;
  for (std::uint64_t c : counts) total = checked_add(total, c);
  return total;
}

std::vector<double> evaluate_psi(const EmpiricalDistribution& dist, int feature,
                                 int category) {
  const int d = dist.dimension();
  if (feature < 0 || feature >= d) throw DataError("feature out of range");
  const int n = dist.grid().cardinalities[feature];
  if (category < 0 || category >= n - 1) {
    throw DataError("psi category outside truncated range");
  }
  std::vector<double> values(dist.size(), 0.0);
  for (std::size_t k = 0; k < dist.size(); ++k) {
    const int x = dist.row(k)[feature];
    if (x == category) {
      values[k] = 1.0;
    } else if (x == n - 1) {
      values[k] = -1.0;
    }
  }
  return values;
}

BasisColumn evaluate_phi(const EmpiricalDistribution& dist,
                         const IndexKey& key) {
  validate_key(dist.grid(), key);
  BasisColumn column{key, std::vector<double>(dist.size(), 1.0)};
  if (key.is_empty()) return column;

  const MarginalTable& pa = dist.marginal(key.features);
  const std::size_t m = key.features.size();
  Row proj(m);
  for (std::size_t k = 0; k < dist.size(); ++k) {
    const Row& x = dist.row(k);
    int sign = 1;
    for (std::size_t j = 0; j < m; ++j) {
      const int i = key.features[j];
      const int xi = x[i];
      proj[j] = xi;
      if (xi == key.categories[j]) {
        // +1 factor
      } else if (xi == dist.grid().cardinalities[i] - 1) {
        sign = -sign;
      } else {
        sign = 0;
        break;
      }
    }
    column.values[k] = (sign == 0) ? 0.0 : sign / pa.at(proj);
  }
  return column;
}

std::vector<BasisColumn> evaluate_phi_batch_serial(
    const EmpiricalDistribution& dist, std::span<const IndexKey> keys) {
  std::vector<BasisColumn> columns;
  columns.reserve(keys.size());
  for (const IndexKey& key : keys) columns.push_back(evaluate_phi(dist, key));
  return columns;
}

std::vector<BasisColumn> evaluate_phi_batch(const EmpiricalDistribution& dist,
                                            std::span<const IndexKey> keys) {
  // Warm the marginal cache serially; the parallel loop then only reads it.
  for (const IndexKey& key : keys) dist.marginal(key.features);
  std::vector<BasisColumn> columns(keys.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(keys.size());
       ++i) {
    columns[i] = evaluate_phi(dist, keys[i]);
  }
  return columns;
}

KeyStream::KeyStream(const HyperGrid& grid, Options options) : grid_(grid) {
  grid_.validate();
  const int d = grid_.dimension();
  std::vector<int> sequence = options.feature_sequence;
  if (sequence.empty()) {
    sequence.resize(d);
    for (int i = 0; i < d; ++i) sequence[i] = i;
  }
  for (int i : sequence) {
    if (i < 0 || i >= d) throw DataError("feature sequence entry out of range");
    if (grid_.cardinalities[i] >= 2) sequence_.push_back(i);
  }
  if (options.pair_mask) pair_mask_ = *options.pair_mask;
  max_order_ = (options.max_order < 0) ? d : std::min(options.max_order, d);
}

bool KeyStream::subset_allowed() const {
  if (pair_mask_.empty() || combo_.size() < 2) return true;
  for (std::size_t a = 0; a < combo_.size(); ++a) {
    for (std::size_t b = a + 1; b < combo_.size(); ++b) {
      const int i = sequence_[combo_[a]];
      const int j = sequence_[combo_[b]];
      if (!pair_mask_[i][j] && !pair_mask_[j][i]) return false;
    }
  }
  return true;
}

void KeyStream::load_subset() {
  subset_.clear();
  for (int pos : combo_) subset_.push_back(sequence_[pos]);
  std::sort(subset_.begin(), subset_.end());
  z_.assign(subset_.size(), 0);
}

// Move to the first allowed subset of order >= order_, or report exhaustion.
bool KeyStream::advance_subset() {
  const int m = static_cast<int>(sequence_.size());
  while (order_ <= max_order_) {
    if (order_ > m) return false;  // no larger subsets exist either
    if (combo_.empty() || static_cast<int>(combo_.size()) != order_) {
      combo_.resize(order_);
      for (int j = 0; j < order_; ++j) combo_[j] = j;
      if (subset_allowed()) {
        load_subset();
        return true;
      }
    }
    // lexicographic next combination of {0..m-1} choose order_
    for (;;) {
      int j = order_ - 1;
      while (j >= 0 && combo_[j] == m - order_ + j) --j;
      if (j < 0) break;  // order exhausted
      ++combo_[j];
      for (int t = j + 1; t < order_; ++t) combo_[t] = combo_[t - 1] + 1;
      if (subset_allowed()) {
        load_subset();
        return true;
      }
    }
    ++order_;
    combo_.clear();
  }
  return false;
}

std::optional<IndexKey> KeyStream::next() {
  if (done_) return std::nullopt;
  if (!emitted_empty_) {
    emitted_empty_ = true;
    order_ = 1;
    if (!advance_subset()) done_ = true;
    return IndexKey::empty();
  }
  IndexKey key{subset_, z_};
  // advance the z odometer over the truncated grid of the current subset
  bool wrapped = true;
  for (int j = static_cast<int>(z_.size()) - 1; j >= 0; --j) {
    if (z_[j] + 1 < grid_.cardinalities[subset_[j]] - 1) {
      ++z_[j];
      std::fill(z_.begin() + j + 1, z_.end(), 0);
      wrapped = false;
      break;
    }
  }
  if (wrapped) {
    if (!advance_subset()) done_ = true;
  }
  return key;
}

}  // namespace fanova
