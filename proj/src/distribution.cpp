#include "fanova/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace fanova {

std::string subset_to_string(const Subset& a) {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) os << ',';
    os << a[i];
  }
  os << '}';
  return os.str();
}

std::uint64_t HyperGrid::full_size() const {
  std::uint64_t total = 1;
  for (int n : cardinalities) {
    const auto factor = static_cast<std::uint64_t>(n);
    if (factor != 0 &&
        total > std::numeric_limits<std::uint64_t>::max() / factor) {
      throw OverflowError("hypergrid size exceeds 64-bit range");
    }
    total *= factor;
  }
  return total;
}

void HyperGrid::validate() const {
  for (std::size_t i = 0; i < cardinalities.size(); ++i) {
    if (cardinalities[i] < 1) {
      throw DataError("feature " + std::to_string(i) +
                      " has non-positive cardinality");
    }
  }
}

MarginalTable::MarginalTable(Subset subset, std::map<Row, double> probabilities)
    : subset_(std::move(subset)), probabilities_(std::move(probabilities)) {}

double MarginalTable::at(const Row& projection) const {
  auto it = probabilities_.find(projection);
  if (it == probabilities_.end()) {
    throw DataError("projection not observed for subset " +
                    subset_to_string(subset_));
  }
  return it->second;
}

EmpiricalDistribution::EmpiricalDistribution(HyperGrid grid,
                                             std::vector<Row> support,
                                             std::vector<double> weights)
    : grid_(std::move(grid)),
      support_(std::move(support)),
      weights_(std::move(weights)),
      marginal_cache_(std::make_unique<MarginalCache>()) {
  for (std::size_t k = 0; k < support_.size(); ++k) {
    if (!row_index_.emplace(support_[k], k).second) {
      throw DataError("duplicate support row at position " + std::to_string(k));
    }
  }
}

EmpiricalDistribution EmpiricalDistribution::from_dataset(
    const std::vector<Row>& rows, std::optional<HyperGrid> grid,
    std::span<const double> sample_weights) {
  if (rows.empty()) throw DataError("empty dataset");
  if (!sample_weights.empty() && sample_weights.size() != rows.size()) {
    throw DataError("sample weight count does not match row count");
  }
  const std::size_t d = rows.front().size();

  std::map<Row, double> mass;
  double total = 0.0;
  for (std::size_t n = 0; n < rows.size(); ++n) {
    const Row& x = rows[n];
    if (x.size() != d) throw DataError("ragged row at position " + std::to_string(n));
    for (std::size_t i = 0; i < d; ++i) {
      if (x[i] < 0) {
        throw DataError("negative category in row " + std::to_string(n));
      }
      if (grid && x[i] >= grid->cardinalities[i]) {
        throw DataError("row " + std::to_string(n) + ": category " +
                        std::to_string(x[i]) + " out of range for feature " +
                        std::to_string(i));
      }
    }
    const double w = sample_weights.empty() ? 1.0 : sample_weights[n];
    if (w <= 0.0) throw DataError("non-positive sample weight at row " + std::to_string(n));
    mass[x] += w;
    total += w;
  }

  HyperGrid g;
  if (grid) {
    g = *std::move(grid);
    if (g.cardinalities.size() != d) throw DataError("grid dimension mismatch");
  } else {
    g.cardinalities.assign(d, 1);
    for (const auto& [x, w] : mass) {
      for (std::size_t i = 0; i < d; ++i) {
        g.cardinalities[i] = std::max(g.cardinalities[i], x[i] + 1);
      }
    }
  }
  g.validate();

  std::vector<Row> support;
  std::vector<double> weights;
  support.reserve(mass.size());
  weights.reserve(mass.size());
  for (const auto& [x, w] : mass) {
    support.push_back(x);
    weights.push_back(w / total);
  }
  return EmpiricalDistribution(std::move(g), std::move(support),
                               std::move(weights));
}

EmpiricalDistribution EmpiricalDistribution::from_support(
    std::vector<Row> support, std::vector<double> weights,
    std::optional<HyperGrid> grid) {
  if (support.empty()) throw DataError("empty support");
  if (support.size() != weights.size()) {
    throw DataError("support/weight length mismatch");
  }
  const std::size_t d = support.front().size();
  double total = 0.0;
  for (std::size_t k = 0; k < support.size(); ++k) {
    if (support[k].size() != d) throw DataError("ragged support row");
    if (weights[k] <= 0.0) {
      throw DataError("non-positive weight at support row " + std::to_string(k));
    }
    total += weights[k];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw DataError("weights sum to " + std::to_string(total) + ", expected 1");
  }

  HyperGrid g;
  if (grid) {
    g = *std::move(grid);
    if (g.cardinalities.size() != d) throw DataError("grid dimension mismatch");
  } else {
    g.cardinalities.assign(d, 1);
    for (const Row& x : support) {
      for (std::size_t i = 0; i < d; ++i) {
        g.cardinalities[i] = std::max(g.cardinalities[i], x[i] + 1);
      }
    }
  }
  g.validate();
  for (const Row& x : support) {
    for (std::size_t i = 0; i < d; ++i) {
      if (x[i] < 0 || x[i] >= g.cardinalities[i]) {
        throw DataError("support row outside grid");
      }
    }
  }
  return EmpiricalDistribution(std::move(g), std::move(support),
                               std::move(weights));
}

std::optional<std::size_t> EmpiricalDistribution::find_row(const Row& x) const {
  auto it = row_index_.find(x);
  if (it == row_index_.end()) return std::nullopt;
  return it->second;
}

Row EmpiricalDistribution::project(std::size_t k, const Subset& a) const {
  const Row& x = support_[k];
  Row proj(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) proj[j] = x[a[j]];
  return proj;
}

const MarginalTable& EmpiricalDistribution::marginal(const Subset& a) const {
  if (!std::is_sorted(a.begin(), a.end()) ||
      std::adjacent_find(a.begin(), a.end()) != a.end()) {
    throw DataError("subset must be sorted and duplicate-free");
  }
  if (!a.empty() && (a.front() < 0 || a.back() >= dimension())) {
    throw DataError("subset feature out of range");
  }
  std::lock_guard<std::mutex> lock(marginal_cache_->mutex);
  auto it = marginal_cache_->tables.find(a);
  if (it == marginal_cache_->tables.end()) {
    std::map<Row, double> probs;
    for (std::size_t k = 0; k < support_.size(); ++k) {
      probs[project(k, a)] += weights_[k];
    }
    it = marginal_cache_->tables
             .emplace(a, std::make_unique<MarginalTable>(a, std::move(probs)))
             .first;
  }
  return *it->second;
}

double EmpiricalDistribution::inner_product(std::span<const double> u,
                                            std::span<const double> v) const {
  if (u.size() != size() || v.size() != size()) {
    throw DataError("inner_product: vector length does not match support size");
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) acc += u[k] * v[k] * weights_[k];
  return acc;
}

double EmpiricalDistribution::mean(std::span<const double> u) const {
  if (u.size() != size()) throw DataError("mean: vector length mismatch");
  double acc = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) acc += u[k] * weights_[k];
  return acc;
}

double EmpiricalDistribution::variance(std::span<const double> u) const {
  const double m = mean(u);
  double acc = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double c = u[k] - m;
    acc += c * c * weights_[k];
  }
  return acc;
}

}  // namespace fanova
