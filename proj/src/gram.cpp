#include "fanova/gram.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/Dense>

namespace fanova {

namespace {

void check_distinct(std::span<const IndexKey> keys) {
  std::set<IndexKey> seen(keys.begin(), keys.end());
  if (seen.size() != keys.size()) {
    throw DataError("duplicate keys in system");
  }
}

GramSystem assemble(const EmpiricalDistribution& dist,
                    std::span<const double> f_values,
                    std::span<const IndexKey> keys, bool parallel) {
  if (f_values.size() != dist.size()) {
    throw DataError("f_values length does not match support size");
  }
  check_distinct(keys);
  const std::size_t m = keys.size();
  std::vector<BasisColumn> columns =
      parallel ? evaluate_phi_batch(dist, keys)
               : evaluate_phi_batch_serial(dist, keys);

  GramSystem system;
  system.keys.assign(keys.begin(), keys.end());
  system.gram.assign(m * m, 0.0);
  system.mean.resize(m);

  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(m); ++i) {
      for (std::size_t j = i; j < m; ++j) {
        const double g =
            dist.inner_product(columns[i].values, columns[j].values);
        system.gram[i * m + j] = g;
        system.gram[j * m + i] = g;
      }
      system.mean[i] = dist.inner_product(f_values, columns[i].values);
    }
  } else {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i; j < m; ++j) {
        const double g =
            dist.inner_product(columns[i].values, columns[j].values);
        system.gram[i * m + j] = g;
        system.gram[j * m + i] = g;
      }
      system.mean[i] = dist.inner_product(f_values, columns[i].values);
    }
  }
  return system;
}

}  // namespace

double gram_entry(const EmpiricalDistribution& dist, const IndexKey& key_a,
                  const IndexKey& key_b) {
  return dist.inner_product(evaluate_phi(dist, key_a).values,
                            evaluate_phi(dist, key_b).values);
}

double mean_coefficient(const EmpiricalDistribution& dist,
                        std::span<const double> f_values, const IndexKey& key) {
  if (f_values.size() != dist.size()) {
    throw DataError("f_values length does not match support size");
  }
  return dist.inner_product(f_values, evaluate_phi(dist, key).values);
}

GramSystem build_system(const EmpiricalDistribution& dist,
                        std::span<const double> f_values,
                        std::span<const IndexKey> keys) {
  return assemble(dist, f_values, keys, true);
}

GramSystem build_system_serial(const EmpiricalDistribution& dist,
                               std::span<const double> f_values,
                               std::span<const IndexKey> keys) {
  return assemble(dist, f_values, keys, false);
}

CoefficientVector solve_coefficients(const GramSystem& system,
                                     double tolerance) {
  const auto m = static_cast<Eigen::Index>(system.size());
  Eigen::Map<const Eigen::MatrixXd> gamma(system.gram.data(), m, m);
  Eigen::Map<const Eigen::VectorXd> mu(system.mean.data(), m);
  const double mu_norm = mu.norm();

  Eigen::VectorXd c = gamma.ldlt().solve(mu);
  double residual = (gamma * c - mu).norm();
  if (!c.allFinite() || residual > tolerance * std::max(mu_norm, 1e-300)) {
    // Singular or ill-conditioned Gamma: minimum-norm least squares.
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(gamma);
    c = cod.solve(mu);
    residual = (gamma * c - mu).norm();
    if (!c.allFinite() || residual > tolerance * std::max(mu_norm, 1e-300)) {
      throw NumericalError("Gram solve residual " + std::to_string(residual) +
                           " exceeds tolerance");
    }
  }
  CoefficientVector out;
  out.keys = system.keys;
  out.values.assign(c.data(), c.data() + m);
  return out;
}

CoefficientVector fit_least_squares(const EmpiricalDistribution& dist,
                                    std::span<const double> f_values,
                                    std::span<const IndexKey> keys) {
  if (f_values.size() != dist.size()) {
    throw DataError("f_values length does not match support size");
  }
  check_distinct(keys);
  const auto r = static_cast<Eigen::Index>(dist.size());
  const auto m = static_cast<Eigen::Index>(keys.size());

  std::vector<BasisColumn> columns = evaluate_phi_batch(dist, keys);
  Eigen::MatrixXd design(r, m);
  Eigen::VectorXd rhs(r);
  for (Eigen::Index k = 0; k < r; ++k) {
    const double s = std::sqrt(dist.weight(static_cast<std::size_t>(k)));
    rhs(k) = s * f_values[static_cast<std::size_t>(k)];
    for (Eigen::Index j = 0; j < m; ++j) {
      design(k, j) = s * columns[static_cast<std::size_t>(j)]
                             .values[static_cast<std::size_t>(k)];
    }
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
  Eigen::VectorXd c = cod.solve(rhs);
  if (!c.allFinite()) {
    throw NumericalError("weighted least-squares solve produced non-finite "
                         "coefficients");
  }
  CoefficientVector out;
  out.keys.assign(keys.begin(), keys.end());
  out.values.assign(c.data(), c.data() + m);
  return out;
}

}  // namespace fanova
