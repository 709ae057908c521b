#pragma once

#include "fanova/basis.hpp"

namespace fanova {

/// The linear system Gamma c = mu restricted to an ordered key set.
/// Gamma is symmetric positive semi-definite; strictly positive definite when
/// the key columns are linearly independent over the support.
struct GramSystem {
  std::vector<IndexKey> keys;
  std::vector<double> gram;  // m x m, row-major
  std::vector<double> mean;  // m

  std::size_t size() const { return keys.size(); }
  double entry(std::size_t i, std::size_t j) const {
    return gram[i * keys.size() + j];
  }
};

/// Fourier coefficients aligned with an ordered key set.
struct CoefficientVector {
  std::vector<IndexKey> keys;
  std::vector<double> values;
};

/// gamma entry: <phi_a, phi_b> under the distribution's inner product.
double gram_entry(const EmpiricalDistribution& dist, const IndexKey& key_a,
                  const IndexKey& key_b);

/// mu entry: <f, phi_key>.
double mean_coefficient(const EmpiricalDistribution& dist,
                        std::span<const double> f_values, const IndexKey& key);

/// Assemble Gamma and mu for the given keys; entries computed in parallel.
GramSystem build_system(const EmpiricalDistribution& dist,
                        std::span<const double> f_values,
                        std::span<const IndexKey> keys);

/// Serial reference for the assembly kernel.
GramSystem build_system_serial(const EmpiricalDistribution& dist,
                               std::span<const double> f_values,
                               std::span<const IndexKey> keys);

/// Solve Gamma c = mu. Pivoted LDLT first; on failure or excess residual,
/// falls back to the minimum-norm least-squares solution. Throws
/// NumericalError when even the fallback leaves ||Gamma c - mu|| above
/// tolerance * ||mu||.
CoefficientVector solve_coefficients(const GramSystem& system,
                                     double tolerance = 1e-9);

/// Weighted least-squares fit through an orthogonal factorization of the
/// sqrt(w)-scaled design matrix. Algebraically this solves the same normal
/// equations Gamma c = mu, but avoids squaring the 1/p_A factors carried by
/// rare categories. Returns the minimum-norm solution when columns are
/// dependent.
CoefficientVector fit_least_squares(const EmpiricalDistribution& dist,
                                    std::span<const double> f_values,
                                    std::span<const IndexKey> keys);

}  // namespace fanova
