#pragma once

#include <map>

#include "fanova/distribution.hpp"

namespace fanova {
// Brute-force references used to validate the main pipeline on small
// instances. Deliberately naive: explicit enumeration, no shared numerics
// with the pipeline beyond the distribution type.
namespace oracle {

struct OracleReport {
  std::string name;
  double max_abs_deviation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::vector<std::string> details;
};

/// Independent-case ANOVA via the Mobius transform of conditional
/// expectations. Requires an exact product distribution on a full grid
/// (verified within 1e-12). Returns every subset's component as an r-vector;
/// the empty subset holds the constant mean.
std::map<Subset, std::vector<double>> mobius_anova(
    const EmpiricalDistribution& dist, std::span<const double> f_values);

/// Standard Boolean Fourier coefficients f_hat(A) = E[f * chi_A] on the
/// uniform cube {0,1}^d, d <= 16.
std::map<Subset, double> walsh_transform(const EmpiricalDistribution& dist,
                                         std::span<const double> f_values);

/// Parity chi_A(x) = (-1)^{sum_{i in A} x_i} evaluated on the support rows.
std::vector<double> parity_column(const EmpiricalDistribution& dist,
                                  const Subset& a);

/// Full-strength hierarchical orthogonality check: for every pair B strictly
/// inside A among (and below) the given component subsets, test f_A against
/// every indicator function of x_B, and report the maximum inner product.
OracleReport check_hierarchical_orthogonality(
    const EmpiricalDistribution& dist,
    const std::map<Subset, std::vector<double>>& components, double tol);

/// Numerical rank of the full evaluation matrix with |A| <= max_order.
/// Guarded to at most 4096 columns.
std::size_t exhaustive_basis_rank(const EmpiricalDistribution& dist,
                                  int max_order);

}  // namespace oracle
}  // namespace fanova
