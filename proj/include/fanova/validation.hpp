#pragma once

#include <memory>
#include <random>

#include "fanova/oracle.hpp"

namespace fanova {

/// Seeded instance generators shared by the validate command and the
/// acceptance suite.
namespace gen {

/// Product distribution over a full grid: d features, cardinalities in
/// [2, max_categories], resampled until the grid size fits max_grid.
std::shared_ptr<EmpiricalDistribution> random_product_distribution(
    std::mt19937_64& rng, int max_dim, int max_categories,
    std::size_t max_grid);

/// Sparse dependent support: a random fraction (coverage in [min_coverage,
/// 1]) of a random grid, with weights bounded away from zero.
std::shared_ptr<EmpiricalDistribution> random_sparse_distribution(
    std::mt19937_64& rng, int max_dim, int max_categories,
    std::size_t max_grid, double min_coverage);

/// Dependent distribution covering the full grid: every cell present with a
/// random joint weight (generally not a product of its marginals).
std::shared_ptr<EmpiricalDistribution> random_full_grid_distribution(
    std::mt19937_64& rng, int max_dim, int max_categories,
    std::size_t max_grid);

/// Uniform full Boolean cube {0,1}^d.
std::shared_ptr<EmpiricalDistribution> boolean_cube(int d);

/// Values in [-1, 1], one per support row.
std::vector<double> random_values(std::mt19937_64& rng, std::size_t r);

}  // namespace gen

struct ValidationConfig {
  std::uint64_t seed = 1;
  int instances = 5;
  int max_dim = 5;
  int max_categories = 4;
  std::size_t max_grid = 256;
  // Test hook: perturb one pipeline coefficient so every check must fail.
  bool inject_corruption = false;
};

/// Run the Mobius, Walsh, orthogonality, and rank cross-checks on generated
/// instances. Deterministic for a fixed config.
std::vector<oracle::OracleReport> run_validation(const ValidationConfig& config);

}  // namespace fanova
