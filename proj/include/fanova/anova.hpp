#pragma once

#include <map>
#include <memory>

#include "fanova/gram.hpp"
#include "fanova/selection.hpp"

namespace fanova {

/// A fitted functional ANOVA decomposition: selected keys, coefficients, and
/// per-subset components materialized on the support. Immutable once built;
/// attribution queries reduce to row lookups.
struct Decomposition {
  std::shared_ptr<const EmpiricalDistribution> dist;
  std::vector<IndexKey> keys;
  std::vector<double> coefficients;
  double intercept = 0.0;
  // Non-empty subsets A -> r-vector f_A; deterministic iteration order.
  std::map<Subset, std::vector<double>> components;
  std::vector<double> fitted;  // intercept + sum of components, per row
  SelectedBasis selection;
};

struct AttributionVector {
  Row query;
  std::vector<double> shap;  // one entry per feature
  double baseline = 0.0;     // the intercept
  double fitted = 0.0;
};

struct DiagnosticsReport {
  double r_squared = 0.0;
  double mse = 0.0;
  double relative_mse = 0.0;
  bool r_squared_defined = true;  // false when Var(f) = 0 and mse > 0
  std::map<Subset, double> component_norms;  // squared L2 norms, incl. {}
  double orthogonality_metric = 0.0;
  std::size_t achieved_rank = 0;
  double wall_time_seconds = 0.0;
};

/// Run greedy selection, fit coefficients by weighted least squares, and
/// group them into components.
Decomposition decompose(std::shared_ptr<const EmpiricalDistribution> dist,
                        std::span<const double> f_values,
                        const SelectionConfig& config);

/// Rebuild a decomposition from stored keys and coefficients (e.g. loaded
/// from a decomposition file).
Decomposition assemble_decomposition(
    std::shared_ptr<const EmpiricalDistribution> dist,
    std::vector<IndexKey> keys, std::vector<double> coefficients);

/// ||f_A||^2 per subset; the intercept contributes f_{}^2.
std::map<Subset, double> component_norms(const Decomposition& dec);

/// Per-sample Shapley attribution: shap_i = sum_{A containing i} f_A(x)/|A|.
/// The query must be a support row.
AttributionVector shapley(const Decomposition& dec, const Row& x);

/// ||f_i||_1 = sum over categories |f_i(c)| p_i(c); 0 for features without a
/// main-effect component.
double global_importance(const Decomposition& dec, int feature);
std::vector<double> global_importances(const Decomposition& dec);

/// Reconstruction and orthogonality diagnostics against the original values.
DiagnosticsReport metrics(const Decomposition& dec,
                          std::span<const double> f_values);

}  // namespace fanova
