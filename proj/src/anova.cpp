#include "fanova/anova.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace fanova {

namespace {

Decomposition build_from_coefficients(
    std::shared_ptr<const EmpiricalDistribution> dist,
    std::vector<IndexKey> keys, std::vector<double> coefficients,
    SelectedBasis selection) {
  const EmpiricalDistribution& d = *dist;
  const std::size_t r = d.size();

  Decomposition dec;
  dec.dist = std::move(dist);
  dec.keys = std::move(keys);
  dec.coefficients = std::move(coefficients);
  dec.selection = std::move(selection);
  dec.fitted.assign(r, 0.0);

  std::vector<BasisColumn> columns = evaluate_phi_batch(d, dec.keys);
  for (std::size_t j = 0; j < dec.keys.size(); ++j) {
    const double c = dec.coefficients[j];
    if (dec.keys[j].is_empty()) {
      dec.intercept += c;
      continue;
    }
    auto it = dec.components
                  .try_emplace(dec.keys[j].features,
                               std::vector<double>(r, 0.0))
                  .first;
    std::vector<double>& comp = it->second;
    for (std::size_t k = 0; k < r; ++k) comp[k] += c * columns[j].values[k];
  }
  for (std::size_t k = 0; k < r; ++k) dec.fitted[k] = dec.intercept;
  for (const auto& [subset, comp] : dec.components) {
    for (std::size_t k = 0; k < r; ++k) dec.fitted[k] += comp[k];
  }
  return dec;
}

}  // namespace

Decomposition decompose(std::shared_ptr<const EmpiricalDistribution> dist,
                        std::span<const double> f_values,
                        const SelectionConfig& config) {
  if (!dist) throw DataError("null distribution");
  if (f_values.size() != dist->size()) {
    throw DataError("f_values length does not match support size");
  }
  SelectedBasis selection = greedy_select(*dist, config);
  CoefficientVector coeffs =
      fit_least_squares(*dist, f_values, selection.keys);
  return build_from_coefficients(std::move(dist), std::move(coeffs.keys),
                                 std::move(coeffs.values),
                                 std::move(selection));
}

Decomposition assemble_decomposition(
    std::shared_ptr<const EmpiricalDistribution> dist,
    std::vector<IndexKey> keys, std::vector<double> coefficients) {
  if (!dist) throw DataError("null distribution");
  if (keys.size() != coefficients.size()) {
    throw DataError("key/coefficient length mismatch");
  }
  for (const IndexKey& key : keys) validate_key(dist->grid(), key);
  SelectedBasis selection;
  selection.keys = keys;
  selection.achieved_rank = keys.size();
  return build_from_coefficients(std::move(dist), std::move(keys),
                                 std::move(coefficients),
                                 std::move(selection));
}

std::map<Subset, double> component_norms(const Decomposition& dec) {
  std::map<Subset, double> norms;
  norms[Subset{}] = dec.intercept * dec.intercept;
  for (const auto& [subset, comp] : dec.components) {
    norms[subset] = dec.dist->inner_product(comp, comp);
  }
  return norms;
}

AttributionVector shapley(const Decomposition& dec, const Row& x) {
  const auto k = dec.dist->find_row(x);
  if (!k) {
    throw OutOfSupportError(
        "query row lies outside the empirical support (probability 0)");
  }
  AttributionVector out;
  out.query = x;
  out.baseline = dec.intercept;
  out.fitted = dec.fitted[*k];
  out.shap.assign(dec.dist->dimension(), 0.0);
  for (const auto& [subset, comp] : dec.components) {
    const double share = comp[*k] / static_cast<double>(subset.size());
    for (int i : subset) out.shap[i] += share;
  }
  return out;
}

double global_importance(const Decomposition& dec, int feature) {
  if (feature < 0 || feature >= dec.dist->dimension()) {
    throw DataError("feature out of range");
  }
  auto it = dec.components.find(Subset{feature});
  if (it == dec.components.end()) return 0.0;
  const std::vector<double>& comp = it->second;

  // f_i depends on x_i only: one term per observed category.
  const MarginalTable& pi = dec.dist->marginal(Subset{feature});
  std::vector<char> seen(dec.dist->grid().cardinalities[feature], 0);
  double total = 0.0;
  for (std::size_t k = 0; k < dec.dist->size(); ++k) {
    const int c = dec.dist->row(k)[feature];
    if (seen[c]) continue;
    seen[c] = 1;
    total += std::abs(comp[k]) * pi.at(Row{c});
  }
  return total;
}

std::vector<double> global_importances(const Decomposition& dec) {
  std::vector<double> out(dec.dist->dimension());
  for (int i = 0; i < dec.dist->dimension(); ++i) {
    out[i] = global_importance(dec, i);
  }
  return out;
}

DiagnosticsReport metrics(const Decomposition& dec,
                          std::span<const double> f_values) {
  const auto start = std::chrono::steady_clock::now();
  const EmpiricalDistribution& dist = *dec.dist;
  if (f_values.size() != dist.size()) {
    throw DataError("f_values length does not match support size");
  }

  DiagnosticsReport report;
  report.achieved_rank = dec.selection.achieved_rank;
  report.component_norms = component_norms(dec);

  std::vector<double> residual(dist.size());
  for (std::size_t k = 0; k < dist.size(); ++k) {
    residual[k] = f_values[k] - dec.fitted[k];
  }
  report.mse = dist.inner_product(residual, residual);
  const double second_moment = dist.inner_product(f_values, f_values);
  report.relative_mse =
      (second_moment > 0.0) ? report.mse / second_moment : 0.0;
  const double var = dist.variance(f_values);
  if (var > 0.0) {
    report.r_squared = 1.0 - report.mse / var;
  } else if (report.mse <= 1e-20 * std::max(1.0, second_moment)) {
    // constant f reproduced up to roundoff
    report.r_squared = 1.0;
  } else {
    report.r_squared_defined = false;
    report.r_squared = 0.0;
  }

  // max |<f_A, f_B>| over hierarchical pairs B strictly inside A, including
  // B = {} via the centered-intercept pairing.
  double max_ip = 0.0;
  std::vector<double> ones(dist.size(), 1.0);
  for (auto ia = dec.components.begin(); ia != dec.components.end(); ++ia) {
    max_ip = std::max(
        max_ip, std::abs(dec.intercept *
                         dist.inner_product(ia->second, ones)));
    for (auto ib = dec.components.begin(); ib != dec.components.end(); ++ib) {
      if (ia == ib) continue;
      if (!std::includes(ia->first.begin(), ia->first.end(),
                         ib->first.begin(), ib->first.end())) {
        continue;
      }
      if (ib->first.size() == ia->first.size()) continue;
      max_ip = std::max(
          max_ip, std::abs(dist.inner_product(ia->second, ib->second)));
    }
  }
  report.orthogonality_metric = max_ip;

  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return report;
}

}  // namespace fanova
