#include "fanova/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fanova {
namespace oracle {

namespace {

// All subsets of [d], by cardinality then lexicographically.
std::vector<Subset> all_subsets(int d, int max_order) {
  std::vector<Subset> out;
  std::vector<Subset> frontier{Subset{}};
  out.push_back(Subset{});
  for (int k = 1; k <= max_order; ++k) {
    std::vector<Subset> next;
    for (const Subset& s : frontier) {
      const int lo = s.empty() ? 0 : s.back() + 1;
      for (int i = lo; i < d; ++i) {
        Subset t = s;
        t.push_back(i);
        next.push_back(t);
      }
    }
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

// Naive marginal p_A(x_A) by direct summation.
double naive_marginal(const EmpiricalDistribution& dist, const Subset& a,
                      const Row& x) {
  if (a.empty()) return 1.0;
  double p = 0.0;
  for (std::size_t k = 0; k < dist.size(); ++k) {
    bool match = true;
    for (int i : a) {
      if (dist.row(k)[i] != x[i]) {
        match = false;
        break;
      }
    }
    if (match) p += dist.weight(k);
  }
  return p;
}

void require_product_full_support(const EmpiricalDistribution& dist) {
  const std::uint64_t full = dist.grid().full_size();
  if (dist.size() != full) {
    throw DataError("oracle requires full grid support (r = " +
                    std::to_string(dist.size()) + ", |E| = " +
                    std::to_string(full) + ")");
  }
  for (std::size_t k = 0; k < dist.size(); ++k) {
    double prod = 1.0;
    for (int i = 0; i < dist.dimension(); ++i) {
      prod *= naive_marginal(dist, Subset{i}, dist.row(k));
    }
    if (std::abs(prod - dist.weight(k)) > 1e-12) {
      throw DataError("oracle requires an exact product distribution");
    }
  }
}

}  // namespace

std::map<Subset, std::vector<double>> mobius_anova(
    const EmpiricalDistribution& dist, std::span<const double> f_values) {
  if (f_values.size() != dist.size()) throw DataError("f length mismatch");
  const int d = dist.dimension();
  if (dist.grid().full_size() > 4096) {
    throw DataError("oracle size guard exceeded");
  }
  require_product_full_support(dist);

  const std::vector<Subset> subsets = all_subsets(d, d);

  // conditional expectations E[f | X_B = x_B], one r-vector per subset
  std::map<Subset, std::vector<double>> condexp;
  for (const Subset& b : subsets) {
    std::vector<double> e(dist.size());
    for (std::size_t k = 0; k < dist.size(); ++k) {
      double num = 0.0;
      double den = 0.0;
      for (std::size_t l = 0; l < dist.size(); ++l) {
        bool match = true;
        for (int i : b) {
          if (dist.row(l)[i] != dist.row(k)[i]) {
            match = false;
            break;
          }
        }
        if (match) {
          num += dist.weight(l) * f_values[l];
          den += dist.weight(l);
        }
      }
      e[k] = num / den;
    }
    condexp[b] = std::move(e);
  }

  std::map<Subset, std::vector<double>> components;
  for (const Subset& a : subsets) {
    std::vector<double> comp(dist.size(), 0.0);
    // alternating sum over sub-subsets of a
    const auto na = static_cast<std::uint32_t>(a.size());
    for (std::uint32_t mask = 0; mask < (1u << na); ++mask) {
      Subset b;
      for (std::uint32_t j = 0; j < na; ++j) {
        if (mask & (1u << j)) b.push_back(a[j]);
      }
      const double sign = ((a.size() - b.size()) % 2 == 0) ? 1.0 : -1.0;
      const std::vector<double>& e = condexp[b];
      for (std::size_t k = 0; k < dist.size(); ++k) comp[k] += sign * e[k];
    }
    components[a] = std::move(comp);
  }
  return components;
}

std::vector<double> parity_column(const EmpiricalDistribution& dist,
                                  const Subset& a) {
  std::vector<double> chi(dist.size());
  for (std::size_t k = 0; k < dist.size(); ++k) {
    int sum = 0;
    for (int i : a) sum += dist.row(k)[i];
    chi[k] = (sum % 2 == 0) ? 1.0 : -1.0;
  }
  return chi;
}

std::map<Subset, double> walsh_transform(const EmpiricalDistribution& dist,
                                         std::span<const double> f_values) {
  if (f_values.size() != dist.size()) throw DataError("f length mismatch");
  const int d = dist.dimension();
  if (d > 16) throw DataError("walsh oracle limited to d <= 16");
  for (int n : dist.grid().cardinalities) {
    if (n != 2) throw DataError("walsh oracle requires a Boolean cube");
  }
  if (dist.size() != (std::size_t{1} << d)) {
    throw DataError("walsh oracle requires the full cube as support");
  }
  const double uniform = 1.0 / static_cast<double>(dist.size());
  for (std::size_t k = 0; k < dist.size(); ++k) {
    if (std::abs(dist.weight(k) - uniform) > 1e-12) {
      throw DataError("walsh oracle requires uniform weights");
    }
  }

  std::map<Subset, double> coeffs;
  for (const Subset& a : all_subsets(d, d)) {
    const std::vector<double> chi = parity_column(dist, a);
    double acc = 0.0;
    for (std::size_t k = 0; k < dist.size(); ++k) {
      acc += dist.weight(k) * f_values[k] * chi[k];
    }
    coeffs[a] = acc;
  }
  return coeffs;
}

OracleReport check_hierarchical_orthogonality(
    const EmpiricalDistribution& dist,
    const std::map<Subset, std::vector<double>>& components, double tol) {
  OracleReport report;
  report.name = "hierarchical_orthogonality";
  report.tolerance = tol;

  double worst = 0.0;
  std::string worst_detail = "no hierarchical pairs";
  for (const auto& [a, fa] : components) {
    if (a.empty()) continue;
    const auto na = static_cast<std::uint32_t>(a.size());
    // every strict subset B of A, including the empty set
    for (std::uint32_t mask = 0; mask + 1 < (1u << na); ++mask) {
      Subset b;
      for (std::uint32_t j = 0; j < na; ++j) {
        if (mask & (1u << j)) b.push_back(a[j]);
      }
      // indicator of each observed projection value of x_B
      std::map<Row, double> sums;
      for (std::size_t k = 0; k < dist.size(); ++k) {
        Row proj(b.size());
        for (std::size_t j = 0; j < b.size(); ++j) proj[j] = dist.row(k)[b[j]];
        sums[proj] += dist.weight(k) * fa[k];
      }
      for (const auto& [proj, s] : sums) {
        if (std::abs(s) > worst) {
          worst = std::abs(s);
          std::ostringstream os;
          os << "A=" << subset_to_string(a) << " B=" << subset_to_string(b)
             << " |<f_A, 1{x_B}>| = " << worst;
          worst_detail = os.str();
        }
      }
      // the fitted component f_B itself, when present
      auto it = components.find(b);
      if (it != components.end()) {
        double ip = 0.0;
        for (std::size_t k = 0; k < dist.size(); ++k) {
          ip += dist.weight(k) * fa[k] * it->second[k];
        }
        if (std::abs(ip) > worst) {
          worst = std::abs(ip);
          std::ostringstream os;
          os << "A=" << subset_to_string(a) << " B=" << subset_to_string(b)
             << " |<f_A, f_B>| = " << worst;
          worst_detail = os.str();
        }
      }
    }
  }
  report.max_abs_deviation = worst;
  report.pass = worst <= tol;
  report.details.push_back(worst_detail);
  return report;
}

std::size_t exhaustive_basis_rank(const EmpiricalDistribution& dist,
                                  int max_order) {
  const int d = dist.dimension();
  if (max_order < 0 || max_order > d) throw DataError("bad max_order");

  // materialize every column phi_A^(z) with |A| <= max_order
  std::vector<std::vector<double>> columns;
  for (const Subset& a : all_subsets(d, max_order)) {
    // odometer over the truncated grid of a
    std::vector<int> limits(a.size());
    bool empty_grid = false;
    for (std::size_t j = 0; j < a.size(); ++j) {
      limits[j] = dist.grid().cardinalities[a[j]] - 1;
      if (limits[j] == 0) empty_grid = true;
    }
    if (empty_grid) continue;
    Row z(a.size(), 0);
    for (;;) {
      std::vector<double> col(dist.size());
      for (std::size_t k = 0; k < dist.size(); ++k) {
        double v = 1.0;
        for (std::size_t j = 0; j < a.size(); ++j) {
          const int xi = dist.row(k)[a[j]];
          if (xi == z[j]) {
            // factor +1
          } else if (xi == dist.grid().cardinalities[a[j]] - 1) {
            v = -v;
          } else {
            v = 0.0;
            break;
          }
        }
        col[k] = (v == 0.0) ? 0.0
                            : v / naive_marginal(dist, a, dist.row(k));
      }
      columns.push_back(std::move(col));
      if (columns.size() > 4096) throw DataError("oracle size guard exceeded");
      int j = static_cast<int>(z.size()) - 1;
      while (j >= 0 && z[j] + 1 >= limits[j]) --j;
      if (j < 0) break;
      ++z[j];
      std::fill(z.begin() + j + 1, z.end(), 0);
    }
  }

  // modified Gram-Schmidt rank under the weighted inner product
  auto dot = [&](const std::vector<double>& u, const std::vector<double>& v) {
    double acc = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
      acc += u[k] * v[k] * dist.weight(k);
    }
    return acc;
  };
  std::vector<std::vector<double>> ortho;
  for (std::vector<double>& col : columns) {
    const double norm0 = std::sqrt(dot(col, col));
    if (norm0 == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      for (const std::vector<double>& q : ortho) {
        const double c = dot(q, col);
        for (std::size_t k = 0; k < col.size(); ++k) col[k] -= c * q[k];
      }
    }
    const double norm1 = std::sqrt(dot(col, col));
    if (norm1 > 1e-9 * norm0) {
      for (double& v : col) v /= norm1;
      ortho.push_back(std::move(col));
    }
  }
  return ortho.size();
}

}  // namespace oracle
}  // namespace fanova
