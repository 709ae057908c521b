#pragma once

#include <iosfwd>

#include "fanova/anova.hpp"

namespace fanova {

/// Per-feature bijection between raw labels and dense category codes
/// 0..N_i-1. Codes follow the lexicographic order of the observed labels, so
/// ingestion is deterministic.
struct CategoryCodebook {
  std::vector<std::string> feature_names;
  std::vector<std::vector<std::string>> labels;  // labels[i][code]

  int dimension() const { return static_cast<int>(feature_names.size()); }
  HyperGrid grid() const;

  /// Throws OutOfSupportError for a label never seen during ingestion.
  int encode(int feature, const std::string& label) const;
  const std::string& decode(int feature, int code) const;
};

/// A parsed dataset: encoded rows plus the numeric target column.
struct Dataset {
  CategoryCodebook codebook;
  std::vector<Row> rows;
  std::vector<double> target;
  std::vector<double> sample_weights;  // empty unless a weight column is given
};

/// Read a delimited text file with a header row. Every column except the
/// target (and the optional weight column) is treated as categorical.
/// Parse failures are reported with 1-based line numbers.
Dataset load_dataset(const std::string& path, const std::string& target_column,
                     const std::string& weight_column = "",
                     char delimiter = ',');

/// Read query rows: feature columns matched by name against the codebook;
/// extra columns are ignored.
struct QueryBatch {
  std::vector<std::vector<std::string>> raw_rows;  // aligned to codebook order
  std::size_t line_offset = 2;                     // first data line number
};
QueryBatch load_queries(const std::string& path,
                        const CategoryCodebook& codebook, char delimiter = ',');

/// Self-contained decomposition file: codebook, grid, support digest,
/// selected keys and coefficients. Coefficients and weights are serialized as
/// hex-floats so a round trip is bit-exact.
void save_decomposition(const std::string& path, const Decomposition& dec,
                        const CategoryCodebook& codebook);

struct LoadedDecomposition {
  Decomposition decomposition;
  CategoryCodebook codebook;
};
LoadedDecomposition load_decomposition(const std::string& path);

/// Adjacency file for the Neighborhood ordering: one line per feature,
/// "name: neighbor1,neighbor2,...".
std::vector<std::vector<int>> load_adjacency(const std::string& path,
                                             const CategoryCodebook& codebook);

std::string format_double(double value);  // full-precision hex-float
double parse_double(const std::string& text);

}  // namespace fanova
