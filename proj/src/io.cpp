#include "fanova/io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace fanova {

namespace {

constexpr int kFormatVersion = 1;

std::vector<std::string> split_line(const std::string& line, char delimiter) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, delimiter)) {
    // trim surrounding whitespace and a trailing CR from DOS line endings
    const auto first = field.find_first_not_of(" \t\r");
    const auto last = field.find_last_not_of(" \t\r");
    fields.push_back(first == std::string::npos
                         ? std::string{}
                         : field.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == delimiter) fields.emplace_back();
  return fields;
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%a", value);
  return buffer;
}

double parse_double(const std::string& text) {
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0') {
    throw DataError("cannot parse number: '" + text + "'");
  }
  return value;
}

HyperGrid CategoryCodebook::grid() const {
  HyperGrid grid;
  for (const auto& l : labels) {
    grid.cardinalities.push_back(static_cast<int>(l.size()));
  }
  return grid;
}

int CategoryCodebook::encode(int feature, const std::string& label) const {
  const auto& l = labels[feature];
  auto it = std::lower_bound(l.begin(), l.end(), label);
  if (it == l.end() || *it != label) {
    throw OutOfSupportError("unknown label '" + label + "' for feature '" +
                            feature_names[feature] + "'");
  }
  return static_cast<int>(it - l.begin());
}

const std::string& CategoryCodebook::decode(int feature, int code) const {
  return labels[feature][static_cast<std::size_t>(code)];
}

Dataset load_dataset(const std::string& path, const std::string& target_column,
                     const std::string& weight_column, char delimiter) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  const std::vector<std::string> header = split_line(line, delimiter);

  int target_index = -1;
  int weight_index = -1;
  std::vector<int> feature_columns;
  std::vector<std::string> feature_names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == target_column) {
      target_index = static_cast<int>(c);
    } else if (!weight_column.empty() && header[c] == weight_column) {
      weight_index = static_cast<int>(c);
    } else {
      feature_columns.push_back(static_cast<int>(c));
      feature_names.push_back(header[c]);
    }
  }
  if (target_index < 0) {
    throw DataError(path + ": target column '" + target_column + "' not found");
  }
  if (!weight_column.empty() && weight_index < 0) {
    throw DataError(path + ": weight column '" + weight_column + "' not found");
  }
  if (feature_columns.empty()) {
    throw DataError(path + ": no feature columns");
  }

  std::vector<std::vector<std::string>> raw_rows;
  std::vector<double> target;
  std::vector<double> weights;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_line(line, delimiter);
    if (fields.size() != header.size()) {
      throw DataError(path + ":" + std::to_string(line_number) +
                      ": expected " + std::to_string(header.size()) +
                      " fields, got " + std::to_string(fields.size()));
    }
    try {
      target.push_back(parse_double(fields[target_index]));
      if (weight_index >= 0) {
        weights.push_back(parse_double(fields[weight_index]));
      }
    } catch (const DataError& e) {
      throw DataError(path + ":" + std::to_string(line_number) + ": " +
                      e.what());
    }
    std::vector<std::string> row;
    row.reserve(feature_columns.size());
    for (int c : feature_columns) row.push_back(fields[c]);
    raw_rows.push_back(std::move(row));
  }
  if (raw_rows.empty()) throw DataError(path + ": no data rows");

  Dataset dataset;
  dataset.codebook.feature_names = feature_names;
  dataset.codebook.labels.resize(feature_names.size());
  for (std::size_t i = 0; i < feature_names.size(); ++i) {
    std::set<std::string> seen;
    for (const auto& row : raw_rows) seen.insert(row[i]);
    dataset.codebook.labels[i].assign(seen.begin(), seen.end());
  }

  dataset.rows.reserve(raw_rows.size());
  for (const auto& raw : raw_rows) {
    Row row(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
      row[i] = dataset.codebook.encode(static_cast<int>(i), raw[i]);
    }
    dataset.rows.push_back(std::move(row));
  }
  dataset.target = std::move(target);
  dataset.sample_weights = std::move(weights);
  return dataset;
}

QueryBatch load_queries(const std::string& path,
                        const CategoryCodebook& codebook, char delimiter) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  const std::vector<std::string> header = split_line(line, delimiter);

  std::vector<int> column_of_feature(codebook.feature_names.size(), -1);
  for (std::size_t c = 0; c < header.size(); ++c) {
    for (std::size_t i = 0; i < codebook.feature_names.size(); ++i) {
      if (header[c] == codebook.feature_names[i]) {
        column_of_feature[i] = static_cast<int>(c);
      }
    }
  }
  for (std::size_t i = 0; i < column_of_feature.size(); ++i) {
    if (column_of_feature[i] < 0) {
      throw DataError(path + ": missing feature column '" +
                      codebook.feature_names[i] + "'");
    }
  }

  QueryBatch batch;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_line(line, delimiter);
    if (fields.size() != header.size()) {
      throw DataError(path + ":" + std::to_string(line_number) +
                      ": field count mismatch");
    }
    std::vector<std::string> row(codebook.feature_names.size());
    for (std::size_t i = 0; i < row.size(); ++i) {
      row[i] = fields[column_of_feature[i]];
    }
    batch.raw_rows.push_back(std::move(row));
  }
  return batch;
}

void save_decomposition(const std::string& path, const Decomposition& dec,
                        const CategoryCodebook& codebook) {
  nlohmann::ordered_json doc;
  doc["format"] = "fanova-decomposition";
  doc["version"] = kFormatVersion;
  doc["grid"] = dec.dist->grid().cardinalities;
  doc["features"] = codebook.feature_names;
  doc["codebook"] = codebook.labels;

  nlohmann::ordered_json support = nlohmann::json::array();
  nlohmann::ordered_json weights = nlohmann::json::array();
  for (std::size_t k = 0; k < dec.dist->size(); ++k) {
    support.push_back(dec.dist->row(k));
    weights.push_back(format_double(dec.dist->weight(k)));
  }
  doc["support"] = std::move(support);
  doc["weights"] = std::move(weights);

  nlohmann::ordered_json keys = nlohmann::json::array();
  for (std::size_t j = 0; j < dec.keys.size(); ++j) {
    nlohmann::ordered_json entry;
    entry["subset"] = dec.keys[j].features;
    entry["z"] = dec.keys[j].categories;
    entry["coefficient"] = format_double(dec.coefficients[j]);
    keys.push_back(std::move(entry));
  }
  doc["keys"] = std::move(keys);

  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << doc.dump(2) << "\n";
}

LoadedDecomposition load_decomposition(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": invalid JSON: " + e.what());
  }
  try {
    if (doc.at("format") != "fanova-decomposition") {
      throw DataError(path + ": not a decomposition file");
    }
    if (doc.at("version").get<int>() != kFormatVersion) {
      throw DataError(path + ": unsupported format version");
    }

    LoadedDecomposition out;
    out.codebook.feature_names =
        doc.at("features").get<std::vector<std::string>>();
    out.codebook.labels =
        doc.at("codebook").get<std::vector<std::vector<std::string>>>();

    HyperGrid grid;
    grid.cardinalities = doc.at("grid").get<std::vector<int>>();

    std::vector<Row> support;
    for (const auto& row : doc.at("support")) {
      support.push_back(row.get<Row>());
    }
    std::vector<double> weights;
    for (const auto& w : doc.at("weights")) {
      weights.push_back(parse_double(w.get<std::string>()));
    }
    auto dist = std::make_shared<EmpiricalDistribution>(
        EmpiricalDistribution::from_support(std::move(support),
                                            std::move(weights), grid));

    std::vector<IndexKey> keys;
    std::vector<double> coefficients;
    for (const auto& entry : doc.at("keys")) {
      IndexKey key;
      key.features = entry.at("subset").get<Subset>();
      key.categories = entry.at("z").get<Row>();
      keys.push_back(std::move(key));
      coefficients.push_back(
          parse_double(entry.at("coefficient").get<std::string>()));
    }
    out.decomposition = assemble_decomposition(
        std::move(dist), std::move(keys), std::move(coefficients));
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": malformed decomposition file: " + e.what());
  }
}

std::vector<std::vector<int>> load_adjacency(const std::string& path,
                                             const CategoryCodebook& codebook) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);

  std::map<std::string, int> index;
  for (int i = 0; i < codebook.dimension(); ++i) {
    index[codebook.feature_names[i]] = i;
  }

  std::vector<std::vector<int>> adjacency(codebook.dimension());
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line[0] == '#') continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) {
      throw DataError(path + ":" + std::to_string(line_number) +
                      ": expected 'feature: neighbors'");
    }
    auto lookup = [&](std::string name) {
      const auto first = name.find_first_not_of(" \t\r");
      const auto last = name.find_last_not_of(" \t\r");
      if (first == std::string::npos) {
        throw DataError(path + ":" + std::to_string(line_number) +
                        ": empty feature name");
      }
      name = name.substr(first, last - first + 1);
      auto it = index.find(name);
      if (it == index.end()) {
        throw DataError(path + ":" + std::to_string(line_number) +
                        ": unknown feature '" + name + "'");
      }
      return it->second;
    };
    const int feature = lookup(line.substr(0, colon));
    for (const std::string& n :
         split_line(line.substr(colon + 1), ',')) {
      if (n.empty()) continue;
      adjacency[feature].push_back(lookup(n));
    }
  }
  return adjacency;
}

}  // namespace fanova
