#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>

#include <CLI11.hpp>
#include <json.hpp>

#include "fanova/io.hpp"
#include "fanova/validation.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace fanova;

// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure,
// 4 validation failure.
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitValidation = 4;

std::string subset_names(const Subset& subset,
                         const CategoryCodebook& codebook) {
  if (subset.empty()) return "{}";
  std::string out = "{";
  for (std::size_t j = 0; j < subset.size(); ++j) {
    if (j) out += ",";
    out += codebook.feature_names[subset[j]];
  }
  return out + "}";
}

struct DecomposeOptions {
  std::string input;
  std::string target;
  std::string weight_column;
  std::string output_dir = ".";
  std::string ordering = "canonical";
  std::string adjacency_file;
  std::string format = "structured-report";
  char delimiter = ',';
  int max_order = -1;
  std::size_t rank_budget = 0;  // 0: full rank
  double rank_tolerance = 1e-9;
  bool prune = false;
  double prune_threshold = 0.01;
};

int cmd_decompose(const DecomposeOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  Dataset dataset =
      load_dataset(opt.input, opt.target, opt.weight_column, opt.delimiter);

  auto dist = std::make_shared<EmpiricalDistribution>(
      EmpiricalDistribution::from_dataset(
          dataset.rows, dataset.codebook.grid(), dataset.sample_weights));

  // Per distinct row, the target is the weighted mean of its observations.
  std::vector<double> f_values(dist->size(), 0.0);
  {
    std::vector<double> mass(dist->size(), 0.0);
    for (std::size_t n = 0; n < dataset.rows.size(); ++n) {
      const double w = dataset.sample_weights.empty()
                           ? 1.0
                           : dataset.sample_weights[n];
      const std::size_t k = *dist->find_row(dataset.rows[n]);
      mass[k] += w;
      f_values[k] += w * dataset.target[n];
    }
    for (std::size_t k = 0; k < dist->size(); ++k) f_values[k] /= mass[k];
  }

  SelectionConfig config;
  config.max_order = opt.max_order;
  if (opt.rank_budget > 0) config.rank_budget = opt.rank_budget;
  config.rank_tolerance = opt.rank_tolerance;
  config.prune_inactive = opt.prune;
  config.prune_threshold = opt.prune_threshold;
  if (opt.ordering == "canonical") {
    config.ordering = OrderingStrategy::canonical();
  } else if (opt.ordering == "variance") {
    config.ordering = OrderingStrategy::variance_ranked(*dist, f_values);
  } else if (opt.ordering == "neighborhood") {
    if (opt.adjacency_file.empty()) {
      std::cerr << "error: --ordering neighborhood requires --adjacency\n";
      return kExitUsage;
    }
    config.ordering = OrderingStrategy::neighborhood(
        load_adjacency(opt.adjacency_file, dataset.codebook));
  } else {
    std::cerr << "error: unknown ordering '" << opt.ordering << "'\n";
    return kExitUsage;
  }

  Decomposition dec = decompose(dist, f_values, config);
  DiagnosticsReport report = metrics(dec, f_values);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  std::filesystem::create_directories(opt.output_dir);
  const std::filesystem::path dir(opt.output_dir);

  save_decomposition((dir / "decomposition.json").string(), dec,
                     dataset.codebook);

  // norms sorted by decreasing energy
  std::vector<std::pair<Subset, double>> norms(
      report.component_norms.begin(), report.component_norms.end());
  std::stable_sort(norms.begin(), norms.end(),
                   [](const auto& a, const auto& b) {
                     return a.second > b.second;
                   });
  {
    std::ofstream out(dir / "norms.tsv");
    out << "order\tsubset\tnorm_sq\n";
    for (const auto& [subset, norm] : norms) {
      out << subset.size() << "\t" << subset_names(subset, dataset.codebook)
          << "\t" << norm << "\n";
    }
  }

  if (opt.format == "tabular") {
    std::ofstream out(dir / "diagnostics.tsv");
    out << "metric\tvalue\n";
    out << "r_squared\t" << report.r_squared << "\n";
    out << "mse\t" << report.mse << "\n";
    out << "relative_mse\t" << report.relative_mse << "\n";
    out << "orthogonality\t" << report.orthogonality_metric << "\n";
    out << "achieved_rank\t" << report.achieved_rank << "\n";
    out << "support_size\t" << dist->size() << "\n";
    out << "scanned_candidates\t" << dec.selection.scanned << "\n";
  } else {
    nlohmann::ordered_json diag;
    diag["r_squared"] = report.r_squared;
    diag["mse"] = report.mse;
    diag["relative_mse"] = report.relative_mse;
    diag["orthogonality_metric"] = report.orthogonality_metric;
    diag["achieved_rank"] = report.achieved_rank;
    diag["support_size"] = dist->size();
    diag["scanned_candidates"] = dec.selection.scanned;
    nlohmann::ordered_json jnorms = nlohmann::json::array();
    for (const auto& [subset, norm] : norms) {
      jnorms.push_back({{"subset", subset_names(subset, dataset.codebook)},
                        {"norm_sq", norm}});
    }
    diag["component_norms"] = std::move(jnorms);
    std::ofstream out(dir / "diagnostics.json");
    out << diag.dump(2) << "\n";
  }

  // timings kept out of the data payloads so those stay byte-stable
  {
    std::ofstream out(dir / "timings.txt");
    out << "total_seconds\t" << elapsed << "\n";
  }

  std::cerr << "decomposed " << opt.input << ": r = " << dist->size()
            << ", rank = " << report.achieved_rank
            << ", R^2 = " << report.r_squared << ", MSE = " << report.mse
            << " (" << elapsed << " s)\n";
  return 0;
}

int cmd_explain(const std::string& model_path, const std::string& query_path,
                const std::string& output_path, char delimiter) {
  LoadedDecomposition loaded = load_decomposition(model_path);
  const Decomposition& dec = loaded.decomposition;
  const CategoryCodebook& codebook = loaded.codebook;

  QueryBatch batch = load_queries(query_path, codebook, delimiter);

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!output_path.empty()) {
    file.open(output_path);
    if (!file) throw DataError("cannot write " + output_path);
    out = &file;
  }

  *out << "row\tstatus";
  for (const auto& name : codebook.feature_names) *out << "\tshap_" << name;
  *out << "\tbaseline\tfitted\treconstruction_check\n";

  for (std::size_t n = 0; n < batch.raw_rows.size(); ++n) {
    *out << (n + 1) << "\t";
    try {
      Row row(codebook.dimension());
      for (int i = 0; i < codebook.dimension(); ++i) {
        row[i] = codebook.encode(i, batch.raw_rows[n][i]);
      }
      AttributionVector attr = shapley(dec, row);
      const double total =
          attr.baseline +
          std::accumulate(attr.shap.begin(), attr.shap.end(), 0.0);
      *out << "ok";
      for (double s : attr.shap) *out << "\t" << format_double(s);
      *out << "\t" << format_double(attr.baseline) << "\t"
           << format_double(attr.fitted) << "\t"
           << format_double(total - attr.fitted) << "\n";
    } catch (const OutOfSupportError& e) {
      // report this row, keep processing the rest
      *out << "error: " << e.what();
      for (int i = 0; i < codebook.dimension() + 3; ++i) *out << "\t";
      *out << "\n";
    }
  }
  return 0;
}

int cmd_importance(const std::string& model_path,
                   const std::string& output_path) {
  LoadedDecomposition loaded = load_decomposition(model_path);
  const std::vector<double> importances =
      global_importances(loaded.decomposition);

  std::vector<int> order(importances.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return importances[a] > importances[b];
  });

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!output_path.empty()) {
    file.open(output_path);
    if (!file) throw DataError("cannot write " + output_path);
    out = &file;
  }
  *out << "feature\timportance_l1\n";
  for (int i : order) {
    *out << loaded.codebook.feature_names[i] << "\t" << importances[i] << "\n";
  }
  return 0;
}

int cmd_validate(const ValidationConfig& config) {
  const std::vector<oracle::OracleReport> reports = run_validation(config);
  bool ok = true;
  for (const auto& report : reports) {
    std::cout << (report.pass ? "[PASS] " : "[FAIL] ") << report.name
              << ": max_abs_deviation = " << report.max_abs_deviation
              << " (tolerance " << report.tolerance << ")\n";
    for (const auto& d : report.details) std::cout << "       " << d << "\n";
    ok = ok && report.pass;
  }
  return ok ? 0 : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
#ifdef _OPENMP
  if (const char* threads = std::getenv("FANOVA_THREADS")) {
    const int n = std::atoi(threads);
    if (n > 0) omp_set_num_threads(n);
  }
#endif

  CLI::App app{
      "Exact functional ANOVA decomposition and Shapley attribution for "
      "categorical tabular data"};
  app.require_subcommand(1);

  DecomposeOptions dopt;
  CLI::App* dec = app.add_subcommand(
      "decompose", "Fit a decomposition from a delimited dataset");
  dec->add_option("-i,--input", dopt.input, "input file (header row required)")
      ->required();
  dec->add_option("-t,--target", dopt.target,
                  "name of the numeric target column")
      ->required();
  dec->add_option("--weight-column", dopt.weight_column,
                  "optional sample weight column");
  dec->add_option("-o,--output-dir", dopt.output_dir, "output directory");
  dec->add_option("--max-order", dopt.max_order,
                  "maximum interaction order (-1: unlimited)");
  dec->add_option("--rank-budget", dopt.rank_budget,
                  "basis size budget (0: full rank)");
  dec->add_option("--rank-tolerance", dopt.rank_tolerance,
                  "relative rank test tolerance");
  dec->add_option("--ordering", dopt.ordering,
                  "canonical | variance | neighborhood");
  dec->add_option("--adjacency", dopt.adjacency_file,
                  "adjacency file for the neighborhood ordering");
  dec->add_flag("--prune-inactive", dopt.prune,
                "skip near-degenerate features");
  dec->add_option("--prune-threshold", dopt.prune_threshold,
                  "degeneracy threshold for pruning");
  dec->add_option("--format", dopt.format, "structured-report | tabular");
  dec->add_option("--delimiter", dopt.delimiter, "field delimiter");

  std::string model_path;
  std::string query_path;
  std::string output_path;
  char explain_delimiter = ',';
  CLI::App* exp = app.add_subcommand(
      "explain", "Per-sample Shapley attributions from a decomposition file");
  exp->add_option("-m,--model", model_path, "decomposition file")->required();
  exp->add_option("-q,--queries", query_path, "query rows file")->required();
  exp->add_option("-o,--output", output_path, "output file (default stdout)");
  exp->add_option("--delimiter", explain_delimiter, "field delimiter");

  std::string imp_model;
  std::string imp_output;
  CLI::App* imp = app.add_subcommand(
      "importance", "Global feature importances, sorted");
  imp->add_option("-m,--model", imp_model, "decomposition file")->required();
  imp->add_option("-o,--output", imp_output, "output file (default stdout)");

  ValidationConfig vconfig;
  CLI::App* val = app.add_subcommand(
      "validate", "Cross-check the pipeline against brute-force oracles");
  val->add_option("--seed", vconfig.seed, "random seed");
  val->add_option("--instances", vconfig.instances, "instances per check");
  val->add_option("--max-dim", vconfig.max_dim, "max feature count");
  val->add_option("--max-categories", vconfig.max_categories,
                  "max categories per feature");
  val->add_flag("--inject-corruption", vconfig.inject_corruption,
                "test hook: corrupt the pipeline output")
      ->group("");  // hidden

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (dec->parsed()) return cmd_decompose(dopt);
    if (exp->parsed()) {
      return cmd_explain(model_path, query_path, output_path,
                         explain_delimiter);
    }
    if (imp->parsed()) return cmd_importance(imp_model, imp_output);
    if (val->parsed()) return cmd_validate(vconfig);
  } catch (const OverflowError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
