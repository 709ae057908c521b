// Compares the OpenMP kernels against their serial references on a synthetic
// sparse instance: basis column evaluation and Gram assembly.

#include <chrono>
#include <cstdio>
#include <random>

#include "fanova/gram.hpp"
#include "fanova/selection.hpp"
#include "fanova/validation.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

int main() {
  using namespace fanova;

  std::mt19937_64 rng(7);
  // d = 12 ternary features, dense-ish support
  HyperGrid grid;
  grid.cardinalities.assign(12, 3);
  std::vector<Row> rows;
  std::uniform_int_distribution<int> cat(0, 2);
  for (int n = 0; n < 4000; ++n) {
    Row row(12);
    for (int& c : row) c = cat(rng);
    rows.push_back(std::move(row));
  }
  auto dist = std::make_shared<EmpiricalDistribution>(
      EmpiricalDistribution::from_dataset(rows, grid));

  // candidate keys: everything up to order 2
  std::vector<IndexKey> keys;
  KeyStream stream(grid, KeyStream::Options{.max_order = 2});
  while (auto key = stream.next()) keys.push_back(std::move(*key));

  std::vector<double> f = gen::random_values(rng, dist->size());

#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (OpenMP disabled)\n");
#endif
  std::printf("r = %zu, candidate columns = %zu\n\n", dist->size(),
              keys.size());

  auto t0 = std::chrono::steady_clock::now();
  auto serial_cols = evaluate_phi_batch_serial(*dist, keys);
  const double t_eval_serial = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  auto parallel_cols = evaluate_phi_batch(*dist, keys);
  const double t_eval_parallel = seconds_since(t0);

  double max_diff = 0.0;
  for (std::size_t j = 0; j < keys.size(); ++j) {
    for (std::size_t k = 0; k < dist->size(); ++k) {
      max_diff = std::max(max_diff, std::abs(serial_cols[j].values[k] -
                                             parallel_cols[j].values[k]));
    }
  }
  std::printf("phi batch   serial %.3fs   parallel %.3fs   max diff %.2e\n",
              t_eval_serial, t_eval_parallel, max_diff);

  // Gram assembly on a subset of the candidates
  std::vector<IndexKey> gram_keys(keys.begin(),
                                  keys.begin() + std::min<std::size_t>(
                                                     keys.size(), 160));
  t0 = std::chrono::steady_clock::now();
  GramSystem serial_sys = build_system_serial(*dist, f, gram_keys);
  const double t_gram_serial = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  GramSystem parallel_sys = build_system(*dist, f, gram_keys);
  const double t_gram_parallel = seconds_since(t0);

  max_diff = 0.0;
  for (std::size_t i = 0; i < serial_sys.gram.size(); ++i) {
    max_diff = std::max(max_diff,
                        std::abs(serial_sys.gram[i] - parallel_sys.gram[i]));
  }
  std::printf("gram %zux%zu  serial %.3fs   parallel %.3fs   max diff %.2e\n",
              gram_keys.size(), gram_keys.size(), t_gram_serial,
              t_gram_parallel, max_diff);
  return 0;
}
