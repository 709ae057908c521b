#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fanova {

/// A full input configuration: one category code per feature.
using Row = std::vector<int>;

/// A sorted list of feature indices (0-based).
using Subset = std::vector<int>;

/// Malformed or inconsistent input data.
struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A linear solve or rank computation failed beyond tolerance.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Integer overflow while counting index-space cardinalities.
struct OverflowError : std::runtime_error {
  explicit OverflowError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Query row outside the empirical support (pmf assigns it probability 0).
struct OutOfSupportError : DataError {
  explicit OutOfSupportError(const std::string& msg) : DataError(msg) {}
};

std::string subset_to_string(const Subset& a);

}  // namespace fanova
