#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "mining/errors.hpp"

namespace mining {

// Dense row-major design matrix. Missing cells hold quiet NaN; every
// learner treats NaN as "missing", never as a value.
struct DesignMatrix {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<double> values;       // n_rows * n_cols
  std::vector<std::string> names;   // n_cols

  static constexpr double missing_marker() {
    return std::numeric_limits<double>::quiet_NaN();
  }
  static bool is_missing(double v) { return std::isnan(v); }

  double at(std::size_t row, std::size_t col) const { return values[row * n_cols + col]; }
  double& at(std::size_t row, std::size_t col) { return values[row * n_cols + col]; }
  const double* row(std::size_t r) const { return values.data() + r * n_cols; }

  static DesignMatrix zeros(std::size_t rows, std::size_t cols);

  int column_index(const std::string& name) const;
  DesignMatrix select_columns(const std::vector<std::size_t>& cols) const;
  DesignMatrix drop_column(std::size_t col) const;
  DesignMatrix select_rows(const std::vector<std::size_t>& rows) const;
  // Stack rows of a then b; column names must match.
  static DesignMatrix vstack(const DesignMatrix& a, const DesignMatrix& b);
};

}  // namespace mining
