#pragma once

#include <cstddef>
#include <vector>

namespace evoptim {

/// A slice of labeled data, row-major. Classification batches carry `labels`
/// (class indices); regression-style batches carry `targets` instead. An
/// empty batch (rows == 0) is legal input for objectives that ignore data,
/// e.g. the analytic benchmark functions.
struct Batch {
  std::size_t rows = 0;
  std::size_t feature_cols = 0;
  std::vector<double> features;  // rows x feature_cols
  std::vector<int> labels;       // size rows, or empty
  std::size_t target_cols = 0;
  std::vector<double> targets;   // rows x target_cols, or empty

  bool empty() const { return rows == 0; }
};

}  // namespace evoptim
