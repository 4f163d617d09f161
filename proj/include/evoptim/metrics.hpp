#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "evoptim/error.hpp"

namespace evoptim {

/// Shortest round-trip decimal form of a double (via to_chars), so metric
/// files are byte-identical across reruns. NaN renders as an empty field.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// Append-only CSV with a fixed header written at open time.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header)
      : out_(path), columns_(header.size()) {
    if (!out_) throw FormatError("csv: cannot open " + path + " for writing");
    write_row(header);
  }

  void row(const std::vector<std::string>& fields) {
    if (fields.size() != columns_) {
      throw ShapeError("csv: row has " + std::to_string(fields.size()) +
                       " fields, header has " + std::to_string(columns_));
    }
    write_row(fields);
  }

  void flush() { out_.flush(); }

 private:
  void write_row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << fields[i];
    }
    out_ << '\n';
  }

  std::ofstream out_;
  std::size_t columns_;
};

/// One metrics line: a training step for the single-model algorithms, or a
/// whole generation for the population learner. Unused fields stay NaN and
/// render empty.
struct MetricsRecord {
  std::string run_id;
  std::uint64_t seed = 0;
  std::string algorithm;
  std::uint64_t index = 0;  // step or generation, 1-based
  double train_loss = std::numeric_limits<double>::quiet_NaN();
  double val_loss = std::numeric_limits<double>::quiet_NaN();
  double test_accuracy = std::numeric_limits<double>::quiet_NaN();
  double adoption_count = std::numeric_limits<double>::quiet_NaN();
  double wall_ms = std::numeric_limits<double>::quiet_NaN();

  static std::vector<std::string> header() {
    return {"run_id", "seed", "algorithm", "index",    "train_loss",
            "val_loss", "test_accuracy", "adoption_count", "wall_ms"};
  }

  std::vector<std::string> fields() const {
    return {run_id,
            std::to_string(seed),
            algorithm,
            std::to_string(index),
            format_double(train_loss),
            format_double(val_loss),
            format_double(test_accuracy),
            format_double(adoption_count),
            format_double(wall_ms)};
  }
};

}  // namespace evoptim
