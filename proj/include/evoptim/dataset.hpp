#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <zlib.h>

#include "evoptim/batch.hpp"
#include "evoptim/error.hpp"
#include "evoptim/rng.hpp"

namespace evoptim {

/// What has been applied to a dataset's feature columns.
struct FeatureScaling {
  enum class Kind { None, DivideBy255, Standardize };
  Kind kind = Kind::None;
  std::vector<double> offset;  // per column; x' = (x - offset) / scale
  std::vector<double> scale;
};

/// In-memory labeled dataset, immutable once loading and preprocessing are
/// done. `continuous` marks columns that standardization may touch (one-hot
/// indicator columns and pre-scaled pixel columns are excluded).
struct Dataset {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> features;  // rows x cols, row-major
  std::vector<int> labels;       // size rows
  int class_count = 0;
  std::vector<std::string> class_names;  // index -> original label text
  std::vector<bool> continuous;
  FeatureScaling scaling;

  double feature(std::size_t r, std::size_t c) const { return features[r * cols + c]; }
};

// --- MNIST-style IDX files ---------------------------------------------------

namespace detail {

// gzopen reads both gzip-compressed and plain files, so one code path covers
// the .gz variants.
class IdxReader {
 public:
  explicit IdxReader(const std::string& path) : path_(path) {
    file_ = gzopen(path.c_str(), "rb");
    if (!file_) throw FormatError("idx: cannot open " + path);
  }
  ~IdxReader() {
    if (file_) gzclose(file_);
  }
  IdxReader(const IdxReader&) = delete;
  IdxReader& operator=(const IdxReader&) = delete;

  void read(void* out, std::size_t n) {
    const int got = gzread(file_, out, static_cast<unsigned>(n));
    if (got < 0 || static_cast<std::size_t>(got) != n) {
      throw FormatError("idx: " + path_ + " truncated at byte offset " +
                        std::to_string(offset_));
    }
    offset_ += n;
  }

  std::uint32_t read_u32_be() {
    unsigned char b[4];
    read(b, 4);
    return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
           (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
  }

  std::size_t offset() const { return offset_; }

 private:
  std::string path_;
  gzFile file_ = nullptr;
  std::size_t offset_ = 0;
};

}  // namespace detail

/// Loads an MNIST-style IDX image/label file pair (plain or gzipped).
/// Pixels are scaled to [0,1] by dividing by 255; labels stay 0-9.
inline Dataset load_mnist_idx(const std::string& images_path,
                              const std::string& labels_path) {
  detail::IdxReader images(images_path);
  const std::uint32_t image_magic = images.read_u32_be();
  if (image_magic != 0x00000803u) {
    throw FormatError("idx: " + images_path + ": bad image magic at byte offset 0");
  }
  const std::uint32_t n = images.read_u32_be();
  const std::uint32_t rows = images.read_u32_be();
  const std::uint32_t cols = images.read_u32_be();

  detail::IdxReader labels(labels_path);
  const std::uint32_t label_magic = labels.read_u32_be();
  if (label_magic != 0x00000801u) {
    throw FormatError("idx: " + labels_path + ": bad label magic at byte offset 0");
  }
  const std::uint32_t n_labels = labels.read_u32_be();
  if (n_labels != n) {
    throw FormatError("idx: image count " + std::to_string(n) +
                      " != label count " + std::to_string(n_labels));
  }

  Dataset ds;
  ds.rows = n;
  ds.cols = static_cast<std::size_t>(rows) * cols;
  ds.features.resize(ds.rows * ds.cols);
  ds.labels.resize(ds.rows);
  std::vector<unsigned char> buf(ds.cols);
  for (std::size_t r = 0; r < ds.rows; ++r) {
    images.read(buf.data(), buf.size());
    double* out = ds.features.data() + r * ds.cols;
    for (std::size_t c = 0; c < ds.cols; ++c) out[c] = buf[c] / 255.0;
    unsigned char lab;
    labels.read(&lab, 1);
    if (lab > 9) {
      throw FormatError("idx: label " + std::to_string(int(lab)) + " out of range");
    }
    ds.labels[r] = lab;
  }
  ds.class_count = 10;
  for (int c = 0; c < 10; ++c) ds.class_names.push_back(std::to_string(c));
  ds.continuous.assign(ds.cols, false);  // already scaled to [0,1]
  ds.scaling.kind = FeatureScaling::Kind::DivideBy255;
  return ds;
}

// --- delimited text files ----------------------------------------------------

enum class ColumnRole { Numeric, Categorical, Label, Ignore };

struct ColumnSpec {
  ColumnRole role = ColumnRole::Numeric;
  /// For Categorical: if non-empty, the allowed categories; a value outside
  /// the list is a row-level error. If empty, categories are collected from
  /// the file and one-hot encoded in sorted order.
  std::vector<std::string> categories;
};

struct CsvSchema {
  char delimiter = ',';  // '\0' means any run of whitespace
  std::vector<ColumnSpec> columns;
  bool drop_missing = false;  // rows containing "?" are dropped instead of erroring
  std::string missing_token = "?";

  /// 10-column whitespace file: sequence name, 8 real features, class label.
  static CsvSchema yeast() {
    CsvSchema s;
    s.delimiter = '\0';
    s.columns.assign(10, ColumnSpec{ColumnRole::Numeric, {}});
    s.columns[0].role = ColumnRole::Ignore;
    s.columns[9].role = ColumnRole::Label;
    return s;
  }

  /// Census income file: 14 attributes then the income label; "?" rows are
  /// dropped; categorical columns one-hot encoded.
  static CsvSchema adult() {
    CsvSchema s;
    s.delimiter = ',';
    s.drop_missing = true;
    auto num = ColumnSpec{ColumnRole::Numeric, {}};
    auto cat = ColumnSpec{ColumnRole::Categorical, {}};
    s.columns = {num, cat, num, cat, num, cat, cat, cat,
                 cat, cat, num, num, num, cat,
                 ColumnSpec{ColumnRole::Label, {}}};
    return s;
  }

  /// Letter recognition: capital letter label first, then 16 integer features.
  static CsvSchema letter() {
    CsvSchema s;
    s.delimiter = ',';
    s.columns.assign(17, ColumnSpec{ColumnRole::Numeric, {}});
    s.columns[0].role = ColumnRole::Label;
    return s;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_fields(const std::string& line, char delim) {
  std::vector<std::string> out;
  if (delim == '\0') {
    std::istringstream iss(line);
    std::string tok;
    while (iss >> tok) out.push_back(tok);
    return out;
  }
  std::string field;
  std::istringstream iss(line);
  while (std::getline(iss, field, delim)) out.push_back(trim(field));
  return out;
}

}  // namespace detail

/// Parses a delimited text file under a column schema into a numeric dataset.
/// Categorical columns become one-hot blocks (categories sorted); label text
/// maps to class indices in sorted order. No standardization is applied here;
/// fit it on the training split after `split()`.
inline Dataset load_csv_dataset(const std::string& path, const CsvSchema& schema) {
  std::ifstream f(path);
  if (!f) throw FormatError("csv: cannot open " + path);

  struct Row {
    std::vector<std::string> fields;
    std::size_t line_no;
  };
  std::vector<Row> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t dropped = 0;
  while (std::getline(f, line)) {
    ++line_no;
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    auto fields = detail::split_fields(t, schema.delimiter);
    if (fields.size() != schema.columns.size()) {
      throw FormatError("csv: " + path + " line " + std::to_string(line_no) +
                        ": expected " + std::to_string(schema.columns.size()) +
                        " fields, got " + std::to_string(fields.size()));
    }
    bool missing = false;
    for (const auto& fd : fields) {
      if (fd == schema.missing_token) { missing = true; break; }
    }
    if (missing) {
      if (schema.drop_missing) { ++dropped; continue; }
      throw FormatError("csv: " + path + " line " + std::to_string(line_no) +
                        ": missing value");
    }
    rows.push_back({std::move(fields), line_no});
  }
  (void)dropped;
  if (rows.empty()) throw FormatError("csv: " + path + ": no data rows");

  const std::size_t ncols = schema.columns.size();
  std::size_t label_col = ncols;
  for (std::size_t c = 0; c < ncols; ++c) {
    if (schema.columns[c].role == ColumnRole::Label) {
      if (label_col != ncols) throw ConfigError("csv schema: multiple label columns");
      label_col = c;
    }
  }
  if (label_col == ncols) throw ConfigError("csv schema: no label column");

  // collect category and label vocabularies (sorted => deterministic layout)
  std::vector<std::vector<std::string>> cats(ncols);
  std::set<std::string> label_set;
  for (std::size_t c = 0; c < ncols; ++c) {
    if (schema.columns[c].role != ColumnRole::Categorical) continue;
    if (!schema.columns[c].categories.empty()) {
      cats[c] = schema.columns[c].categories;
      std::sort(cats[c].begin(), cats[c].end());
    } else {
      std::set<std::string> seen;
      for (const auto& row : rows) seen.insert(row.fields[c]);
      cats[c].assign(seen.begin(), seen.end());
    }
  }
  for (const auto& row : rows) {
    std::string lab = row.fields[label_col];
    if (!lab.empty() && lab.back() == '.') lab.pop_back();
    label_set.insert(lab);
  }
  std::vector<std::string> label_names(label_set.begin(), label_set.end());

  // output column layout
  std::size_t out_cols = 0;
  std::vector<std::size_t> col_offset(ncols, 0);
  std::vector<bool> continuous;
  for (std::size_t c = 0; c < ncols; ++c) {
    col_offset[c] = out_cols;
    switch (schema.columns[c].role) {
      case ColumnRole::Numeric:
        out_cols += 1;
        continuous.push_back(true);
        break;
      case ColumnRole::Categorical:
        out_cols += cats[c].size();
        continuous.insert(continuous.end(), cats[c].size(), false);
        break;
      default:
        break;
    }
  }

  Dataset ds;
  ds.rows = rows.size();
  ds.cols = out_cols;
  ds.features.assign(ds.rows * ds.cols, 0.0);
  ds.labels.resize(ds.rows);
  ds.class_names = label_names;
  ds.class_count = static_cast<int>(label_names.size());
  ds.continuous = continuous;

  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& fields = rows[r].fields;
    double* out = ds.features.data() + r * ds.cols;
    for (std::size_t c = 0; c < ncols; ++c) {
      const auto& spec = schema.columns[c];
      if (spec.role == ColumnRole::Numeric) {
        try {
          out[col_offset[c]] = std::stod(fields[c]);
        } catch (const std::exception&) {
          throw FormatError("csv: " + path + " line " + std::to_string(rows[r].line_no) +
                            ": not a number: '" + fields[c] + "'");
        }
      } else if (spec.role == ColumnRole::Categorical) {
        const auto it = std::lower_bound(cats[c].begin(), cats[c].end(), fields[c]);
        if (it == cats[c].end() || *it != fields[c]) {
          throw FormatError("csv: " + path + " line " + std::to_string(rows[r].line_no) +
                            ": unknown category '" + fields[c] + "'");
        }
        out[col_offset[c] + static_cast<std::size_t>(it - cats[c].begin())] = 1.0;
      }
    }
    std::string lab = fields[label_col];
    if (!lab.empty() && lab.back() == '.') lab.pop_back();
    const auto it = std::lower_bound(label_names.begin(), label_names.end(), lab);
    ds.labels[r] = static_cast<int>(it - label_names.begin());
  }
  return ds;
}

inline CsvSchema csv_schema_by_name(const std::string& name) {
  if (name == "yeast") return CsvSchema::yeast();
  if (name == "adult") return CsvSchema::adult();
  if (name == "letter") return CsvSchema::letter();
  throw ConfigError("unknown csv schema: " + name);
}

// --- splitting and scaling ---------------------------------------------------

struct SplitSpec {
  enum class Kind { Fraction, PerClassCount };
  Kind kind = Kind::Fraction;
  double train_fraction = 0.8;
  std::size_t per_class = 0;
  std::uint64_t seed = 0;
};

namespace detail {

inline Dataset take_rows(const Dataset& ds, const std::vector<std::size_t>& idx) {
  Dataset out;
  out.cols = ds.cols;
  out.rows = idx.size();
  out.class_count = ds.class_count;
  out.class_names = ds.class_names;
  out.continuous = ds.continuous;
  out.scaling = ds.scaling;
  out.features.resize(out.rows * out.cols);
  out.labels.resize(out.rows);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    std::copy_n(ds.features.data() + idx[r] * ds.cols, ds.cols,
                out.features.data() + r * ds.cols);
    out.labels[r] = ds.labels[idx[r]];
  }
  return out;
}

inline void shuffle_indices(std::vector<std::size_t>& idx, RngStream& rng) {
  for (std::size_t i = idx.size(); i > 1; --i) {
    std::swap(idx[i - 1], idx[rng.uniform_below(i)]);
  }
}

}  // namespace detail

/// Seeded disjoint train/test split; the two parts cover the dataset.
inline std::pair<Dataset, Dataset> split(const Dataset& ds, const SplitSpec& spec) {
  RngStream rng(derive_seed(spec.seed, 0x59171ULL));
  std::vector<std::size_t> train_idx, test_idx;
  if (spec.kind == SplitSpec::Kind::Fraction) {
    if (!(spec.train_fraction >= 0.0 && spec.train_fraction <= 1.0)) {
      throw ConfigError("split: train_fraction outside [0,1]");
    }
    std::vector<std::size_t> idx(ds.rows);
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    detail::shuffle_indices(idx, rng);
    const auto n_train = static_cast<std::size_t>(
        std::llround(spec.train_fraction * static_cast<double>(ds.rows)));
    train_idx.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    test_idx.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  } else {
    std::vector<std::vector<std::size_t>> by_class(
        static_cast<std::size_t>(std::max(ds.class_count, 1)));
    for (std::size_t r = 0; r < ds.rows; ++r) {
      by_class[static_cast<std::size_t>(ds.labels[r])].push_back(r);
    }
    for (auto& group : by_class) {
      if (group.empty()) continue;
      if (group.size() < spec.per_class) {
        throw ConfigError("split: class has only " + std::to_string(group.size()) +
                          " rows, need " + std::to_string(spec.per_class));
      }
      detail::shuffle_indices(group, rng);
      train_idx.insert(train_idx.end(), group.begin(),
                       group.begin() + static_cast<std::ptrdiff_t>(spec.per_class));
      test_idx.insert(test_idx.end(),
                      group.begin() + static_cast<std::ptrdiff_t>(spec.per_class),
                      group.end());
    }
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());
  }
  return {detail::take_rows(ds, train_idx), detail::take_rows(ds, test_idx)};
}

/// Mean/std statistics of the continuous columns, computed on (and only on)
/// the dataset given — fit on the training split, then apply unchanged to
/// the test split so nothing leaks.
inline FeatureScaling fit_standardization(const Dataset& train) {
  FeatureScaling s;
  s.kind = FeatureScaling::Kind::Standardize;
  s.offset.assign(train.cols, 0.0);
  s.scale.assign(train.cols, 1.0);
  if (train.rows == 0) return s;
  for (std::size_t c = 0; c < train.cols; ++c) {
    if (!train.continuous[c]) continue;
    double mean = 0.0;
    for (std::size_t r = 0; r < train.rows; ++r) mean += train.feature(r, c);
    mean /= static_cast<double>(train.rows);
    double var = 0.0;
    for (std::size_t r = 0; r < train.rows; ++r) {
      const double d = train.feature(r, c) - mean;
      var += d * d;
    }
    var /= static_cast<double>(train.rows);
    s.offset[c] = mean;
    s.scale[c] = var > 0.0 ? std::sqrt(var) : 1.0;  // constant column: center only
  }
  return s;
}

inline void apply_scaling(Dataset& ds, const FeatureScaling& s) {
  if (s.kind != FeatureScaling::Kind::Standardize) return;
  if (s.offset.size() != ds.cols) throw ShapeError("apply_scaling: column mismatch");
  for (std::size_t c = 0; c < ds.cols; ++c) {
    if (!ds.continuous[c]) continue;
    for (std::size_t r = 0; r < ds.rows; ++r) {
      ds.features[r * ds.cols + c] = (ds.features[r * ds.cols + c] - s.offset[c]) / s.scale[c];
    }
  }
  ds.scaling = s;
}

// --- batch sampling ----------------------------------------------------------

inline Batch make_batch(const Dataset& ds, const std::vector<std::size_t>& idx) {
  Batch b;
  b.rows = idx.size();
  b.feature_cols = ds.cols;
  b.features.resize(b.rows * b.feature_cols);
  b.labels.resize(b.rows);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    std::copy_n(ds.features.data() + idx[r] * ds.cols, ds.cols,
                b.features.data() + r * ds.cols);
    b.labels[r] = ds.labels[idx[r]];
  }
  return b;
}

/// Uniform sample of `b` distinct rows (Floyd's algorithm, O(b) draws).
/// Fresh independent sample on every call; indices are sorted so the batch
/// content is a deterministic function of the draws alone.
inline Batch sample_batch(const Dataset& ds, std::size_t b, RngStream& rng) {
  if (b == 0 || b > ds.rows) {
    throw ConfigError("sample_batch: batch size " + std::to_string(b) +
                      " outside [1, " + std::to_string(ds.rows) + "]");
  }
  std::set<std::size_t> chosen;
  for (std::size_t j = ds.rows - b; j < ds.rows; ++j) {
    const std::size_t t = rng.uniform_below(j + 1);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  std::vector<std::size_t> idx(chosen.begin(), chosen.end());
  return make_batch(ds, idx);
}

// --- synthetic data ----------------------------------------------------------

/// Seeded Gaussian-blob classification set: class c gets a mean vector drawn
/// from N(0, separation^2) and unit-variance features around it. Used by
/// tests and demos; real experiments load files.
inline Dataset synthetic_classification(std::size_t n, std::size_t d, int classes,
                                        std::uint64_t seed, double separation = 2.0) {
  if (n == 0 || d == 0 || classes < 2) {
    throw ConfigError("synthetic_classification: need n >= 1, d >= 1, classes >= 2");
  }
  RngStream rng(derive_seed(seed, 0xb10b5));
  std::vector<double> means(static_cast<std::size_t>(classes) * d);
  for (auto& m : means) m = separation * rng.normal();
  Dataset ds;
  ds.rows = n;
  ds.cols = d;
  ds.features.resize(n * d);
  ds.labels.resize(n);
  ds.class_count = classes;
  for (int c = 0; c < classes; ++c) ds.class_names.push_back("c" + std::to_string(c));
  for (std::size_t r = 0; r < n; ++r) {
    const int c = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(classes)));
    ds.labels[r] = c;
    for (std::size_t j = 0; j < d; ++j) {
      ds.features[r * d + j] = means[static_cast<std::size_t>(c) * d + j] + rng.normal();
    }
  }
  ds.continuous.assign(d, true);
  return ds;
}

}  // namespace evoptim
