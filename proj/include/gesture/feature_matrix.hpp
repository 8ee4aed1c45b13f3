#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace gesture {

/// Row-major per-frame feature table: one row per frame.
class FeatureMatrix {
public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

  /// Row-major storage, which is also the flattened per-sequence vector.
  const std::vector<double>& data() const { return data_; }

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Row-major concatenation, length rows*cols.
std::vector<double> flatten_sequence(const FeatureMatrix& m);

/// CSV with the given column names, optionally prefixed by a 1-based frame column.
std::string feature_matrix_to_csv(const FeatureMatrix& m, std::span<const std::string> header,
                                  bool with_frame_index);

/// Reads a feature CSV: a header line, then numeric rows. A leading column
/// named `frame` is dropped.
FeatureMatrix parse_feature_csv(const std::string& text);
FeatureMatrix read_feature_csv(const std::string& path);

}  // namespace gesture
