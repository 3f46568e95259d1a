#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ut {

/// Dense n x d matrix of latent samples. Rows are observations, columns are
/// latent dimensions. Storage is column-major because every stage of the
/// pipeline walks one dimension at a time.
class SampleMatrix {
public:
  SampleMatrix() = default;
  SampleMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static SampleMatrix from_columns(const std::vector<std::vector<double>>& columns);
  static SampleMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[c * rows_ + r]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[c * rows_ + r]; }

  std::span<const double> column(std::size_t c) const {
    return {data_.data() + c * rows_, rows_};
  }
  std::span<double> column(std::size_t c) { return {data_.data() + c * rows_, rows_}; }

  const std::vector<double>& raw() const noexcept { return data_; }

  friend bool operator==(const SampleMatrix&, const SampleMatrix&) = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// n x m matrix of discrete generative-factor labels, column-major.
class FactorLabels {
public:
  FactorLabels() = default;
  FactorLabels(std::size_t rows, std::size_t factors)
      : rows_(rows), factors_(factors), data_(rows * factors, 0), cardinalities_(factors, 0) {}

  /// Builds labels and infers each factor's cardinality as max label + 1.
  /// Throws on negative labels.
  static FactorLabels from_columns(const std::vector<std::vector<std::int64_t>>& columns);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t factors() const noexcept { return factors_; }

  std::int64_t& operator()(std::size_t r, std::size_t f) { return data_[f * rows_ + r]; }
  std::int64_t operator()(std::size_t r, std::size_t f) const { return data_[f * rows_ + r]; }

  std::span<const std::int64_t> column(std::size_t f) const {
    return {data_.data() + f * rows_, rows_};
  }

  const std::vector<std::int64_t>& cardinalities() const noexcept { return cardinalities_; }
  void set_cardinality(std::size_t f, std::int64_t c) { cardinalities_[f] = c; }

  /// Throws invalid_input if any label lies outside [0, cardinality).
  void validate() const;

private:
  std::size_t rows_ = 0;
  std::size_t factors_ = 0;
  std::vector<std::int64_t> data_;
  std::vector<std::int64_t> cardinalities_;
};

}  // namespace ut
