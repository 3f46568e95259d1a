#include "ut/matrix.hpp"

#include <algorithm>
#include <string>

#include "ut/error.hpp"

namespace ut {

SampleMatrix SampleMatrix::from_columns(const std::vector<std::vector<double>>& columns) {
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  SampleMatrix m(rows, columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].size() != rows) {
      fail(ErrorKind::shape, "column " + std::to_string(c) + " has " +
                                 std::to_string(columns[c].size()) + " rows, expected " +
                                 std::to_string(rows));
    }
    std::copy(columns[c].begin(), columns[c].end(), m.column(c).begin());
  }
  return m;
}

SampleMatrix SampleMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  SampleMatrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) {
      fail(ErrorKind::shape, "row " + std::to_string(r) + " has " +
                                 std::to_string(rows[r].size()) + " columns, expected " +
                                 std::to_string(cols));
    }
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
  }
  return m;
}

FactorLabels FactorLabels::from_columns(const std::vector<std::vector<std::int64_t>>& columns) {
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  FactorLabels f(rows, columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].size() != rows) {
      fail(ErrorKind::shape, "factor " + std::to_string(c) + " has " +
                                 std::to_string(columns[c].size()) + " rows, expected " +
                                 std::to_string(rows));
    }
    std::int64_t top = -1;
    for (std::size_t r = 0; r < rows; ++r) {
      const auto v = columns[c][r];
      if (v < 0) {
        fail(ErrorKind::invalid_input, "negative label " + std::to_string(v) + " at row " +
                                           std::to_string(r) + ", factor " + std::to_string(c));
      }
      f(r, c) = v;
      top = std::max(top, v);
    }
    f.cardinalities_[c] = top + 1;
  }
  return f;
}

void FactorLabels::validate() const {
  for (std::size_t c = 0; c < factors_; ++c) {
    for (std::size_t r = 0; r < rows_; ++r) {
      const auto v = (*this)(r, c);
      if (v < 0 || v >= cardinalities_[c]) {
        fail(ErrorKind::invalid_input,
             "label " + std::to_string(v) + " at row " + std::to_string(r) + ", factor " +
                 std::to_string(c) + " outside [0, " + std::to_string(cardinalities_[c]) + ")");
      }
    }
  }
}

}  // namespace ut
