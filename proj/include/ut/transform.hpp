#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ut/cluster.hpp"
#include "ut/kde.hpp"
#include "ut/matrix.hpp"
#include "ut/mixture.hpp"

namespace ut {

struct FitConfig {
  std::size_t grid_size = default_grid_size;
  double min_prominence_fraction = default_min_prominence;
  double lo = -4.0;
  double hi = 4.0;
  std::optional<double> bandwidth_override;
  EdgeSmoothing smoothing;

  /// Throws invalid_input on grid_size < 16, lo >= hi, prominence outside
  /// [0, 1) or a non-positive override/temperature.
  void validate() const;

  friend bool operator==(const FitConfig&, const FitConfig&) = default;
};

/// Per-dimension fit diagnostics that are not part of the mixture itself.
struct DimensionDiagnostics {
  bool constant = false;
  std::size_t dropped_clusters = 0;
  std::size_t smallest_cluster = 0;

  friend bool operator==(const DimensionDiagnostics&, const DimensionDiagnostics&) = default;
};

/// Fitted uniform transform: one mixture per latent column.
struct UtModel {
  std::vector<MixtureModel> dimensions;
  std::vector<DimensionDiagnostics> diagnostics;
  FitConfig config;
  std::size_t rows = 0;
  std::size_t cols = 0;

  friend bool operator==(const UtModel&, const UtModel&) = default;
};

/// Fits one column: KDE, extrema, clustering, component estimation.
MixtureModel fit_dimension(std::span<const double> column, const FitConfig& config,
                           std::size_t dimension = 0, DimensionDiagnostics* diagnostics = nullptr);

/// Fits every column independently. `threads` = 0 uses all hardware threads;
/// the result does not depend on the thread count.
UtModel fit(const SampleMatrix& samples, const FitConfig& config = {}, std::size_t threads = 1);

/// z~ = lo + (hi - lo) * F_j(z) per entry of column j.
SampleMatrix apply(const UtModel& model, const SampleMatrix& samples, std::size_t threads = 1);

/// Maps transformed values back through the mixture quantile function.
/// Entries outside [lo, hi] by more than 1e-9 raise a range error.
SampleMatrix invert(const UtModel& model, const SampleMatrix& transformed, std::size_t threads = 1);

/// Single-dimension helpers shared by apply/invert.
double apply_value(const MixtureModel& m, double z, const FitConfig& config);
double invert_value(const MixtureModel& m, double t, const FitConfig& config);

/// Wraps a list of known mixtures (e.g. ground truth) as a UtModel.
UtModel model_from_mixtures(std::vector<MixtureModel> mixtures, const FitConfig& config = {});

}  // namespace ut
