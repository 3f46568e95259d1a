#include "ut/transform.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ut/error.hpp"
#include "ut/parallel.hpp"

namespace ut {

void FitConfig::validate() const {
  if (grid_size < min_grid_size) {
    fail(ErrorKind::invalid_input, "grid_size must be at least " + std::to_string(min_grid_size));
  }
  if (!(min_prominence_fraction >= 0.0 && min_prominence_fraction < 1.0)) {
    fail(ErrorKind::invalid_input, "min_prominence_fraction must lie in [0, 1)");
  }
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    fail(ErrorKind::invalid_input, "output range requires finite lo < hi");
  }
  if (bandwidth_override && !(*bandwidth_override > 0.0 && std::isfinite(*bandwidth_override))) {
    fail(ErrorKind::invalid_input, "bandwidth override must be positive and finite");
  }
  if (smoothing.enabled && !(smoothing.temperature > 0.0 && std::isfinite(smoothing.temperature))) {
    fail(ErrorKind::invalid_input, "smoothing temperature must be positive");
  }
}

MixtureModel fit_dimension(std::span<const double> column, const FitConfig& config,
                           std::size_t dimension, DimensionDiagnostics* diagnostics) {
  const DensityEstimate est =
      estimate_density(column, config.grid_size, config.bandwidth_override, dimension);
  ExtremaSet ext = find_extrema(est, config.min_prominence_fraction);
  if (ext.maxima.empty()) fail(ErrorKind::numeric, "dimension " + std::to_string(dimension) + ": no density maximum");

  if (est.constant && ext.maxima.size() > 1) {
    // A zero-spread column is one collapsed cluster regardless of grid noise.
    double best = ext.maxima.front();
    double best_density = -1.0;
    for (double m : ext.maxima) {
      const auto i = static_cast<std::size_t>(
          std::lower_bound(est.grid.begin(), est.grid.end(), m) - est.grid.begin());
      const double f = est.density[std::min(i, est.density.size() - 1)];
      if (f > best_density) {
        best_density = f;
        best = m;
      }
    }
    ext.maxima = {best};
    ext.minima.clear();
  }

  const ClusterAssignment assignment = assign_clusters(column, ext.minima);
  const ComponentEstimate comps = estimate_components(column, assignment, ext.maxima, est.bandwidth);

  // Keep one threshold between each pair of consecutive non-empty clusters:
  // the upper bound of the lower cluster. Empty clusters in between hold no
  // samples, so the partition is unchanged.
  std::vector<double> thresholds;
  {
    std::size_t dropped = 0;
    std::vector<std::size_t> alive;
    for (std::size_t c = 0; c < assignment.k(); ++c) {
      if (dropped < comps.dropped.size() && comps.dropped[dropped] == c) {
        ++dropped;
      } else {
        alive.push_back(c);
      }
    }
    for (std::size_t i = 0; i + 1 < alive.size(); ++i) thresholds.push_back(ext.minima[alive[i]]);
  }

  const bool collapsed = est.constant || comps.smallest_cluster <= 1;
  if (diagnostics) {
    diagnostics->constant = est.constant;
    diagnostics->dropped_clusters = comps.dropped.size();
    diagnostics->smallest_cluster = comps.smallest_cluster;
  }
  return MixtureModel(comps.components, std::move(thresholds), est.bandwidth, column.size(), collapsed);
}

UtModel fit(const SampleMatrix& samples, const FitConfig& config, std::size_t threads) {
  config.validate();
  if (samples.rows() < 2) fail(ErrorKind::invalid_input, "fit needs at least 2 rows");
  if (samples.cols() < 1) fail(ErrorKind::invalid_input, "fit needs at least 1 column");
  for (std::size_t c = 0; c < samples.cols(); ++c) {
    const auto col = samples.column(c);
    for (std::size_t r = 0; r < col.size(); ++r) {
      if (!std::isfinite(col[r])) {
        fail(ErrorKind::invalid_input,
             "non-finite value at row " + std::to_string(r) + ", column " + std::to_string(c));
      }
    }
  }

  UtModel model;
  model.config = config;
  model.rows = samples.rows();
  model.cols = samples.cols();
  model.dimensions.resize(samples.cols());
  model.diagnostics.resize(samples.cols());
  parallel_for(samples.cols(), threads, [&](std::size_t c) {
    try {
      model.dimensions[c] = fit_dimension(samples.column(c), config, c, &model.diagnostics[c]);
    } catch (const Error& e) {
      throw Error(e.kind(), "column " + std::to_string(c) + ": " + e.what());
    }
  });
  return model;
}

double apply_value(const MixtureModel& m, double z, const FitConfig& config) {
  const double t = config.lo + (config.hi - config.lo) * m.cdf(z, config.smoothing);
  return std::clamp(t, config.lo, config.hi);
}

double invert_value(const MixtureModel& m, double t, const FitConfig& config) {
  constexpr double slack = 1e-9;
  if (!(t >= config.lo - slack && t <= config.hi + slack)) {
    fail(ErrorKind::range, "value " + std::to_string(t) + " outside [" + std::to_string(config.lo) +
                               ", " + std::to_string(config.hi) + "]");
  }
  const double p = std::clamp((t - config.lo) / (config.hi - config.lo), 0.0, 1.0);
  return m.quantile(p, config.smoothing);
}

namespace {

void check_columns(const UtModel& model, const SampleMatrix& m) {
  if (m.cols() != model.dimensions.size()) {
    fail(ErrorKind::shape, "matrix has " + std::to_string(m.cols()) + " columns, model has " +
                               std::to_string(model.dimensions.size()));
  }
}

}  // namespace

SampleMatrix apply(const UtModel& model, const SampleMatrix& samples, std::size_t threads) {
  check_columns(model, samples);
  SampleMatrix out(samples.rows(), samples.cols());
  parallel_for(samples.cols(), threads, [&](std::size_t c) {
    const auto in = samples.column(c);
    auto dst = out.column(c);
    for (std::size_t r = 0; r < in.size(); ++r) dst[r] = apply_value(model.dimensions[c], in[r], model.config);
  });
  return out;
}

SampleMatrix invert(const UtModel& model, const SampleMatrix& transformed, std::size_t threads) {
  check_columns(model, transformed);
  SampleMatrix out(transformed.rows(), transformed.cols());
  parallel_for(transformed.cols(), threads, [&](std::size_t c) {
    const auto in = transformed.column(c);
    auto dst = out.column(c);
    for (std::size_t r = 0; r < in.size(); ++r) {
      try {
        dst[r] = invert_value(model.dimensions[c], in[r], model.config);
      } catch (const Error& e) {
        throw Error(e.kind(), "row " + std::to_string(r) + ", column " + std::to_string(c) + ": " + e.what());
      }
    }
  });
  return out;
}

UtModel model_from_mixtures(std::vector<MixtureModel> mixtures, const FitConfig& config) {
  config.validate();
  UtModel model;
  model.config = config;
  model.cols = mixtures.size();
  model.diagnostics.resize(mixtures.size());
  model.dimensions = std::move(mixtures);
  return model;
}

}  // namespace ut
