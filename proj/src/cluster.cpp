#include "ut/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ut/error.hpp"

namespace ut {
namespace {

// A run of grid points whose densities are equal within tolerance.
struct Run {
  std::size_t first;
  std::size_t last;
  double value;
};

}  // namespace

ExtremaSet find_extrema(const DensityEstimate& estimate, double min_prominence_fraction) {
  const auto& f = estimate.density;
  const auto& x = estimate.grid;
  if (f.empty() || f.size() != x.size()) fail(ErrorKind::invalid_input, "empty density estimate");
  if (!(min_prominence_fraction >= 0.0 && min_prominence_fraction < 1.0)) {
    fail(ErrorKind::invalid_input, "min_prominence_fraction must lie in [0, 1)");
  }
  const double peak = *std::max_element(f.begin(), f.end());
  if (!(peak > 0.0)) fail(ErrorKind::invalid_input, "density is identically zero");

  const double tol = 1e-12 * peak;
  std::vector<Run> runs;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!runs.empty() && std::abs(f[i] - runs.back().value) <= tol) {
      runs.back().last = i;
    } else {
      runs.push_back({i, i, f[i]});
    }
  }

  const double floor = min_prominence_fraction * peak;
  const double lowest = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> kept;  // indices into runs
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const double left = r > 0 ? runs[r - 1].value : lowest;
    const double right = r + 1 < runs.size() ? runs[r + 1].value : lowest;
    if (runs[r].value > left && runs[r].value > right && runs[r].value >= floor) kept.push_back(r);
  }

  ExtremaSet out;
  for (std::size_t k = 0; k < kept.size(); ++k) {
    const Run& run = runs[kept[k]];
    out.maxima.push_back(0.5 * (x[run.first] + x[run.last]));
    if (k + 1 < kept.size()) {
      const std::size_t begin = run.last + 1;
      const std::size_t end = runs[kept[k + 1]].first;
      const auto it = std::min_element(f.begin() + static_cast<std::ptrdiff_t>(begin),
                                       f.begin() + static_cast<std::ptrdiff_t>(end));
      // Centre of the flat stretch around the lowest point, so wide empty
      // gaps are split in the middle.
      std::size_t lo = static_cast<std::size_t>(it - f.begin());
      std::size_t hi = lo;
      while (lo > begin && std::abs(f[lo - 1] - *it) <= tol) --lo;
      while (hi + 1 < end && std::abs(f[hi + 1] - *it) <= tol) ++hi;
      out.minima.push_back(x[(lo + hi) / 2]);
    }
  }
  return out;
}

int cluster_of(double z, std::span<const double> minima) {
  // Number of thresholds strictly below z.
  const auto it = std::lower_bound(minima.begin(), minima.end(), z);
  return static_cast<int>(it - minima.begin()) + 1;
}

ClusterAssignment assign_clusters(std::span<const double> samples, std::span<const double> minima) {
  for (std::size_t j = 1; j < minima.size(); ++j) {
    if (!(minima[j - 1] < minima[j])) fail(ErrorKind::invalid_input, "minima must be strictly increasing");
  }
  ClusterAssignment a;
  a.labels.resize(samples.size());
  a.cluster_sizes.assign(minima.size() + 1, 0);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i])) {
      fail(ErrorKind::invalid_input, "non-finite sample at row " + std::to_string(i));
    }
    const int label = cluster_of(samples[i], minima);
    a.labels[i] = label;
    ++a.cluster_sizes[static_cast<std::size_t>(label - 1)];
  }
  return a;
}

ComponentEstimate estimate_components(std::span<const double> samples,
                                      const ClusterAssignment& assignment,
                                      std::span<const double> maxima, double bandwidth) {
  const std::size_t k = assignment.k();
  if (maxima.size() != k) {
    fail(ErrorKind::invalid_input, std::to_string(maxima.size()) + " centroids for " +
                                       std::to_string(k) + " clusters");
  }
  if (assignment.labels.size() != samples.size()) {
    fail(ErrorKind::shape, "assignment length does not match samples");
  }

  std::vector<double> ss(k, 0.0);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto c = static_cast<std::size_t>(assignment.labels[i] - 1);
    const double d = samples[i] - maxima[c];
    ss[c] += d * d;
  }

  const double floor = bandwidth * bandwidth;
  std::size_t total = 0;
  for (std::size_t c = 0; c < k; ++c) total += assignment.cluster_sizes[c];

  ComponentEstimate est;
  est.smallest_cluster = std::numeric_limits<std::size_t>::max();
  for (std::size_t c = 0; c < k; ++c) {
    const std::size_t size = assignment.cluster_sizes[c];
    if (size == 0) {
      est.dropped.push_back(c);
      continue;
    }
    est.smallest_cluster = std::min(est.smallest_cluster, size);
    const double var = size > 1 ? ss[c] / static_cast<double>(size - 1) : 0.0;
    est.components.push_back(
        {static_cast<double>(size) / static_cast<double>(total), maxima[c], std::max(var, floor)});
  }
  if (est.components.empty()) fail(ErrorKind::invalid_input, "no samples to estimate components from");
  return est;
}

}  // namespace ut
