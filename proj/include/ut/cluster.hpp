#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ut/kde.hpp"
#include "ut/mixture.hpp"

namespace ut {

inline constexpr double default_min_prominence = 0.01;

/// Local extrema of a density. maxima and minima interleave as
/// max < min < max < ... < max.
struct ExtremaSet {
  std::vector<double> maxima;
  std::vector<double> minima;
};

/// Per-sample cluster labels in [1, K] plus cluster sizes.
struct ClusterAssignment {
  std::vector<int> labels;
  std::vector<std::size_t> cluster_sizes;

  std::size_t k() const noexcept { return cluster_sizes.size(); }
};

struct ComponentEstimate {
  std::vector<GaussianComponent> components;
  /// 0-based indices (into the input maxima) of clusters that had no members.
  std::vector<std::size_t> dropped;
  /// Smallest non-empty cluster size.
  std::size_t smallest_cluster = 0;
};

/// Three-point sliding-window extrema search. Runs of equal density (within
/// 1e-12 of the peak density) are treated as plateaus and collapse to their
/// center. Maxima lower than `min_prominence_fraction * max(density)` are
/// discarded; the minimum between two surviving maxima is the lowest grid
/// point strictly between them.
ExtremaSet find_extrema(const DensityEstimate& estimate,
                        double min_prominence_fraction = default_min_prominence);

/// Label 1 for z <= minima[0], j+1 for minima[j-1] < z <= minima[j], K for
/// z > minima[K-2].
ClusterAssignment assign_clusters(std::span<const double> samples, std::span<const double> minima);

/// Label of a single value; same rule as assign_clusters.
int cluster_of(double z, std::span<const double> minima);

/// Component k: mean = maxima[k], variance = sum (z - mean)^2 / (|Z_k| - 1)
/// floored at bandwidth^2, weight = |Z_k| / n. Empty clusters are dropped.
ComponentEstimate estimate_components(std::span<const double> samples,
                                      const ClusterAssignment& assignment,
                                      std::span<const double> maxima, double bandwidth);

}  // namespace ut
