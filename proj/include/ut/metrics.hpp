#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ut/matrix.hpp"

namespace ut {

inline constexpr std::size_t default_mig_bins = 20;
inline constexpr std::size_t default_votes = 800;
inline constexpr std::size_t default_vote_batch = 64;

struct MigResult {
  double score = 0.0;
  /// Per factor: normalized gap, or nullopt when the factor was excluded.
  std::vector<std::optional<double>> per_factor;
  std::vector<std::string> warnings;
};

/// Mutual information gap with equal-count discretization. Tied values always
/// share a bin, so any strictly increasing map of a column leaves the result
/// bit-identical.
MigResult mutual_information_gap(const SampleMatrix& latents, const FactorLabels& factors,
                                  std::size_t bins = default_mig_bins);

inline double mig(const SampleMatrix& latents, const FactorLabels& factors,
                  std::size_t bins = default_mig_bins) {
  return mutual_information_gap(latents, factors, bins).score;
}

/// Equal-count bin index of every entry of `column` (ties share a bin).
std::vector<std::size_t> equal_count_bins(std::span<const double> column, std::size_t bins);

/// Plug-in mutual information (nats) between two discrete label sequences.
double discrete_mutual_information(std::span<const std::size_t> a, std::size_t a_levels,
                                   std::span<const std::int64_t> b, std::size_t b_levels);

/// Plug-in entropy (nats).
double discrete_entropy(std::span<const std::int64_t> labels, std::size_t levels);

/// Gaussian total correlation 0.5 * (sum_j ln S_jj - ln det S) over the
/// empirical covariance S, with 1e-10 * trace / d added to the diagonal.
double total_correlation(const SampleMatrix& latents);

struct FactorVaeOptions {
  std::size_t votes = default_votes;
  std::size_t batch = default_vote_batch;
  std::uint64_t seed = 0;
};

/// Majority-vote FactorVAE score, evaluated on the last 20% of votes using a
/// classifier built from the first 80%.
double factor_vae_score(const SampleMatrix& latents, const FactorLabels& factors,
                        const FactorVaeOptions& options = {});

struct CorrelationResult {
  /// d x m, row-major: values[latent * m + factor].
  std::vector<double> values;
  std::size_t latents = 0;
  std::size_t factors = 0;
  std::vector<std::size_t> zero_variance_latents;
  std::vector<std::size_t> zero_variance_factors;

  double at(std::size_t latent, std::size_t factor) const { return values[latent * factors + factor]; }
};

CorrelationResult correlation_heatmap(const SampleMatrix& latents, const FactorLabels& factors);

struct MetricSelection {
  bool mig = true;
  bool tc = true;
  bool factor_vae = true;
  bool correlation = true;
};

struct MetricReport {
  std::optional<double> mig;
  std::optional<double> tc;
  std::optional<double> factor_vae_score;
  std::optional<CorrelationResult> correlation;
  std::vector<std::string> warnings;
};

MetricReport compute_metrics(const SampleMatrix& latents, const FactorLabels& factors,
                             const MetricSelection& selection, std::size_t mig_bins,
                             const FactorVaeOptions& fvae);

/// One-sample Kolmogorov-Smirnov statistic of `samples` against the uniform
/// distribution on [lo, hi].
double ks_uniform(std::span<const double> samples, double lo, double hi);

}  // namespace ut
