#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ut/rng.hpp"

namespace ut {

struct GaussianComponent {
  double weight = 1.0;
  double mean = 0.0;
  double variance = 1.0;

  friend bool operator==(const GaussianComponent&, const GaussianComponent&) = default;
};

/// Optional logistic replacement for the per-component Gaussian CDF used by
/// the PIT. Q(z) = 1 / (1 + exp(-1.702 * s / temperature)) with
/// s = (z - mean) / sd. Off by default.
struct EdgeSmoothing {
  bool enabled = false;
  double temperature = 1.0;

  friend bool operator==(const EdgeSmoothing&, const EdgeSmoothing&) = default;
};

/// Reconstructed Gaussian mixture of one latent dimension.
class MixtureModel {
public:
  MixtureModel() = default;

  /// Validates: weights positive and summing to 1 (within `weight_tolerance`),
  /// variances positive, means strictly increasing, thresholds.size() == K - 1.
  MixtureModel(std::vector<GaussianComponent> components, std::vector<double> thresholds,
               double bandwidth, std::size_t sample_count, bool collapsed,
               double weight_tolerance = 1e-12);

  /// Convenience for a ground-truth mixture: sorts by mean, puts thresholds at
  /// midpoints between means, bandwidth 0.
  static MixtureModel from_components(std::vector<GaussianComponent> components);

  const std::vector<GaussianComponent>& components() const noexcept { return components_; }
  const std::vector<double>& thresholds() const noexcept { return thresholds_; }
  double bandwidth() const noexcept { return bandwidth_; }
  std::size_t sample_count() const noexcept { return sample_count_; }
  bool collapsed() const noexcept { return collapsed_; }
  std::size_t k() const noexcept { return components_.size(); }

  double pdf(double z) const;
  double cdf(double z) const;
  /// CDF with the per-component CDF replaced by the smoothing logistic when enabled.
  double cdf(double z, const EdgeSmoothing& smoothing) const;

  /// Inverse of cdf(.., smoothing) by safeguarded Newton on a bracket. p is
  /// clamped to [1e-12, 1 - 1e-12].
  double quantile(double p, const EdgeSmoothing& smoothing = {}) const;

  double mean() const;

  friend bool operator==(const MixtureModel&, const MixtureModel&) = default;

private:
  std::vector<GaussianComponent> components_;
  std::vector<double> thresholds_;
  std::vector<double> sds_;
  double bandwidth_ = 0.0;
  std::size_t sample_count_ = 0;
  bool collapsed_ = false;
};

double mixture_pdf(const MixtureModel& model, double z);
double mixture_cdf(const MixtureModel& model, double z);

/// Draw component k with probability w_k, then z = mean_k + sd_k * xi.
/// `drawn`, when given, receives the 0-based component index of each draw.
std::vector<double> mixture_sample(const MixtureModel& model, std::size_t count, Rng& rng,
                                   std::vector<std::size_t>* drawn = nullptr);
std::vector<double> mixture_sample(const MixtureModel& model, std::size_t count,
                                   std::uint64_t seed);

}  // namespace ut
