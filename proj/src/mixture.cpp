#include "ut/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ut/error.hpp"
#include "ut/normal.hpp"

namespace ut {
namespace {

constexpr double logistic_scale = 1.702;
constexpr double quantile_floor = 1e-12;

double logistic(double a) { return 1.0 / (1.0 + std::exp(-a)); }

}  // namespace

MixtureModel::MixtureModel(std::vector<GaussianComponent> components, std::vector<double> thresholds,
                           double bandwidth, std::size_t sample_count, bool collapsed,
                           double weight_tolerance)
    : components_(std::move(components)),
      thresholds_(std::move(thresholds)),
      bandwidth_(bandwidth),
      sample_count_(sample_count),
      collapsed_(collapsed) {
  if (components_.empty()) fail(ErrorKind::integrity, "mixture has no components");
  double total = 0.0;
  for (std::size_t k = 0; k < components_.size(); ++k) {
    const auto& c = components_[k];
    const std::string where = "component " + std::to_string(k);
    if (!std::isfinite(c.weight) || !std::isfinite(c.mean) || !std::isfinite(c.variance)) {
      fail(ErrorKind::integrity, where + " has non-finite parameters");
    }
    if (!(c.weight > 0.0)) fail(ErrorKind::integrity, where + " has non-positive weight");
    if (!(c.variance > 0.0)) fail(ErrorKind::integrity, where + " has non-positive variance");
    if (k > 0 && !(components_[k - 1].mean < c.mean)) {
      fail(ErrorKind::integrity, where + " mean is not strictly increasing");
    }
    total += c.weight;
  }
  if (std::abs(total - 1.0) > weight_tolerance) {
    fail(ErrorKind::integrity, "weights sum to " + std::to_string(total) + ", expected 1");
  }
  if (thresholds_.size() + 1 != components_.size()) {
    fail(ErrorKind::integrity, std::to_string(thresholds_.size()) + " thresholds for " +
                                   std::to_string(components_.size()) + " components");
  }
  for (std::size_t j = 1; j < thresholds_.size(); ++j) {
    if (!(thresholds_[j - 1] < thresholds_[j])) {
      fail(ErrorKind::integrity, "thresholds are not strictly increasing");
    }
  }
  sds_.reserve(components_.size());
  for (const auto& c : components_) sds_.push_back(std::sqrt(c.variance));
}

MixtureModel MixtureModel::from_components(std::vector<GaussianComponent> components) {
  std::sort(components.begin(), components.end(),
            [](const auto& a, const auto& b) { return a.mean < b.mean; });
  std::vector<double> thresholds;
  for (std::size_t k = 1; k < components.size(); ++k) {
    thresholds.push_back(0.5 * (components[k - 1].mean + components[k].mean));
  }
  return MixtureModel(std::move(components), std::move(thresholds), 0.0, 0, false, 1e-9);
}

double MixtureModel::pdf(double z) const {
  double sum = 0.0;
  for (std::size_t k = 0; k < components_.size(); ++k) {
    const double s = (z - components_[k].mean) / sds_[k];
    sum += components_[k].weight * normal_pdf(s) / sds_[k];
  }
  return sum;
}

double MixtureModel::cdf(double z) const {
  double sum = 0.0;
  for (std::size_t k = 0; k < components_.size(); ++k) {
    sum += components_[k].weight * normal_cdf((z - components_[k].mean) / sds_[k]);
  }
  return std::clamp(sum, 0.0, 1.0);
}

double MixtureModel::cdf(double z, const EdgeSmoothing& smoothing) const {
  if (!smoothing.enabled) return cdf(z);
  const double a = logistic_scale / smoothing.temperature;
  double sum = 0.0;
  for (std::size_t k = 0; k < components_.size(); ++k) {
    sum += components_[k].weight * logistic(a * (z - components_[k].mean) / sds_[k]);
  }
  return std::clamp(sum, 0.0, 1.0);
}

double MixtureModel::quantile(double p, const EdgeSmoothing& smoothing) const {
  p = std::clamp(p, quantile_floor, 1.0 - quantile_floor);

  const double a = logistic_scale / smoothing.temperature;
  auto density = [&](double z) {
    if (!smoothing.enabled) return pdf(z);
    double sum = 0.0;
    for (std::size_t k = 0; k < components_.size(); ++k) {
      const double l = logistic(a * (z - components_[k].mean) / sds_[k]);
      sum += components_[k].weight * a / sds_[k] * l * (1.0 - l);
    }
    return sum;
  };

  // The logistic tail at 40 sd is ~1e-30, well past the clamp above.
  const double max_sd = *std::max_element(sds_.begin(), sds_.end());
  const double reach = 40.0 * max_sd * (smoothing.enabled ? std::max(1.0, smoothing.temperature) : 1.0);
  double lo = components_.front().mean - reach;
  double hi = components_.back().mean + reach;

  double x = std::clamp(mean(), lo, hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double err = cdf(x, smoothing) - p;
    if (err == 0.0) return x;
    if (err < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const double slope = density(x);
    double next = slope > 0.0 ? x - err / slope : std::numeric_limits<double>::quiet_NaN();
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) {
      return next;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) {
      return 0.5 * (lo + hi);
    }
    x = next;
  }
  return x;
}

double MixtureModel::mean() const {
  double m = 0.0;
  for (const auto& c : components_) m += c.weight * c.mean;
  return m;
}

double mixture_pdf(const MixtureModel& model, double z) { return model.pdf(z); }

double mixture_cdf(const MixtureModel& model, double z) { return model.cdf(z); }

std::vector<double> mixture_sample(const MixtureModel& model, std::size_t count, Rng& rng,
                                   std::vector<std::size_t>* drawn) {
  const auto& comps = model.components();
  std::vector<double> cumulative(comps.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < comps.size(); ++k) cumulative[k] = acc += comps[k].weight;

  std::vector<double> out(count);
  if (drawn) drawn->resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double u = rng.uniform() * acc;
    auto k = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                                      cumulative.begin());
    k = std::min(k, comps.size() - 1);
    out[i] = comps[k].mean + std::sqrt(comps[k].variance) * rng.normal();
    if (drawn) (*drawn)[i] = k;
  }
  return out;
}

std::vector<double> mixture_sample(const MixtureModel& model, std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  return mixture_sample(model, count, rng);
}

}  // namespace ut
