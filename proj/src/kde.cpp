#include "ut/kde.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ut/error.hpp"
#include "ut/normal.hpp"

namespace ut {
namespace {

// K(10) ~ 7.7e-23; contributions beyond this are below double resolution of
// any realistic density value.
constexpr double kernel_cutoff = 10.0;

void check_finite(std::span<const double> samples, std::size_t dimension) {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i])) {
      fail(ErrorKind::invalid_input, "non-finite sample at row " + std::to_string(i) +
                                         " in dimension " + std::to_string(dimension));
    }
  }
}

}  // namespace

double gaussian_kernel(double u) { return normal_pdf(u); }

Bandwidth scott_bandwidth(std::span<const double> samples, std::size_t dimension) {
  const std::size_t n = samples.size();
  if (n < 2) {
    fail(ErrorKind::invalid_input, "dimension " + std::to_string(dimension) + ": need at least 2 samples, got " +
                                       std::to_string(n));
  }
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= static_cast<double>(n);

  double ss = 0.0;
  bool all_equal = true;
  for (double x : samples) {
    const double d = x - mean;
    ss += d * d;
    all_equal = all_equal && x == samples[0];
  }
  if (all_equal || ss == 0.0) {
    return {1e-9 * std::max(1.0, std::abs(samples[0])), true};
  }
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  return {std::pow(static_cast<double>(n), -0.2) * sd, false};
}

DensityEstimate estimate_density(std::span<const double> samples, std::size_t grid_size,
                                 std::optional<double> bandwidth_override, std::size_t dimension) {
  if (grid_size < min_grid_size) {
    fail(ErrorKind::invalid_input, "grid size " + std::to_string(grid_size) + " below minimum " +
                                       std::to_string(min_grid_size));
  }
  check_finite(samples, dimension);

  DensityEstimate est;
  Bandwidth bw = scott_bandwidth(samples, dimension);
  if (bandwidth_override) {
    if (!(*bandwidth_override > 0.0) || !std::isfinite(*bandwidth_override)) {
      fail(ErrorKind::invalid_input, "bandwidth override must be positive and finite");
    }
    bw.value = *bandwidth_override;
  }
  const double h = bw.value;
  est.bandwidth = h;
  est.constant = bw.constant;
  est.sample_count = samples.size();

  const auto [min_it, max_it] = std::minmax_element(samples.begin(), samples.end());
  const double start = *min_it - 3.0 * h;
  const double stop = *max_it + 3.0 * h;
  const double step = (stop - start) / static_cast<double>(grid_size - 1);

  est.grid.resize(grid_size);
  for (std::size_t i = 0; i < grid_size; ++i) est.grid[i] = start + step * static_cast<double>(i);
  est.density.assign(grid_size, 0.0);

  // For one sample, the kernel at consecutive grid points satisfies
  //   g[i+1] = g[i] * r[i],  r[i+1] = r[i] * c,  c = exp(-d^2),
  // with d = step / h, so only three exp() calls are needed per direction.
  const double d = step / h;
  const double c = std::exp(-d * d);
  const auto last = static_cast<std::ptrdiff_t>(grid_size - 1);
  const double reach = kernel_cutoff / d;
  double* out = est.density.data();

  for (double x : samples) {
    const double pos = (x - start) / step;
    const auto centre = std::clamp<std::ptrdiff_t>(std::llround(pos), 0, last);
    const auto lo = std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(std::floor(pos - reach)));
    const auto hi = std::min<std::ptrdiff_t>(last, static_cast<std::ptrdiff_t>(std::ceil(pos + reach)));

    const double u0 = (est.grid[centre] - x) / h;
    const double g0 = std::exp(-0.5 * u0 * u0);
    out[centre] += g0;

    // upward: u_{k+1} = u_k + d
    double g = g0;
    double r = std::exp(-(u0 * d + 0.5 * d * d));
    for (std::ptrdiff_t i = centre + 1; i <= hi; ++i) {
      g *= r;
      r *= c;
      out[i] += g;
    }
    // downward: u_{k-1} = u_k - d
    g = g0;
    r = std::exp(u0 * d - 0.5 * d * d);
    for (std::ptrdiff_t i = centre - 1; i >= lo; --i) {
      g *= r;
      r *= c;
      out[i] += g;
    }
  }

  const double norm = inv_sqrt_2pi / (static_cast<double>(samples.size()) * h);
  for (double& v : est.density) v *= norm;
  return est;
}

}  // namespace ut
