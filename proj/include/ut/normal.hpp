#pragma once

#include <cmath>
#include <numbers>

namespace ut {

inline constexpr double inv_sqrt_2pi = 0.3989422804014327;  // 1/sqrt(2*pi)

/// Standard normal density.
inline double normal_pdf(double u) { return inv_sqrt_2pi * std::exp(-0.5 * u * u); }

/// Standard normal CDF via the complementary error function. Using erfc on
/// both tails keeps full relative precision far below the 1e-10 absolute
/// accuracy requirement.
inline double normal_cdf(double u) { return 0.5 * std::erfc(-u * std::numbers::sqrt2 / 2.0); }

}  // namespace ut
