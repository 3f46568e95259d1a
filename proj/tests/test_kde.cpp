#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "ut/error.hpp"
#include "ut/kde.hpp"
#include "ut/rng.hpp"

using namespace ut;

namespace {

std::vector<double> normal_draws(std::size_t n, std::uint64_t seed, double mean = 0.0, double sd = 1.0) {
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& x : out) x = mean + sd * rng.normal();
  return out;
}

double trapezoid(const DensityEstimate& e) {
  double s = 0.0;
  for (std::size_t i = 1; i < e.grid.size(); ++i) {
    s += 0.5 * (e.density[i] + e.density[i - 1]) * (e.grid[i] - e.grid[i - 1]);
  }
  return s;
}

}  // namespace

TEST_SUITE("kde") {
  TEST_CASE("scott bandwidth follows n^(-1/5) * sd") {
    // Two-point set {-a, a} padded to n points with known sd is awkward; build
    // an exact set instead: n = 100000 values alternating +-2 has unbiased sd
    // 2 * sqrt(n / (n - 1)).
    const std::size_t n = 100000;
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = i % 2 ? 2.0 : -2.0;
    const double sd = 2.0 * std::sqrt(static_cast<double>(n) / static_cast<double>(n - 1));
    const auto bw = scott_bandwidth(x);
    CHECK_FALSE(bw.constant);
    CHECK(bw.value == doctest::Approx(0.1 * sd).epsilon(1e-12));
    CHECK(bw.value == doctest::Approx(0.2).epsilon(1e-4));
  }

  TEST_CASE("scott bandwidth rejects a single sample") {
    const std::vector<double> one{1.0};
    CHECK_THROWS_AS(scott_bandwidth(one, 3), Error);
    try {
      scott_bandwidth(one, 3);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::invalid_input);
      CHECK(std::string(e.what()).find("dimension 3") != std::string::npos);
    }
  }

  TEST_CASE("constant samples hit the bandwidth floor") {
    const std::vector<double> x(32, 5.0);
    const auto bw = scott_bandwidth(x);
    CHECK(bw.constant);
    CHECK(bw.value == doctest::Approx(5e-9));
    const std::vector<double> small(32, 0.25);
    CHECK(scott_bandwidth(small).value == doctest::Approx(1e-9));
  }

  TEST_CASE("scale covariance of the bandwidth") {
    const auto x = normal_draws(5000, 11);
    std::vector<double> y(x);
    for (auto& v : y) v *= 3.5;
    CHECK(scott_bandwidth(y).value == doctest::Approx(3.5 * scott_bandwidth(x).value).epsilon(1e-12));
  }

  TEST_CASE("gaussian kernel values") {
    CHECK(gaussian_kernel(0.0) == doctest::Approx(0.3989422804).epsilon(1e-10));
    CHECK(gaussian_kernel(1.0) == doctest::Approx(0.241970724519143).epsilon(1e-12));
    CHECK(gaussian_kernel(-1.0) == gaussian_kernel(1.0));
    CHECK(gaussian_kernel(0.3) < gaussian_kernel(0.0));
  }

  TEST_CASE("kernel has unit mass on [-8, 8]") {
    const double mass = oracle::simpson([](double u) { return gaussian_kernel(u); }, -8.0, 8.0, 4000);
    CHECK(mass >= 1.0 - 1e-6);
    CHECK(mass <= 1.0 + 1e-12);
  }

  TEST_CASE("grid layout") {
    const std::vector<double> x{-1.0, 0.5, 2.0};
    const auto e = estimate_density(x, 64, 0.5);
    REQUIRE(e.grid.size() == 64);
    CHECK(e.grid.front() == doctest::Approx(-2.5));
    CHECK(e.grid.back() == doctest::Approx(3.5));
    const double step = e.spacing();
    for (std::size_t i = 1; i < e.grid.size(); ++i) {
      CHECK(std::abs((e.grid[i] - e.grid[i - 1]) - step) <= 1e-9 * step);
    }
    CHECK(e.sample_count == 3);
    CHECK(e.bandwidth == 0.5);
  }

  TEST_CASE("small hand examples") {
    {
      const std::vector<double> x{0.0, 0.0001};
      const auto e = estimate_density(x, 1025, 1.0);
      // grid midpoint sits at 0.00005
      CHECK(e.density[512] == doctest::Approx(0.3989422).epsilon(1e-6));
    }
    {
      const std::vector<double> x{-1.0, 1.0};
      const auto e = estimate_density(x, 1025, 1.0);
      CHECK(e.grid[512] == doctest::Approx(0.0).epsilon(1e-12));
      CHECK(e.density[512] == doctest::Approx(0.2419707245).epsilon(1e-9));
    }
  }

  TEST_CASE("matches direct summation") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      auto x = normal_draws(2000, seed);
      for (std::size_t i = 0; i < 300; ++i) x.push_back(6.0 + 0.1 * x[i]);
      const auto e = estimate_density(x, 1024);
      const double peak = *std::max_element(e.density.begin(), e.density.end());
      double worst = 0.0;
      for (std::size_t i = 0; i < e.grid.size(); i += 7) {
        worst = std::max(worst, std::abs(e.density[i] - oracle::direct_kde(x, e.bandwidth, e.grid[i])));
      }
      CHECK(worst <= 1e-9 * peak);
    }
  }

  TEST_CASE("density of 10000 standard normal draws") {
    const auto x = normal_draws(10000, 2024);
    const auto e = estimate_density(x, 1024);
    const auto it = std::lower_bound(e.grid.begin(), e.grid.end(), 0.0);
    const auto i = static_cast<std::size_t>(it - e.grid.begin());
    // linear interpolation at 0
    const double t = (0.0 - e.grid[i - 1]) / (e.grid[i] - e.grid[i - 1]);
    const double f0 = e.density[i - 1] + t * (e.density[i] - e.density[i - 1]);
    CHECK(std::abs(f0 - 0.3989) <= 0.03);
  }

  TEST_CASE("normalization and non-negativity") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      auto x = normal_draws(100 + 300 * seed, seed, 0.0, 1.0 + static_cast<double>(seed));
      const auto e = estimate_density(x, 1024);
      for (double f : e.density) CHECK(f >= 0.0);
      const double mass = trapezoid(e);
      CHECK(mass >= 0.99);
      CHECK(mass <= 1.01);
    }
  }

  TEST_CASE("shift equivariance") {
    const auto x = normal_draws(3000, 5);
    std::vector<double> y(x);
    for (auto& v : y) v += 2.75;
    const auto a = estimate_density(x, 512);
    const auto b = estimate_density(y, 512);
    CHECK(a.bandwidth == doctest::Approx(b.bandwidth).epsilon(1e-12));
    for (std::size_t i = 0; i < a.grid.size(); ++i) {
      CHECK(b.grid[i] == doctest::Approx(a.grid[i] + 2.75).epsilon(1e-12));
      CHECK(std::abs(a.density[i] - b.density[i]) <= 1e-12);
    }
  }

  TEST_CASE("input validation") {
    const std::vector<double> x{0.0, 1.0, NAN, 2.0};
    try {
      estimate_density(x, 64);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::invalid_input);
      CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }
    const std::vector<double> ok{0.0, 1.0};
    CHECK_THROWS_AS(estimate_density(ok, 15), Error);
    CHECK_THROWS_AS(estimate_density(ok, 64, -1.0), Error);
  }
}
