#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "ut/error.hpp"
#include "ut/metrics.hpp"
#include "ut/rng.hpp"

using namespace ut;

namespace {

struct Data {
  SampleMatrix latents;
  FactorLabels factors;
};

// Factor f is copied (plus noise) into latent f; the remaining latents are noise.
Data disentangled(std::size_t n, std::vector<std::int64_t> cards, std::size_t noise_dims, double noise,
                  std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<std::int64_t>> f(cards.size(), std::vector<std::int64_t>(n));
  std::vector<std::vector<double>> z(cards.size() + noise_dims, std::vector<double>(n));
  for (std::size_t j = 0; j < cards.size(); ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      f[j][i] = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(cards[j])));
      z[j][i] = static_cast<double>(f[j][i]) + noise * rng.normal();
    }
  }
  for (std::size_t j = cards.size(); j < z.size(); ++j) {
    for (auto& v : z[j]) v = rng.normal();
  }
  auto labels = FactorLabels::from_columns(f);
  for (std::size_t j = 0; j < cards.size(); ++j) labels.set_cardinality(j, cards[j]);
  return {SampleMatrix::from_columns(z), labels};
}

Data independent(std::size_t n, std::size_t m, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<std::int64_t>> f(m, std::vector<std::int64_t>(n));
  for (auto& c : f) for (auto& v : c) v = static_cast<std::int64_t>(rng.below(5));
  std::vector<std::vector<double>> z(d, std::vector<double>(n));
  for (auto& c : z) for (auto& v : c) v = rng.normal();
  return {SampleMatrix::from_columns(z), FactorLabels::from_columns(f)};
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("equal-count bins") {
    const std::vector<double> x{5.0, 1.0, 3.0, 2.0, 4.0, 0.0};
    CHECK(equal_count_bins(x, 3) == std::vector<std::size_t>{2, 0, 1, 1, 2, 0});
    const std::vector<double> ties{1.0, 1.0, 1.0, 1.0, 2.0, 2.0};
    const auto b = equal_count_bins(ties, 3);
    CHECK(b[0] == b[3]);
    CHECK(b[4] == b[5]);
  }

  TEST_CASE("mutual information agrees with a map-based oracle") {
    Rng rng(1);
    std::vector<std::size_t> a(3000);
    std::vector<std::int64_t> b(3000);
    for (std::size_t i = 0; i < a.size(); ++i) {
      b[i] = static_cast<std::int64_t>(rng.below(4));
      a[i] = rng.uniform() < 0.6 ? static_cast<std::size_t>(b[i]) : rng.below(6);
    }
    CHECK(discrete_mutual_information(a, 6, b, 4) == doctest::Approx(oracle::plugin_mi(a, b)).epsilon(1e-12));
    CHECK(discrete_entropy(b, 4) == doctest::Approx(oracle::plugin_mi(b, b)).epsilon(1e-12));
  }

  TEST_CASE("MIG: copied factor") {
    Rng rng(3);
    const std::size_t n = 10000;
    std::vector<std::int64_t> f(n);
    std::vector<std::vector<double>> z(4, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
      f[i] = static_cast<std::int64_t>(rng.below(10));
      z[0][i] = static_cast<double>(f[i]);
      for (std::size_t j = 1; j < 4; ++j) z[j][i] = rng.normal();
    }
    const auto score = mig(SampleMatrix::from_columns(z), FactorLabels::from_columns({f}));
    CHECK(score >= 0.95);
  }

  TEST_CASE("MIG: independent latents") {
    const auto d = independent(10000, 3, 6, 4);
    CHECK(mig(d.latents, d.factors, 20) <= 0.05);
  }

  TEST_CASE("MIG: duplicated informative latent has no gap") {
    Rng rng(5);
    std::vector<std::int64_t> f(5000);
    std::vector<double> z(5000);
    for (std::size_t i = 0; i < f.size(); ++i) {
      f[i] = static_cast<std::int64_t>(rng.below(10));
      z[i] = static_cast<double>(f[i]);
    }
    CHECK(mig(SampleMatrix::from_columns({z, z}), FactorLabels::from_columns({f})) == 0.0);
  }

  TEST_CASE("MIG: strictly increasing maps leave it unchanged") {
    const auto d = disentangled(5000, {4, 6}, 2, 0.3, 8);
    SampleMatrix warped = d.latents;
    for (std::size_t c = 0; c < warped.cols(); ++c) {
      for (auto& v : warped.column(c)) v = std::exp(0.7 * v) + 3.0 * v;
    }
    CHECK(mig(warped, d.factors) == mig(d.latents, d.factors));
  }

  TEST_CASE("MIG: degenerate factors") {
    const auto d = disentangled(1000, {3}, 1, 0.1, 2);
    std::vector<std::int64_t> constant(1000, 0);
    const auto with_constant = FactorLabels::from_columns(
        {std::vector<std::int64_t>(d.factors.column(0).begin(), d.factors.column(0).end()), constant});
    const auto r = mutual_information_gap(d.latents, with_constant, 20);
    CHECK_FALSE(r.per_factor[1].has_value());
    CHECK(r.warnings.size() == 1);
    CHECK_THROWS_AS(mig(d.latents, FactorLabels::from_columns({constant})), Error);
    CHECK_THROWS_AS(mig(d.latents, d.factors, 200), Error);  // n < 10 * bins
  }

  TEST_CASE("TC: independent columns") {
    const auto d = independent(100000, 1, 4, 9);
    CHECK(total_correlation(d.latents) <= 0.01);
  }

  TEST_CASE("TC: bivariate closed form") {
    Rng rng(10);
    const double rho = 0.5;
    std::vector<double> a(100000), b(100000);
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = rng.normal();
      b[i] = rho * a[i] + std::sqrt(1 - rho * rho) * rng.normal();
    }
    CHECK(std::abs(total_correlation(SampleMatrix::from_columns({a, b})) - 0.14384103622589046) <= 0.01);
  }

  TEST_CASE("TC: single column and affine invariance") {
    const auto d = independent(500, 1, 1, 1);
    CHECK(total_correlation(d.latents) == 0.0);

    Rng rng(11);
    std::vector<double> a(3000), b(3000), c(3000);
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = rng.normal();
      b[i] = a[i] + rng.normal();
      c[i] = b[i] - 0.3 * a[i] + rng.normal();
    }
    const auto m = SampleMatrix::from_columns({a, b, c});
    auto scaled = m;
    const double scale[] = {1000.0, -0.002, 7.0};
    const double shift[] = {5.0, -100.0, 0.25};
    for (std::size_t j = 0; j < 3; ++j) {
      for (auto& v : scaled.column(j)) v = scale[j] * v + shift[j];
    }
    CHECK(std::abs(total_correlation(m) - total_correlation(scaled)) <= 1e-9);
  }

  TEST_CASE("TC: singular and constant columns") {
    Rng rng(12);
    std::vector<double> a(200);
    for (auto& v : a) v = rng.normal();
    try {
      total_correlation(SampleMatrix::from_columns({a, a}));
      FAIL("expected numeric error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::numeric);
      CHECK(std::string(e.what()).find("column 1") != std::string::npos);
    }
    std::vector<double> b(200);
    for (auto& v : b) v = rng.normal();
    const double base = total_correlation(SampleMatrix::from_columns({a, b}));
    CHECK(total_correlation(SampleMatrix::from_columns({a, std::vector<double>(200, 3.0), b})) == base);
  }

  TEST_CASE("FactorVAE: disentangled data scores high") {
    const auto d = disentangled(10000, {5, 4, 6}, 3, 0.01, 13);
    CHECK(factor_vae_score(d.latents, d.factors) >= 0.95);
  }

  TEST_CASE("FactorVAE: independent data is near chance") {
    const auto d = independent(10000, 5, 10, 14);
    const double s = factor_vae_score(d.latents, d.factors, {800, 64, 3});
    CHECK(std::abs(s - 0.2) <= 0.1);
  }

  TEST_CASE("FactorVAE: determinism, scale invariance and preconditions") {
    const auto d = disentangled(4000, {3, 3}, 2, 0.5, 15);
    const FactorVaeOptions opt{400, 32, 21};
    const double s = factor_vae_score(d.latents, d.factors, opt);
    CHECK(s == factor_vae_score(d.latents, d.factors, opt));
    auto scaled = d.latents;
    for (std::size_t c = 0; c < scaled.cols(); ++c) {
      for (auto& v : scaled.column(c)) v *= 0.25 + static_cast<double>(c);
    }
    CHECK(factor_vae_score(scaled, d.factors, opt) == s);
    CHECK_THROWS_AS(factor_vae_score(d.latents, d.factors, {0, 64, 1}), Error);
    CHECK_THROWS_AS(factor_vae_score(d.latents, d.factors, {800, 5000, 1}), Error);
  }

  TEST_CASE("correlation heatmap") {
    Rng rng(16);
    std::vector<std::int64_t> f(10000);
    std::vector<double> same(10000), neg(10000), noise(10000), flat(10000, 2.0);
    for (std::size_t i = 0; i < f.size(); ++i) {
      f[i] = static_cast<std::int64_t>(rng.below(7));
      same[i] = static_cast<double>(f[i]);
      neg[i] = -same[i];
      noise[i] = rng.normal();
    }
    const auto r = correlation_heatmap(SampleMatrix::from_columns({same, neg, noise, flat}),
                                       FactorLabels::from_columns({f}));
    CHECK(r.at(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.at(1, 0) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(std::abs(r.at(2, 0)) <= 0.05);
    CHECK(r.at(3, 0) == 0.0);
    CHECK(r.zero_variance_latents == std::vector<std::size_t>{3});
    for (double v : r.values) {
      CHECK(v >= -1.0);
      CHECK(v <= 1.0);
    }
  }

  TEST_CASE("ks statistic") {
    std::vector<double> grid;
    for (int i = 0; i < 100; ++i) grid.push_back(-4.0 + 8.0 * (i + 0.5) / 100.0);
    CHECK(ks_uniform(grid, -4.0, 4.0) == doctest::Approx(0.005));
    const std::vector<double> lumped(10, 0.0);
    CHECK(ks_uniform(lumped, -4.0, 4.0) == doctest::Approx(0.5));
  }
}
