#include "ut/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ut/error.hpp"
#include "ut/rng.hpp"

namespace ut {
namespace {

void check_rows(const SampleMatrix& latents, const FactorLabels& factors) {
  if (latents.rows() != factors.rows()) {
    fail(ErrorKind::shape, "latents have " + std::to_string(latents.rows()) + " rows, factors have " +
                               std::to_string(factors.rows()));
  }
}

std::size_t observed_classes(std::span<const std::int64_t> labels, std::size_t levels) {
  std::vector<char> seen(levels, 0);
  for (auto v : labels) seen[static_cast<std::size_t>(v)] = 1;
  return static_cast<std::size_t>(std::count(seen.begin(), seen.end(), 1));
}

double column_mean(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

}  // namespace

std::vector<std::size_t> equal_count_bins(std::span<const double> column, std::size_t bins) {
  const std::size_t n = column.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return column[a] < column[b]; });

  std::vector<std::size_t> out(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && column[order[j]] == column[order[i]]) ++j;
    const std::size_t bin = i * bins / n;
    for (std::size_t t = i; t < j; ++t) out[order[t]] = bin;
    i = j;
  }
  return out;
}

double discrete_entropy(std::span<const std::int64_t> labels, std::size_t levels) {
  std::vector<std::size_t> counts(levels, 0);
  for (auto v : labels) ++counts[static_cast<std::size_t>(v)];
  const double n = static_cast<double>(labels.size());
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log(p);
  }
  return h;
}

double discrete_mutual_information(std::span<const std::size_t> a, std::size_t a_levels,
                                   std::span<const std::int64_t> b, std::size_t b_levels) {
  const std::size_t n = a.size();
  std::vector<std::size_t> joint(a_levels * b_levels, 0);
  std::vector<std::size_t> ca(a_levels, 0);
  std::vector<std::size_t> cb(b_levels, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto bi = static_cast<std::size_t>(b[i]);
    ++joint[a[i] * b_levels + bi];
    ++ca[a[i]];
    ++cb[bi];
  }
  const double nn = static_cast<double>(n);
  double mi = 0.0;
  for (std::size_t x = 0; x < a_levels; ++x) {
    for (std::size_t y = 0; y < b_levels; ++y) {
      const auto c = joint[x * b_levels + y];
      if (c == 0) continue;
      const double pxy = static_cast<double>(c) / nn;
      mi += pxy * std::log(static_cast<double>(c) * nn / (static_cast<double>(ca[x]) * static_cast<double>(cb[y])));
    }
  }
  return std::max(mi, 0.0);
}

MigResult mutual_information_gap(const SampleMatrix& latents, const FactorLabels& factors,
                                 std::size_t bins) {
  check_rows(latents, factors);
  factors.validate();
  if (bins < 1) fail(ErrorKind::invalid_input, "bins must be positive");
  if (latents.cols() < 1) fail(ErrorKind::invalid_input, "no latent columns");
  const std::size_t n = latents.rows();
  if (n < 10 * bins) {
    fail(ErrorKind::invalid_input, "MIG with " + std::to_string(bins) + " bins needs at least " +
                                       std::to_string(10 * bins) + " rows, got " + std::to_string(n));
  }

  std::vector<std::vector<std::size_t>> binned(latents.cols());
  for (std::size_t c = 0; c < latents.cols(); ++c) binned[c] = equal_count_bins(latents.column(c), bins);

  MigResult result;
  result.per_factor.resize(factors.factors());
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t f = 0; f < factors.factors(); ++f) {
    const auto labels = factors.column(f);
    const auto levels = static_cast<std::size_t>(factors.cardinalities()[f]);
    if (observed_classes(labels, levels) < 2) {
      result.warnings.push_back("factor " + std::to_string(f) + " has a single observed class; excluded from MIG");
      continue;
    }
    const double h = discrete_entropy(labels, levels);
    std::vector<double> mi(latents.cols());
    for (std::size_t c = 0; c < latents.cols(); ++c) {
      mi[c] = discrete_mutual_information(binned[c], bins, labels, levels);
    }
    std::sort(mi.begin(), mi.end(), std::greater<>());
    const double second = mi.size() > 1 ? mi[1] : 0.0;
    const double gap = std::clamp((mi[0] - second) / h, 0.0, 1.0);
    result.per_factor[f] = gap;
    sum += gap;
    ++used;
  }
  if (used == 0) fail(ErrorKind::invalid_input, "every factor was excluded from MIG");
  result.score = std::clamp(sum / static_cast<double>(used), 0.0, 1.0);
  return result;
}

double total_correlation(const SampleMatrix& latents) {
  const std::size_t n = latents.rows();
  const std::size_t d = latents.cols();
  if (d == 0) fail(ErrorKind::invalid_input, "no latent columns");
  if (d == 1) return 0.0;
  if (n <= d) {
    fail(ErrorKind::invalid_input, "total correlation needs more rows (" + std::to_string(n) +
                                       ") than columns (" + std::to_string(d) + ")");
  }

  // Centered columns; zero-variance columns are independent of everything
  // and contribute nothing, so they are left out.
  std::vector<std::vector<double>> centered;
  std::vector<std::size_t> source;
  std::vector<double> var;
  for (std::size_t c = 0; c < d; ++c) {
    const auto x = latents.column(c);
    const double m = column_mean(x);
    std::vector<double> xc(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      xc[i] = x[i] - m;
      ss += xc[i] * xc[i];
    }
    if (ss == 0.0) continue;
    centered.push_back(std::move(xc));
    source.push_back(c);
    var.push_back(ss / static_cast<double>(n - 1));
  }
  const std::size_t k = centered.size();
  if (k < 2) return 0.0;

  // Correlation matrix R = D^-1/2 S D^-1/2. ln det S - sum ln S_jj = ln det R,
  // so TC = -0.5 ln det R. The diagonal ridge is 1e-10 * trace(R) / k.
  std::vector<double> r(k * k, 0.0);
  for (std::size_t a = 0; a < k; ++a) {
    r[a * k + a] = 1.0 + 1e-10;
    for (std::size_t b = 0; b < a; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += centered[a][i] * centered[b][i];
      s /= static_cast<double>(n - 1);
      const double v = s / std::sqrt(var[a] * var[b]);
      r[a * k + b] = r[b * k + a] = v;
    }
  }

  // Cholesky, lower triangle in place. After the ridge a dependent column
  // leaves a pivot of order 1e-10 rather than exactly zero.
  constexpr double singular_pivot = 1e-8;
  double log_det = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    double diag = r[j * k + j];
    for (std::size_t p = 0; p < j; ++p) diag -= r[j * k + p] * r[j * k + p];
    if (!(diag > singular_pivot)) {
      fail(ErrorKind::numeric, "covariance is singular at column " + std::to_string(source[j]) +
                                   " (linearly dependent on earlier columns)");
    }
    const double l = std::sqrt(diag);
    r[j * k + j] = l;
    log_det += 2.0 * std::log(l);
    for (std::size_t i = j + 1; i < k; ++i) {
      double s = r[i * k + j];
      for (std::size_t p = 0; p < j; ++p) s -= r[i * k + p] * r[j * k + p];
      r[i * k + j] = s / l;
    }
  }
  const double diag_sum = static_cast<double>(k) * std::log(1.0 + 1e-10);
  const double tc = 0.5 * (diag_sum - log_det);
  return tc < 0.0 ? 0.0 : tc;
}

double factor_vae_score(const SampleMatrix& latents, const FactorLabels& factors,
                        const FactorVaeOptions& options) {
  check_rows(latents, factors);
  factors.validate();
  if (options.votes < 100) fail(ErrorKind::invalid_input, "factor_vae_score needs at least 100 votes");
  if (options.batch < 2) fail(ErrorKind::invalid_input, "factor_vae_score batch must be at least 2");
  const std::size_t n = latents.rows();
  const std::size_t d = latents.cols();

  std::vector<double> scale(d, 0.0);
  std::vector<std::size_t> active;
  for (std::size_t c = 0; c < d; ++c) {
    const auto x = latents.column(c);
    const double m = column_mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    if (n > 1 && ss > 0.0) {
      scale[c] = 1.0 / std::sqrt(ss / static_cast<double>(n - 1));
      active.push_back(c);
    }
  }
  if (active.empty()) fail(ErrorKind::invalid_input, "every latent column has zero variance");

  // Eligible (factor, class) pairs: classes with at least `batch` members.
  struct Factor {
    std::size_t index;
    std::vector<std::vector<std::size_t>> classes;
  };
  std::vector<Factor> usable;
  for (std::size_t f = 0; f < factors.factors(); ++f) {
    const auto levels = static_cast<std::size_t>(factors.cardinalities()[f]);
    std::vector<std::vector<std::size_t>> members(levels);
    const auto labels = factors.column(f);
    for (std::size_t i = 0; i < n; ++i) members[static_cast<std::size_t>(labels[i])].push_back(i);
    if (observed_classes(labels, levels) < 2) continue;
    Factor fac{f, {}};
    for (auto& m : members) {
      if (m.size() >= options.batch) fac.classes.push_back(std::move(m));
    }
    if (!fac.classes.empty()) usable.push_back(std::move(fac));
  }
  if (usable.empty()) fail(ErrorKind::invalid_input, "no factor class has enough samples for a vote batch");

  const std::size_t m = factors.factors();
  std::vector<std::size_t> vote_dim(options.votes);
  std::vector<std::size_t> vote_factor(options.votes);
  std::vector<double> batch_values(options.batch);
  for (std::size_t v = 0; v < options.votes; ++v) {
    Rng rng(mix_seed(options.seed, v));
    const Factor& fac = usable[rng.below(usable.size())];
    std::vector<std::size_t> pool = fac.classes[rng.below(fac.classes.size())];
    // Partial Fisher-Yates: the first `batch` entries become the sample.
    for (std::size_t i = 0; i < options.batch; ++i) {
      const std::size_t j = i + rng.below(pool.size() - i);
      std::swap(pool[i], pool[j]);
    }

    double best = std::numeric_limits<double>::infinity();
    std::size_t best_dim = active.front();
    for (std::size_t c : active) {
      const auto x = latents.column(c);
      for (std::size_t i = 0; i < options.batch; ++i) batch_values[i] = x[pool[i]] * scale[c];
      const double mean = std::accumulate(batch_values.begin(), batch_values.end(), 0.0) /
                          static_cast<double>(options.batch);
      double ss = 0.0;
      for (double b : batch_values) ss += (b - mean) * (b - mean);
      const double var = ss / static_cast<double>(options.batch - 1);
      if (var < best) {
        best = var;
        best_dim = c;
      }
    }
    vote_dim[v] = best_dim;
    vote_factor[v] = fac.index;
  }

  const std::size_t train = options.votes * 4 / 5;
  std::vector<std::size_t> table(d * m, 0);
  for (std::size_t v = 0; v < train; ++v) ++table[vote_dim[v] * m + vote_factor[v]];
  std::vector<std::size_t> predict(d, 0);
  for (std::size_t c = 0; c < d; ++c) {
    const auto row = table.begin() + static_cast<std::ptrdiff_t>(c * m);
    predict[c] = static_cast<std::size_t>(std::max_element(row, row + static_cast<std::ptrdiff_t>(m)) - row);
  }
  std::size_t correct = 0;
  for (std::size_t v = train; v < options.votes; ++v) correct += predict[vote_dim[v]] == vote_factor[v];
  return static_cast<double>(correct) / static_cast<double>(options.votes - train);
}

CorrelationResult correlation_heatmap(const SampleMatrix& latents, const FactorLabels& factors) {
  check_rows(latents, factors);
  const std::size_t n = latents.rows();
  if (n < 3) fail(ErrorKind::invalid_input, "correlation needs at least 3 rows");

  CorrelationResult out;
  out.latents = latents.cols();
  out.factors = factors.factors();
  out.values.assign(out.latents * out.factors, 0.0);

  std::vector<std::vector<double>> fz(out.factors, std::vector<double>(n));
  std::vector<double> fss(out.factors, 0.0);
  for (std::size_t f = 0; f < out.factors; ++f) {
    const auto y = factors.column(f);
    double m = 0.0;
    for (auto v : y) m += static_cast<double>(v);
    m /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      fz[f][i] = static_cast<double>(y[i]) - m;
      fss[f] += fz[f][i] * fz[f][i];
    }
    if (fss[f] == 0.0) out.zero_variance_factors.push_back(f);
  }

  std::vector<double> xc(n);
  for (std::size_t c = 0; c < out.latents; ++c) {
    const auto x = latents.column(c);
    const double m = column_mean(x);
    double xss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      xc[i] = x[i] - m;
      xss += xc[i] * xc[i];
    }
    if (xss == 0.0) {
      out.zero_variance_latents.push_back(c);
      continue;
    }
    for (std::size_t f = 0; f < out.factors; ++f) {
      if (fss[f] == 0.0) continue;
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += xc[i] * fz[f][i];
      out.values[c * out.factors + f] = std::clamp(s / std::sqrt(xss * fss[f]), -1.0, 1.0);
    }
  }
  return out;
}

MetricReport compute_metrics(const SampleMatrix& latents, const FactorLabels& factors,
                             const MetricSelection& selection, std::size_t mig_bins,
                             const FactorVaeOptions& fvae) {
  MetricReport report;
  if (selection.mig) {
    auto r = mutual_information_gap(latents, factors, mig_bins);
    report.mig = r.score;
    report.warnings.insert(report.warnings.end(), r.warnings.begin(), r.warnings.end());
  }
  if (selection.tc) report.tc = total_correlation(latents);
  if (selection.factor_vae) report.factor_vae_score = factor_vae_score(latents, factors, fvae);
  if (selection.correlation) {
    report.correlation = correlation_heatmap(latents, factors);
    for (auto c : report.correlation->zero_variance_latents) {
      report.warnings.push_back("latent " + std::to_string(c) + " has zero variance; correlations set to 0");
    }
  }
  return report;
}

double ks_uniform(std::span<const double> samples, double lo, double hi) {
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = std::clamp((s[i] - lo) / (hi - lo), 0.0, 1.0);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

}  // namespace ut
