#include "ut/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ut/error.hpp"
#include "ut/rng.hpp"

namespace ut::synth {
namespace {

void require(bool ok, const std::string& path, const std::string& what) {
  if (!ok) fail(ErrorKind::spec, path + ": " + what);
}

void check_simplex(const std::vector<double>& weights, const std::string& path) {
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    require(std::isfinite(weights[i]) && weights[i] > 0.0, path + "[" + std::to_string(i) + "]",
            "weight must be positive");
    total += weights[i];
  }
  require(std::abs(total - 1.0) <= 1e-9, path, "weights sum to " + std::to_string(total) + ", expected 1");
}

}  // namespace

void SynthSpec::validate() const {
  require(n >= 1, "n", "must be at least 1");
  for (std::size_t f = 0; f < factors.size(); ++f) {
    const std::string path = "factors[" + std::to_string(f) + "]";
    require(factors[f].cardinality >= 1, path + ".cardinality", "must be at least 1");
    if (!factors[f].weights.empty()) {
      require(factors[f].weights.size() == static_cast<std::size_t>(factors[f].cardinality),
              path + ".weights", "length must equal cardinality");
      check_simplex(factors[f].weights, path + ".weights");
    }
  }
  for (std::size_t d = 0; d < dimensions.size(); ++d) {
    const std::string path = "dimensions[" + std::to_string(d) + "]";
    std::visit(
        [&](const auto& g) {
          using T = std::decay_t<decltype(g)>;
          if constexpr (std::is_same_v<T, Mixture>) {
            require(!g.components.empty(), path + ".components", "must not be empty");
            std::vector<double> w;
            for (std::size_t k = 0; k < g.components.size(); ++k) {
              const auto& c = g.components[k];
              const std::string cp = path + ".components[" + std::to_string(k) + "]";
              require(std::isfinite(c.mean), cp + ".mean", "must be finite");
              require(std::isfinite(c.variance) && c.variance > 0.0, cp + ".variance", "must be positive");
              w.push_back(c.weight);
            }
            for (std::size_t k = 0; k < w.size(); ++k) {
              require(std::isfinite(w[k]) && w[k] > 0.0,
                      path + ".components[" + std::to_string(k) + "].weight", "must be positive");
            }
            const double total = std::accumulate(w.begin(), w.end(), 0.0);
            require(std::abs(total - 1.0) <= 1e-9, path + ".components",
                    "weights sum to " + std::to_string(total) + ", expected 1");
          } else if constexpr (std::is_same_v<T, Periodic>) {
            require(std::isfinite(g.period) && g.period > 0.0, path + ".period", "must be positive");
            require(std::isfinite(g.noise) && g.noise >= 0.0, path + ".noise", "must be non-negative");
          } else if constexpr (std::is_same_v<T, Constant>) {
            require(std::isfinite(g.value), path + ".value", "must be finite");
          } else {
            require(g.factor < factors.size(), path + ".factor",
                    "refers to factor " + std::to_string(g.factor) + " but only " +
                        std::to_string(factors.size()) + " are declared");
            require(std::isfinite(g.noise) && g.noise >= 0.0, path + ".noise", "must be non-negative");
          }
        },
        dimensions[d]);
  }
}

Dataset generate(const SynthSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  Dataset out;
  out.latents = SampleMatrix(spec.n, spec.dimensions.size());
  out.factors = FactorLabels(spec.n, spec.factors.size());
  out.truth.resize(spec.dimensions.size());

  for (std::size_t f = 0; f < spec.factors.size(); ++f) {
    const auto& fs = spec.factors[f];
    out.factors.set_cardinality(f, fs.cardinality);
    std::vector<double> cumulative;
    double acc = 0.0;
    for (double w : fs.weights) cumulative.push_back(acc += w);
    for (std::size_t i = 0; i < spec.n; ++i) {
      std::int64_t v = 0;
      if (cumulative.empty()) {
        v = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(fs.cardinality)));
      } else {
        const double u = rng.uniform() * acc;
        v = std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin();
        v = std::min<std::int64_t>(v, fs.cardinality - 1);
      }
      out.factors(i, f) = v;
    }
  }

  for (std::size_t d = 0; d < spec.dimensions.size(); ++d) {
    auto col = out.latents.column(d);
    std::visit(
        [&](const auto& g) {
          using T = std::decay_t<decltype(g)>;
          if constexpr (std::is_same_v<T, Mixture>) {
            MixtureModel truth = MixtureModel::from_components(g.components);
            const auto draws = mixture_sample(truth, spec.n, rng);
            std::copy(draws.begin(), draws.end(), col.begin());
            out.truth[d] = std::move(truth);
          } else if constexpr (std::is_same_v<T, Periodic>) {
            for (auto& z : col) z = std::fmod(rng.uniform() * g.period, g.period) + g.noise * rng.normal();
          } else if constexpr (std::is_same_v<T, Constant>) {
            std::fill(col.begin(), col.end(), g.value);
          } else {
            const auto labels = out.factors.column(g.factor);
            for (std::size_t i = 0; i < spec.n; ++i) {
              col[i] = static_cast<double>(labels[i]) + g.noise * rng.normal();
            }
          }
        },
        spec.dimensions[d]);
  }
  return out;
}

}  // namespace ut::synth
