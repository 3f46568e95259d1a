#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "ut/matrix.hpp"
#include "ut/mixture.hpp"

namespace ut::synth {

struct Mixture {
  std::vector<GaussianComponent> components;
};

/// Uniform angle on [0, period) plus Gaussian noise.
struct Periodic {
  double period = 1.0;
  double noise = 0.0;
};

struct Constant {
  double value = 0.0;
};

/// Value of factor `factor` plus Gaussian noise.
struct FactorCopy {
  std::size_t factor = 0;
  double noise = 0.0;
};

using Generator = std::variant<Mixture, Periodic, Constant, FactorCopy>;

struct FactorSpec {
  std::int64_t cardinality = 2;
  /// Empty means uniform over classes.
  std::vector<double> weights;
};

struct SynthSpec {
  std::vector<Generator> dimensions;
  std::vector<FactorSpec> factors;
  std::uint64_t seed = 0;
  std::size_t n = 1;

  /// Throws ErrorKind::spec with a field path such as "dimensions[1].components[0].weight".
  void validate() const;
};

struct Dataset {
  SampleMatrix latents;
  FactorLabels factors;
  /// Ground-truth mixture for Mixture dimensions, nullopt elsewhere.
  std::vector<std::optional<MixtureModel>> truth;
};

/// Draws factors first (column by column) and then each latent column in
/// order from a single ut-rng v1 stream seeded with spec.seed.
Dataset generate(const SynthSpec& spec);

}  // namespace ut::synth
