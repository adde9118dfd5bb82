#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "levyq/direct_scheme.hpp"
#include "levyq/levy.hpp"

namespace levyq {

enum class SamplingMethod { compound_poisson, variance_gamma, inverse_cdf };

const char* to_string(SamplingMethod method);
SamplingMethod parse_sampling_method(const std::string& name);

struct IncrementSampler {
  LevyModel model;
  double delta = 1.0;
  SamplingMethod method = SamplingMethod::compound_poisson;
  std::uint64_t seed = 0;
};

/// Seed of replication `index` under `root`: two rounds of splitmix64, so the
/// result depends only on (root, index) and never on scheduling order.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) noexcept;

/// n independent copies of L_Delta.
///
/// compound_poisson: gamma Delta + sigma sqrt(Delta) Z + sum of Poisson many
///   jumps, minus Delta int x nu (the exponent is compensated).
/// variance_gamma: theta G + s W(G) with a gamma subordinator G, minus theta
///   Delta, plus the Gaussian part.
/// inverse_cdf: density of L_Delta tabulated by FFT from phi_Delta on
///   +-12 standard deviations (2^16 points), CDF by cumulative trapezoid.
///   The atom exp(-lambda Delta) of a finite-activity model without a
///   Gaussian part is split off and sampled separately.
///
/// Throws Errc::incompatible_method when the method cannot serve the model.
IncrementSample sample_increments(const IncrementSampler& sampler, std::size_t n);

}  // namespace levyq
