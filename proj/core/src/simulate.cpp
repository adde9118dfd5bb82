#include "levyq/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <variant>

#include "levyq/errors.hpp"

namespace levyq {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double draw_jump(const JumpLaw& law, std::mt19937_64& rng) {
  return std::visit(
      [&](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, DoubleExponentialJumps>) {
          std::uniform_real_distribution<double> coin(0.0, 1.0);
          if (coin(rng) < l.p_up) {
            return std::exponential_distribution<double>(l.rate_up)(rng);
          }
          return -std::exponential_distribution<double>(l.rate_down)(rng);
        } else if constexpr (std::is_same_v<T, NormalJumps>) {
          return std::normal_distribution<double>(l.mean, l.sd)(rng);
        } else {
          throw Error(Errc::incompatible_method,
                      "compound_poisson: no exact sampler for a custom jump law");
        }
      },
      law);
}

std::vector<double> sample_compound_poisson(const IncrementSampler& s,
                                            std::size_t n) {
  const auto& m = s.model;
  double intensity = 0.0;
  const JumpLaw* law = nullptr;
  if (const auto* cp = std::get_if<CompoundPoisson>(&m.jumps)) {
    intensity = cp->intensity;
    law = &cp->law;
    if (std::holds_alternative<CustomJumps>(*law)) {
      throw Error(Errc::incompatible_method,
                  "compound_poisson: no exact sampler for a custom jump law");
    }
  } else if (!std::holds_alternative<NoJumps>(m.jumps)) {
    throw Error(Errc::incompatible_method,
                "compound_poisson method needs a finite jump measure");
  }
  const double drift = s.delta * (m.gamma - first_moment(m.jumps));
  const double vol = std::sqrt(m.sigma2 * s.delta);
  std::mt19937_64 rng(s.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::poisson_distribution<long> count(std::max(intensity * s.delta, 0.0));
  std::vector<double> out(n);
  for (double& y : out) {
    double v = drift + vol * normal(rng);
    if (law != nullptr) {
      const long k = count(rng);
      for (long i = 0; i < k; ++i) v += draw_jump(*law, rng);
    }
    y = v;
  }
  return out;
}

std::vector<double> sample_variance_gamma(const IncrementSampler& s,
                                          std::size_t n) {
  const auto* vg = std::get_if<VarianceGamma>(&s.model.jumps);
  if (vg == nullptr) {
    throw Error(Errc::incompatible_method,
                "variance_gamma method needs a variance gamma model");
  }
  const double drift = s.delta * (s.model.gamma - vg->drift);
  const double vol = std::sqrt(s.model.sigma2 * s.delta);
  std::mt19937_64 rng(s.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::gamma_distribution<double> clock(s.delta / vg->variance_rate,
                                        vg->variance_rate);
  std::vector<double> out(n);
  for (double& y : out) {
    const double g = clock(rng);
    y = drift + vol * normal(rng) + vg->drift * g +
        vg->scale * std::sqrt(g) * normal(rng);
  }
  return out;
}

std::vector<double> sample_inverse_cdf(const IncrementSampler& s, std::size_t n) {
  const auto& m = s.model;
  const double mean = s.delta * m.gamma;
  const double variance = s.delta * (m.sigma2 + second_moment(m.jumps));
  std::mt19937_64 rng(s.seed);
  if (!(variance > 0.0)) return std::vector<double>(n, mean);

  // A finite measure without Gaussian part leaves an atom at the drift.
  double atom = 0.0;
  double atom_at = 0.0;
  if (const auto* cp = std::get_if<CompoundPoisson>(&m.jumps)) {
    if (m.sigma2 == 0.0) {
      atom = std::exp(-cp->intensity * s.delta);
      atom_at = s.delta * (m.gamma - first_moment(m.jumps));
    }
  }

  constexpr std::size_t kPoints = std::size_t{1} << 16;
  const double width = 24.0 * std::sqrt(variance);
  const double dx = width / static_cast<double>(kPoints);
  const double du = 2.0 * kPi / width;
  const FrequencyGrid grid(0.5 * du * static_cast<double>(kPoints), kPoints, true);
  std::vector<cplx> samples(kPoints);
  for (std::size_t j = kPoints / 2; j < kPoints; ++j) {
    const double u = grid.node(j);
    cplx v = characteristic_function(m, s.delta, cplx{u, 0.0});
    if (atom > 0.0) v -= atom * std::polar(1.0, u * atom_at);
    v *= std::polar(1.0, -u * mean);
    samples[j] = v;
    samples[kPoints - 1 - j] = std::conj(v);
  }
  const auto lattice = inverse_fourier_lattice(samples, du, kPoints);

  std::vector<double> cdf(kPoints, 0.0);
  double prev = std::max(lattice.values[0].real(), 0.0);
  for (std::size_t k = 1; k < kPoints; ++k) {
    const double f = std::max(lattice.values[k].real(), 0.0);
    cdf[k] = std::max(cdf[k - 1], cdf[k - 1] + 0.5 * dx * (prev + f));
    prev = f;
  }
  const double total = cdf.back();
  if (!(total > 0.0)) {
    throw Error(Errc::divergence, "inverse_cdf: tabulated density has no mass");
  }

  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<double> out(n);
  for (double& y : out) {
    if (atom > 0.0 && uniform(rng) < atom) {
      y = atom_at;
      continue;
    }
    const double target = uniform(rng) * total;
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), target);
    std::size_t k = static_cast<std::size_t>(it - cdf.begin());
    k = std::clamp<std::size_t>(k, 1, kPoints - 1);
    const double c0 = cdf[k - 1];
    const double c1 = cdf[k];
    const double frac = c1 > c0 ? (target - c0) / (c1 - c0) : 0.5;
    y = mean + lattice.position(k - 1) + frac * dx;
  }
  return out;
}

}  // namespace

const char* to_string(SamplingMethod method) {
  switch (method) {
    case SamplingMethod::compound_poisson: return "compound_poisson";
    case SamplingMethod::variance_gamma: return "variance_gamma";
    case SamplingMethod::inverse_cdf: return "inverse_cdf";
  }
  return "unknown";
}

SamplingMethod parse_sampling_method(const std::string& name) {
  if (name == "compound_poisson") return SamplingMethod::compound_poisson;
  if (name == "variance_gamma") return SamplingMethod::variance_gamma;
  if (name == "inverse_cdf") return SamplingMethod::inverse_cdf;
  throw Error(Errc::parse, "unknown sampling method '" + name + "'");
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(root) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

IncrementSample sample_increments(const IncrementSampler& sampler, std::size_t n) {
  if (!(sampler.delta > 0.0)) throw Error(Errc::domain, "Delta must be > 0");
  if (n == 0) throw Error(Errc::domain, "sample size must be positive");
  validate(sampler.model.jumps);
  std::vector<double> values;
  switch (sampler.method) {
    case SamplingMethod::compound_poisson:
      values = sample_compound_poisson(sampler, n);
      break;
    case SamplingMethod::variance_gamma:
      values = sample_variance_gamma(sampler, n);
      break;
    case SamplingMethod::inverse_cdf:
      values = sample_inverse_cdf(sampler, n);
      break;
  }
  return IncrementSample(std::move(values), sampler.delta);
}

}  // namespace levyq
