#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "levyq/errors.hpp"
#include "levyq/simulate.hpp"

using namespace levyq;

namespace {

struct Moments {
  double mean;
  double var;
  double mean_se;
  double var_se;
};

Moments moments(const IncrementSample& s) {
  const auto v = s.values();
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double m2 = 0.0;
  double m4 = 0.0;
  for (double y : v) {
    const double d = (y - mean) * (y - mean);
    m2 += d;
    m4 += d * d;
  }
  m2 /= n;
  m4 /= n;
  return {mean, m2, std::sqrt(m2 / n), std::sqrt((m4 - m2 * m2) / n)};
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

LevyModel two_exponential() { return {0.0, 2.0, CompoundPoisson{2.0, exponential_jumps(1.0)}}; }

}  // namespace

TEST(Simulate, BrownianMoments) {
  const LevyModel m{0.09, 1.0, NoJumps{}};
  const auto s = sample_increments({m, 0.1, SamplingMethod::compound_poisson, 5}, 100000);
  const auto mo = moments(s);
  EXPECT_NEAR(mo.mean, 0.1, 5 * mo.mean_se);
  EXPECT_NEAR(mo.var, 0.009, 5 * mo.var_se);
}

TEST(Simulate, CompoundPoissonMean) {
  const auto s = sample_increments({two_exponential(), 0.5, SamplingMethod::compound_poisson, 6}, 100000);
  const auto mo = moments(s);
  EXPECT_NEAR(mo.mean, 1.0, 5 * mo.mean_se);
  EXPECT_NEAR(mo.var, 0.5 * second_moment(two_exponential().jumps), 5 * mo.var_se);
}

TEST(Simulate, InverseCdfAgreesWithExactSampler) {
  const auto exact = sample_increments({two_exponential(), 0.5, SamplingMethod::compound_poisson, 8}, 100000);
  const auto inv = sample_increments({two_exponential(), 0.5, SamplingMethod::inverse_cdf, 9}, 100000);
  const std::vector<double> a(exact.values().begin(), exact.values().end());
  const std::vector<double> b(inv.values().begin(), inv.values().end());
  EXPECT_LT(ks_distance(a, b), 0.01);
}

TEST(Simulate, SecondMomentForEveryMethod) {
  const double delta = 0.25;
  struct Case {
    LevyModel model;
    SamplingMethod method;
  };
  const std::vector<Case> cases{
      {{0.04, 0.0, CompoundPoisson{3.0, NormalJumps{0.1, 0.2}}}, SamplingMethod::compound_poisson},
      {{0.0, 0.0, VarianceGamma{0.2, -0.1, 0.3}}, SamplingMethod::variance_gamma},
      {{0.01, 0.0, VarianceGamma{0.2, -0.1, 0.3}}, SamplingMethod::inverse_cdf},
      {{0.01, 0.0, Cgmy{1.0, 5.0, 8.0, 0.5}}, SamplingMethod::inverse_cdf},
      {{0.04, 0.5, CompoundPoisson{3.0, NormalJumps{0.1, 0.2}}}, SamplingMethod::inverse_cdf},
  };
  std::uint64_t seed = 40;
  for (const auto& c : cases) {
    const auto s = sample_increments({c.model, delta, c.method, ++seed}, 100000);
    const auto mo = moments(s);
    const double expected = delta * (c.model.sigma2 + second_moment(c.model.jumps));
    EXPECT_NEAR(mo.var, expected, 5 * mo.var_se) << to_string(c.method);
  }
}

TEST(Simulate, Reproducible) {
  for (auto method : {SamplingMethod::compound_poisson, SamplingMethod::inverse_cdf}) {
    const IncrementSampler sampler{two_exponential(), 0.5, method, 1234};
    const auto a = sample_increments(sampler, 2000);
    const auto b = sample_increments(sampler, 2000);
    EXPECT_TRUE(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
  }
}

TEST(Simulate, IncompatibleMethods) {
  auto expect_incompatible = [](const IncrementSampler& s) {
    try {
      sample_increments(s, 10);
      ADD_FAILURE() << to_string(s.method);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::incompatible_method);
    }
  };
  expect_incompatible({{0.0, 0.0, Cgmy{}}, 1.0, SamplingMethod::compound_poisson, 1});
  expect_incompatible({two_exponential(), 1.0, SamplingMethod::variance_gamma, 1});
}

TEST(Simulate, SeedDerivationIsOrderFreeAndDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(42, i));
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_EQ(derive_seed(42, 17), derive_seed(42, 17));
  EXPECT_NE(derive_seed(42, 17), derive_seed(43, 17));
}

TEST(Simulate, MethodNamesRoundTrip) {
  for (auto m : {SamplingMethod::compound_poisson, SamplingMethod::variance_gamma, SamplingMethod::inverse_cdf}) {
    EXPECT_EQ(parse_sampling_method(to_string(m)), m);
  }
  EXPECT_THROW(parse_sampling_method("shot_noise"), Error);
}
