#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "levyq/config.hpp"
#include "levyq/errors.hpp"
#include "levyq/lepski.hpp"
#include "levyq/pipeline.hpp"
#include "levyq/simulate.hpp"
#include "oracles.hpp"

using namespace levyq;

namespace {

constexpr double kT = 0.25;

LevyModel paper_model() { return LevyModel::martingale(0.01, Cgmy{1.0, 5.0, 8.0, 0.5}); }

template <class F>
void expect_error(Errc code, F&& f) {
  try {
    f();
    ADD_FAILURE() << "no error thrown";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

// phi~ = exp(-u^2/8) on a midpoint grid, everything trusted.
OptionSpectra gaussian_spectra(double cutoff) {
  const auto grid = FrequencyGrid::with_spacing(cutoff, 0.01);
  OptionSpectra s{grid, kT, {}, {}, {}, {}};
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double u = grid.node(j);
    s.phi.push_back(std::exp(-u * u / 8.0));
    s.psi1.push_back(-0.25 * u);
    s.psi2.push_back(-0.25);
    s.trusted.push_back(true);
  }
  return s;
}

struct ChainFixture {
  OptionChain chain;
  NoiseProfile noise;
  SplineOptionFunction spline;
  OptionSpectra spectra;
};

ChainFixture chain_fixture(std::size_t n, double noise_fraction, std::uint64_t seed,
                           double cutoff, double spacing = 0.05) {
  auto chain = generate_synthetic_chain(paper_model(), kT, 0.06, n, noise_fraction, StrikeLaw{}, seed);
  auto noise = estimate_noise_profile(chain);
  SplineOptionFunction spline(chain);
  const TrustRegion trust{static_cast<double>(n), std::max(noise.weighted_l2, 1e-6)};
  auto spectra = sample_option_spectra(spline, kT, FrequencyGrid::with_spacing(cutoff, spacing), trust);
  return {std::move(chain), std::move(noise), std::move(spline), std::move(spectra)};
}

SigmaInputs inputs(const OptionSpectra& s, const SpectralKernel& k, std::array<double, 3> norms, double n) {
  SigmaInputs in;
  in.spectra = &s;
  in.kernel = &k;
  in.sup_norms = norms;
  in.n = n;
  in.x_max = 5.0;
  return in;
}

LepskiCandidate candidate(double h, double q, double half_width) {
  // Multiplier at n = 100, delta = 0.1 scales sigma into V.
  return {h, q, 1.0, half_width / lepski_multiplier(100.0, 0.1)};
}

}  // namespace

TEST(BandwidthGrid, StartsAtOneOverN) {
  const double n = 1e6;
  const auto grid = build_grid(n, GridSettings{1.1, 0.0, false}, [](double) { return 0.0; });
  EXPECT_EQ(grid.j_min, 0);
  EXPECT_EQ(grid.values.front(), 1.0 / n);
  for (std::size_t i = 1; i < grid.size(); ++i) EXPECT_GT(grid.values[i], grid.values[i - 1]);
  const double top = std::pow(std::log(n), -5.0);
  EXPECT_GE(grid.values.back(), top);
  EXPECT_LT(grid.values.back(), 1.1 * top);
  EXPECT_EQ(grid.j_max, top_index(n, 1.1, top));
}

TEST(BandwidthGrid, AsymptoticTopIsBelowOneOverNAtSmallN) {
  // (log 100)^-5 < 1/100, so no h = L^j / n with j >= 0 fits under it.
  expect_error(Errc::empty_grid, [] { build_grid(100.0, GridSettings{1.1, 0.0, false}, [](double) { return 0.0; }); });
  const auto grid = build_grid(100.0, GridSettings{1.1, 0.5, false}, [](double) { return 0.0; });
  EXPECT_GE(grid.values.back(), 0.5);
  EXPECT_LT(grid.values.back(), 0.55);
}

TEST(BandwidthGrid, CutIsFirstIndexWithStatisticAtMostOne) {
  const double n = 100.0;
  const auto grid = build_grid(n, GridSettings{1.1, 0.5, true}, [](double h) { return 0.1 / h; });
  const int expected = static_cast<int>(std::ceil(std::log(0.1 * n) / std::log(1.1) - 1e-12));
  EXPECT_EQ(grid.j_min, expected);
  EXPECT_LE(grid.statistics[grid.j_min], 1.0);
  EXPECT_GT(grid.statistics[grid.j_min - 1], 1.0);
  EXPECT_TRUE(grid.cut_in_band);
  EXPECT_NEAR(grid.values.front(), std::pow(1.1, expected) / n, 1e-15);

  const auto jumped = build_grid(n, GridSettings{1.1, 0.5, true}, [](double h) { return h < 0.1 ? 5.0 : 0.1; });
  EXPECT_FALSE(jumped.cut_in_band);
  EXPECT_GE(jumped.values.front(), 0.1);

  expect_error(Errc::empty_grid, [&] { build_grid(n, GridSettings{1.1, 0.5, true}, [](double) { return 2.0; }); });
  expect_error(Errc::domain, [&] { build_grid(5.0, GridSettings{}, [](double) { return 0.0; }); });
  expect_error(Errc::domain, [&] { build_grid(n, GridSettings{1.0, 0.5, true}, [](double) { return 0.0; }); });
}

TEST(CutStatistic, NonincreasingInBandwidth) {
  const auto s = gaussian_spectra(40.0);
  double prev = std::numeric_limits<double>::infinity();
  for (int j = 0; j < 60; ++j) {
    const double h = std::pow(1.1, j) / 100.0;
    const double v = cut_statistic(s, 100.0, h);
    EXPECT_LE(v, prev) << "h=" << h;
    prev = v;
  }
  const auto f = chain_fixture(100, 0.01, 5, 100.0);
  prev = std::numeric_limits<double>::infinity();
  for (int j = 0; j < 60; ++j) {
    const double v = cut_statistic(f.spectra, 100.0, std::pow(1.1, j) / 100.0, 0.01);
    EXPECT_LE(v, prev);
    prev = v;
  }
}

TEST(CutStatistic, MatchesClosedFormOnGaussianSpectrum) {
  const auto s = gaussian_spectra(40.0);
  const double h = 0.5;
  const double integral = oracle::gauss_kronrod(
      [](double u) { return (1.0 + std::pow(u, 4)) * std::exp(u * u / 4.0); }, -2.0, 2.0);
  const double n = 400.0;
  const double expected = std::pow(std::log(n), 2) / std::sqrt(n) * std::sqrt(integral);
  EXPECT_NEAR(cut_statistic(s, n, h), expected, 1e-4 * expected);
  EXPECT_NEAR(cut_statistic(s, n, h, 3.0), 3.0 * expected, 3e-4 * expected);
}

TEST(TailWeightTransform, MatchesQuadrature) {
  for (double t : {0.1, 0.35, -0.2}) {
    for (double u : {0.0, 1.5, -7.0, 30.0}) {
      const double lo = t > 0 ? t : -5.0;
      const double hi = t > 0 ? 5.0 : t;
      const cplx expected = oracle::complex_integral(
          [&](double x) { return std::exp(cplx(0.0, -u * x)) / (x * x); }, lo, hi, 0.02);
      const cplx got = tail_weight_transform(t, u, 5.0);
      EXPECT_LT(std::abs(got - expected), 1e-9 * (1 + std::abs(expected))) << "t=" << t << " u=" << u;
    }
  }
  EXPECT_EQ(tail_weight_transform(6.0, 1.0, 5.0), cplx(0.0));
  EXPECT_THROW(tail_weight_transform(0.0, 1.0, 5.0), Error);
}

TEST(SigmaTilde, ScalesWithInverseRootN) {
  const auto s = gaussian_spectra(20.0);
  const auto k = SpectralKernel::flat_top(0.5);
  const double a = sigma_tilde(inputs(s, k, {1.0, 0.5, 0.2}, 100.0), 0.2, 0.1);
  const double b = sigma_tilde(inputs(s, k, {1.0, 0.5, 0.2}, 200.0), 0.2, 0.1);
  EXPECT_GT(a, 0.0);
  EXPECT_NEAR(b / a, 1.0 / std::sqrt(2.0), 1e-14);
}

TEST(SigmaTilde, NonincreasingInBandwidthAtFixedJumpSize) {
  const auto k = SpectralKernel::flat_top(0.5);
  std::vector<ChainFixture> fixtures;
  for (std::uint64_t seed : {1u, 2u, 3u}) fixtures.push_back(chain_fixture(100, 0.01, seed, 100.0));
  fixtures.push_back(chain_fixture(1000, 0.0, 1, 100.0));
  for (const auto& f : fixtures) {
    const auto in = inputs(f.spectra, k, f.noise.sup_norms, static_cast<double>(f.chain.size()));
    for (double t : {-0.15, 0.08}) {
      double prev = std::numeric_limits<double>::infinity();
      for (int j = 0; j < 40; ++j) {
        const double h = 0.02 * std::pow(1.1, j);
        double v = 0.0;
        try {
          v = sigma_tilde(in, h, t);
        } catch (const Error& e) {
          ASSERT_EQ(e.code(), Errc::guard_dominated);
          continue;
        }
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, prev * (1 + 1e-12)) << "h=" << h << " t=" << t;
        prev = v;
      }
    }
  }
}

TEST(SigmaTilde, SecondChiNormMatchesAdaptiveQuadrature) {
  const std::size_t n = 30;
  const double h = 0.25;
  const double t = 0.1;
  const auto f = chain_fixture(n, 0.0, 4, 1.0 / h, 0.002);
  for (std::size_t j = 0; j < f.spectra.grid.size(); ++j) ASSERT_TRUE(f.spectra.trusted[j]);
  const auto k = SpectralKernel::flat_top(0.5);
  const double scale = 2.0 * kPi * std::sqrt(static_cast<double>(n)) * kT;
  const double got = sigma_tilde(inputs(f.spectra, k, {0.0, 0.0, 1.0}, n), h, t) * scale;

  const auto knots = f.spline.knots();
  auto phi = [&](double u) {
    cplx transform = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
      transform += oracle::complex_integral(
          [&](double x) { return f.spline(x) * std::exp(cplx(-x, u * x)); }, knots[i], knots[i + 1], 1.0);
    }
    return 1.0 - u * cplx(u, 1.0) * transform;
  };
  auto g = [&](double u) {
    return oracle::complex_integral([&](double x) { return std::exp(cplx(0.0, -u * x)) / (x * x); }, t, 5.0, 0.05);
  };
  const double sq = oracle::gauss_kronrod(
      [&](double u) { return std::norm(u * cplx(-u, 1.0) * g(u) * k(h * u) / phi(u)); }, -1.0 / h, 1.0 / h);
  EXPECT_NEAR(got, std::sqrt(sq), 1e-4 * std::sqrt(sq));
}

TEST(SigmaTilde, GuardDominated) {
  auto s = gaussian_spectra(10.0);
  std::fill(s.trusted.begin(), s.trusted.end(), false);
  const auto k = SpectralKernel::flat_top(0.5);
  expect_error(Errc::guard_dominated, [&] { sigma_tilde(inputs(s, k, {1, 1, 1}, 100.0), 0.2, 0.1); });
  expect_error(Errc::domain, [&] { sigma_tilde(inputs(s, k, {1, 1, 1}, 100.0), 0.0, 0.1); });
}

TEST(Multiplier, PaperSettings) {
  EXPECT_NEAR(lepski_multiplier(100.0, 0.1), 1.923, 1e-3);
  EXPECT_DOUBLE_EQ(lepski_multiplier(100.0, 0.1), 1.1 * std::sqrt(2.0 * std::log(std::log(100.0))));
  EXPECT_THROW(lepski_multiplier(2.0, 0.1), Error);
}

TEST(SelectBandwidth, IdenticalIntervalsPickLargest) {
  std::vector<LepskiCandidate> c;
  for (int j = 0; j < 6; ++j) c.push_back(candidate(0.01 * (j + 1), 0.1, 0.02));
  const auto r = select_bandwidth(c, 100.0, 0.1);
  EXPECT_EQ(r.chosen, 5u);
  EXPECT_EQ(r.h, 0.06);
  EXPECT_TRUE(r.records[5].chosen);
  EXPECT_NEAR(r.records[2].V, 0.02, 1e-15);
  EXPECT_NEAR(r.records[2].lo, 0.08, 1e-15);
  EXPECT_NEAR(r.records[2].hi, 0.12, 1e-15);
}

TEST(SelectBandwidth, DisjointLargestIntervalSelectsSmaller) {
  const std::vector<LepskiCandidate> c{candidate(0.01, 0.10, 0.05), candidate(0.02, 0.12, 0.03),
                                       candidate(0.03, 0.13, 0.02), candidate(0.04, 0.30, 0.01)};
  const auto r = select_bandwidth(c, 100.0, 0.1);
  EXPECT_EQ(r.chosen, 2u);
  EXPECT_EQ(r.h, 0.03);
  EXPECT_EQ(r.q, 0.13);
}

TEST(SelectBandwidth, PairwiseOverlapIsNotEnough) {
  // Each interval meets its neighbours, but [0, 0.2] and [0.3, 0.5] do not
  // meet, so the running intersection closes at the third bandwidth.
  const std::vector<LepskiCandidate> c{candidate(0.01, 0.1, 0.1), candidate(0.02, 0.25, 0.1),
                                       candidate(0.03, 0.4, 0.1), candidate(0.04, 0.1, 0.5)};
  const auto r = select_bandwidth(c, 100.0, 0.1);
  EXPECT_EQ(r.chosen, 1u);
}

TEST(SelectBandwidth, SmallestBandwidthAlwaysQualifies) {
  const std::vector<LepskiCandidate> c{candidate(0.01, 0.1, 0.0), candidate(0.02, 0.5, 0.0)};
  const auto r = select_bandwidth(c, 100.0, 0.1);
  EXPECT_EQ(r.chosen, 0u);
}

TEST(SelectBandwidth, VanishingDensityIsDropped) {
  std::vector<LepskiCandidate> c{candidate(0.01, 0.1, 0.02), candidate(0.02, 0.5, 0.02),
                                 candidate(0.03, 0.1, 0.02)};
  c[1].density_at_q = 0.0;
  const auto r = select_bandwidth(c, 100.0, 0.1);
  EXPECT_TRUE(r.records[1].dropped);
  EXPECT_EQ(r.chosen, 2u);
  for (auto& x : c) x.density_at_q = 0.0;
  expect_error(Errc::empty_grid, [&] { select_bandwidth(c, 100.0, 0.1); });
  expect_error(Errc::empty_grid, [&] { select_bandwidth({}, 100.0, 0.1); });
  const std::vector<LepskiCandidate> unsorted{candidate(0.02, 0.1, 0.1), candidate(0.01, 0.1, 0.1)};
  expect_error(Errc::domain, [&] { select_bandwidth(unsorted, 100.0, 0.1); });
}

TEST(SelectBandwidth, ChosenBandwidthExistsOnSimulatedChains) {
  const std::vector<double> taus{0.5, 1.0, 2.0};
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto chain = generate_synthetic_chain(paper_model(), kT, 0.06, 100, 0.01, StrikeLaw{}, derive_seed(7, seed));
    const auto a = analyze_chain(chain, taus, ExperimentConfig::default_pipeline());
    for (const auto& s : a.sides) {
      const auto& r = s.lepski;
      ASSERT_LT(r.chosen, r.records.size());
      EXPECT_TRUE(r.records[r.chosen].chosen);
      for (std::size_t i = 0; i < r.records.size(); ++i) {
        EXPECT_GE(r.records[i].sigma, 0.0);
        if (!r.records[i].dropped) {
          EXPECT_GE(r.records[i].V, 0.0);
          EXPECT_LE(r.records[i].lo, r.records[i].hi);
        }
      }
    }
  }
}
