#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "levyq/inversion.hpp"
#include "levyq/kernels.hpp"
#include "levyq/psi2.hpp"

using namespace levyq;

namespace {

const auto kKernel = SpectralKernel::flat_top(0.5);

LevyModel exponential_up(double sigma2 = 0.0) { return {sigma2, 0.0, CompoundPoisson{1.0, exponential_jumps(1.0)}}; }

LevyModel exponential_down() {
  return {0.0, 0.0, CompoundPoisson{1.0, DoubleExponentialJumps{0.0, 1.0, 1.0}}};
}

DistributionEstimate closed_form_exponential() {
  return {[](double t) { return t > 0.0 ? std::exp(-t) : 0.0; }, 0.0, "exact"};
}

}  // namespace

TEST(Density, CompoundPoissonFromExactPsi2) {
  const auto psi2 = exact_psi2(exponential_up());
  double prev = INFINITY;
  for (double h : {0.2, 0.1, 0.05}) {
    const double err = std::abs(density_from_psi2(psi2, kKernel, h, 1.0) - std::exp(-1.0));
    EXPECT_LT(err, prev) << "h=" << h;
    prev = err;
  }
  EXPECT_LT(prev, 2e-2);
}

TEST(Density, PureGaussianIsScaledKernel) {
  const double s2 = 0.04;
  const auto psi2 = constant_psi2(-s2);
  for (double h : {0.5, 0.2}) {
    for (double t : {0.3, 1.0}) {
      const std::vector<double> at{t / h};
      const double kh = kernel_values(kKernel, at)[0] / h;
      EXPECT_NEAR(density_from_psi2(psi2, kKernel, h, t), s2 * kh / (t * t), 1e-9);
    }
  }
  double prev = INFINITY;
  for (double h : {0.2, 0.05, 0.01}) {
    const double v = std::abs(density_from_psi2(psi2, kKernel, h, 1.0));
    EXPECT_LT(v, prev);
    prev = v;
  }
  EXPECT_LT(prev, 1e-7);
}

TEST(Density, ZeroSpectrum) {
  const auto psi2 = constant_psi2(0.0);
  for (double t : {-2.0, -0.1, 0.4}) EXPECT_EQ(density_from_psi2(psi2, kKernel, 0.1, t), 0.0);
}

TEST(Distribution, CompoundPoissonFromExactPsi2) {
  const auto psi2 = exact_psi2(exponential_up());
  EXPECT_NEAR(distribution_from_psi2(psi2, kKernel, 0.05, 1.0), std::exp(-1.0), 2e-2);
  EXPECT_NEAR(distribution_from_psi2(psi2, kKernel, 0.05, 5.0), 0.0, 1e-9);
}

TEST(Distribution, DerivativeIsMinusSignedDensity) {
  const auto psi2 = exact_psi2(LevyModel{0.0, 0.0, Cgmy{1.0, 5.0, 8.0, 0.5}});
  const double e = 1e-4;
  for (double t : {0.5, -0.5, 0.2}) {
    const double fd = (distribution_from_psi2(psi2, kKernel, 0.05, t + e) -
                       distribution_from_psi2(psi2, kKernel, 0.05, t - e)) /
                      (2 * e);
    const double sign = t > 0 ? 1.0 : -1.0;
    EXPECT_NEAR(fd, -sign * density_from_psi2(psi2, kKernel, 0.05, t), 1e-3) << "t=" << t;
  }
}

TEST(Distribution, BiasShrinksWithBandwidth) {
  const auto psi2 = exact_psi2(exponential_up());
  double prev = INFINITY;
  for (double h : {0.2, 0.1, 0.05}) {
    const double err = std::abs(distribution_from_psi2(psi2, kKernel, h, 0.5) - std::exp(-0.5));
    EXPECT_LE(err, prev) << "h=" << h;
    prev = err;
  }
}

TEST(Distribution, VolatilityEnterAtMostThroughKernelTail) {
  // ||x K(x)||_L1 of the flat-top kernel by trapezoid on [-500, 500].
  std::vector<double> xs;
  for (double x = -500.0; x <= 500.0; x += 0.05) xs.push_back(x);
  const auto k = kernel_values(kKernel, xs, std::size_t{1} << 15);
  double ck = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) ck += std::abs(xs[i] * k[i]) * 0.05;

  const double h = 0.1;
  const double t = 0.5;
  const double base = distribution_from_psi2(exact_psi2(exponential_up()), kKernel, h, t);
  for (double s2 : {0.01, 0.04}) {
    const double shifted = distribution_from_psi2(exact_psi2(exponential_up(s2)), kKernel, h, t);
    EXPECT_LE(std::abs(shifted - base), s2 * std::pow(t, -3) * h * ck) << "s2=" << s2;
  }
}

TEST(Quantile, ClosedFormExponential) {
  const auto q = quantile_from_distribution(closed_form_exponential(), 0.5, 0.02, Side::positive);
  EXPECT_NEAR(q.value, std::log(2.0), 1e-4);
  EXPECT_FALSE(q.at_threshold);
  EXPECT_EQ(q.side, Side::positive);
  EXPECT_EQ(q.tau, 0.5);
}

TEST(Quantile, ClampsToThresholdBeyondMass) {
  const auto q = quantile_from_distribution(closed_form_exponential(), 10.0, 0.02, Side::positive);
  EXPECT_TRUE(q.at_threshold);
  EXPECT_EQ(q.value, 0.02);
  const auto none = quantile_from_distribution(closed_form_exponential(), 0.5, 0.02, Side::negative);
  EXPECT_TRUE(none.at_threshold);
  EXPECT_EQ(none.value, 0.02);
}

TEST(Quantile, NeverBelowThreshold) {
  const auto q = quantile_from_distribution(closed_form_exponential(), 0.999, 0.05, Side::positive);
  EXPECT_GE(q.value, 0.05);
}

TEST(Quantile, MirroredModelSwapsSides) {
  const double h = 0.05;
  const SpectralInverter up(exact_psi2(exponential_up()), h);
  const SpectralInverter down(exact_psi2(exponential_down()), h);
  const auto eu = up.at(kKernel, h);
  const auto ed = down.at(kKernel, h);
  const InversionSettings s;
  for (double tau : {0.3, 0.5, 0.8}) {
    EXPECT_NEAR(eu.quantile(tau, 0.02, Side::positive, s).value,
                ed.quantile(tau, 0.02, Side::negative, s).value, 1e-9);
  }
}

TEST(Lattice, AgreesWithPointwiseRoute) {
  const auto psi2 = exact_psi2(LevyModel{0.01, 0.0, Cgmy{1.0, 5.0, 8.0, 0.5}});
  const double h = 0.08;
  const SpectralInverter inverter(psi2, h);
  const auto est = inverter.at(kKernel, h);
  for (double t : {-0.7, -0.12, 0.09, 0.3, 1.4}) {
    EXPECT_NEAR(est.density(t), density_from_psi2(psi2, kKernel, h, t), 1e-4 * (1 + std::abs(est.density(t))))
        << "t=" << t;
    EXPECT_NEAR(est.distribution(t), distribution_from_psi2(psi2, kKernel, h, t), 1e-4) << "t=" << t;
  }
  EXPECT_EQ(est.bandwidth(), h);
}

TEST(Lattice, QuantilesOfExactCgmy) {
  const Cgmy m{1.0, 5.0, 8.0, 0.5};
  const TailIntegralOracle truth(m);
  for (double s2 : {0.0, 0.01}) {
    const SpectralInverter inverter(exact_psi2(LevyModel{s2, 0.0, m}), 0.01);
    const auto est = inverter.at(kKernel, 0.01);
    for (Side side : {Side::negative, Side::positive}) {
      const auto q = est.quantile(1.0, 0.02, side, InversionSettings{});
      EXPECT_NEAR(q.value, true_quantile(truth, 1.0, side), 2e-3) << "s2=" << s2;
    }
  }
}
