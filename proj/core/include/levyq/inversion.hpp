#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "levyq/kernels.hpp"
#include "levyq/levy.hpp"
#include "levyq/numerics.hpp"
#include "levyq/psi2.hpp"

namespace levyq {

struct InversionSettings {
  /// Truncation of the tail integrals and of the quantile search.
  double x_max = 5.0;
  /// Frequency step of the batch route (spatial period 2 pi / freq_step).
  double freq_step = 0.1;
  /// FFT length of the batch route; lattice step 2 pi / (fft_size freq_step).
  std::size_t fft_size = std::size_t{1} << 15;
  /// Points of the pointwise route on [-1/h, 1/h].
  std::size_t direct_points = std::size_t{1} << 14;
  /// Geometric scan points on [eta, x_max].
  std::size_t quantile_grid = 400;
  double root_tol = 1e-6;

  void validate() const;
};

/// nu_h(t) = -t^-2 F^-1[psi'' FK(h .)](t).
class DensityEstimate {
 public:
  using Fn = std::function<double(double)>;
  DensityEstimate(Fn eval, double bandwidth, std::string kernel)
      : eval_(std::move(eval)), bandwidth_(bandwidth), kernel_(std::move(kernel)) {}

  double operator()(double t) const { return eval_(t); }
  double bandwidth() const noexcept { return bandwidth_; }
  const std::string& kernel() const noexcept { return kernel_; }

 private:
  Fn eval_;
  double bandwidth_;
  std::string kernel_;
};

/// N_h(t): int_t^{x_max} nu_h for t > 0 and int_{-x_max}^t nu_h for t < 0.
class DistributionEstimate {
 public:
  using Fn = std::function<double(double)>;
  DistributionEstimate(Fn eval, double bandwidth, std::string kernel)
      : eval_(std::move(eval)), bandwidth_(bandwidth), kernel_(std::move(kernel)) {}

  double operator()(double t) const { return eval_(t); }
  double bandwidth() const noexcept { return bandwidth_; }
  const std::string& kernel() const noexcept { return kernel_; }

 private:
  Fn eval_;
  double bandwidth_;
  std::string kernel_;
};

struct QuantileEstimate {
  double value = 0.0;
  Side side = Side::positive;
  double tau = 0.0;
  double bandwidth = 0.0;
  bool at_threshold = false;
};

/// Pointwise route: psi'' is sampled once on `direct_points` midpoint nodes of
/// [-1/h, 1/h] (capped at the estimate's valid cutoff) and every evaluation is
/// a direct Fourier sum.
DensityEstimate estimate_density(const Psi2Estimate& psi2,
                                 const SpectralKernel& kernel, double h,
                                 const InversionSettings& settings = {});
/// Tail integrals of estimate_density by adaptive quadrature.
DistributionEstimate estimate_distribution(const Psi2Estimate& psi2,
                                           const SpectralKernel& kernel,
                                           double h,
                                           const InversionSettings& settings = {});

double density_from_psi2(const Psi2Estimate& psi2, const SpectralKernel& kernel,
                         double h, double t,
                         const InversionSettings& settings = {});
double distribution_from_psi2(const Psi2Estimate& psi2,
                              const SpectralKernel& kernel, double h, double t,
                              const InversionSettings& settings = {});

/// argmin over t in [eta, x_max] of |N(+-t) - tau|. Roots are located on a
/// geometric scan and refined by bisection; among several the one nearest
/// eta is kept. Without a root and with N(+-eta) < tau the result is eta with
/// at_threshold set.
QuantileEstimate quantile_from_distribution(const DistributionEstimate& dist,
                                            double tau, double eta, Side side,
                                            const InversionSettings& settings = {});

/// Density and tail integrals of one bandwidth, tabulated on an FFT lattice.
class LatticeEstimate {
 public:
  LatticeEstimate(SpatialLattice lattice, double h, std::string kernel,
                  double x_max);

  double density(double t) const;
  double distribution(double t) const;
  double bandwidth() const noexcept { return h_; }
  double x_max() const noexcept { return x_max_; }

  DensityEstimate density_view() const;
  DistributionEstimate distribution_view() const;

  QuantileEstimate quantile(double tau, double eta, Side side,
                            const InversionSettings& settings) const;

 private:
  double m_at(double x) const;

  double step_ = 0.0;
  double origin_ = 0.0;
  std::vector<double> m_;            // Re F^-1[psi'' FK(h .)] on the lattice
  std::vector<double> upper_tail_;   // int_{x_k}^{x_max} nu
  std::vector<double> lower_tail_;   // int_{-x_max}^{x_k} nu
  double h_;
  std::string kernel_;
  double x_max_;
};

/// Batch route: psi'' sampled once on a midpoint grid of step freq_step
/// reaching 1/h_min, then one FFT per bandwidth.
class SpectralInverter {
 public:
  SpectralInverter(FrequencyGrid grid, std::vector<cplx> psi2,
                   InversionSettings settings = {});
  SpectralInverter(const Psi2Estimate& psi2, double min_bandwidth,
                   InversionSettings settings = {});

  LatticeEstimate at(const SpectralKernel& kernel, double h) const;

  const FrequencyGrid& grid() const noexcept { return grid_; }
  std::span<const cplx> samples() const noexcept { return psi2_; }
  const InversionSettings& settings() const noexcept { return settings_; }

 private:
  FrequencyGrid grid_;
  std::vector<cplx> psi2_;
  InversionSettings settings_;
};

}  // namespace levyq
