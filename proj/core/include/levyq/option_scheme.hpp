#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "levyq/levy.hpp"
#include "levyq/psi2.hpp"

namespace levyq {

/// Noisy normalized option prices O_j at negative log-moneyness
/// x_j = log(K_j / S0) - rT: puts for x < 0, calls for x >= 0.
struct OptionChain {
  double maturity = 0.25;
  double rate = 0.0;
  std::vector<double> xs;
  std::vector<double> prices;
  std::vector<double> noise_levels;

  std::size_t size() const noexcept { return xs.size(); }
  /// Throws Errc::domain on unsorted strikes, length mismatch, negative
  /// noise levels or a nonpositive maturity.
  void validate() const;
};

struct OptionPricingSettings {
  /// Frequency step of the pricing transform; the spatial period is
  /// 2 pi / freq_step.
  double freq_step = 0.05;
  /// Variance rate of the Black-Scholes control; <= 0 selects
  /// sigma^2 + int x^2 nu.
  double reference_sigma2 = -1.0;
  /// Truncate the transform once |integrand| falls below this.
  double tail_eps = 1e-16;
};

/// O(x) from the pricing formula F O(u) = (1 - phi_T(u - i)) / (u (u - i)).
/// A Black-Scholes control with the same martingale normalization is
/// subtracted in Fourier space and added back in closed form, so the
/// remaining integrand decays like phi_T.
std::vector<double> option_function(const LevyModel& model, double maturity,
                                    std::span<const double> xs,
                                    const OptionPricingSettings& settings = {});
double option_function(const LevyModel& model, double maturity, double x,
                       const OptionPricingSettings& settings = {});

/// Call and put value at the same x, both from the pricing transform.
struct CallPut {
  double call;
  double put;
};
std::vector<CallPut> call_put_values(const LevyModel& model, double maturity,
                                     std::span<const double> xs,
                                     const OptionPricingSettings& settings = {});

/// Normalized Black-Scholes option function at total variance s^2.
double black_scholes_option_function(double x, double total_variance);

/// Normal law of the design points.
struct StrikeLaw {
  double mean = 0.0;
  double variance = 0.5;
  double quantile(double p) const;
};

/// Design points x_j = F^{-1}(j/(n+1)) with their exact option values
/// (clipped at zero).
struct SyntheticDesign {
  double maturity = 0.25;
  double rate = 0.0;
  std::vector<double> xs;
  std::vector<double> true_prices;
};

SyntheticDesign make_design(const LevyModel& model, double maturity,
                            double rate, std::size_t n, const StrikeLaw& law,
                            const OptionPricingSettings& settings = {});

/// O_j = O(x_j) + delta_j eps_j with delta_j = noise_fraction * O(x_j) and
/// standard normal eps_j drawn from a generator seeded with `seed`.
OptionChain add_noise(const SyntheticDesign& design, double noise_fraction,
                      std::uint64_t seed);

OptionChain generate_synthetic_chain(const LevyModel& model, double maturity,
                                     double rate, std::size_t n,
                                     double noise_fraction,
                                     const StrikeLaw& law, std::uint64_t seed);

/// Interpolant of (x_j, O_j), ramped linearly to zero over `pad` beyond the
/// design range and identically zero outside.
class SplineOptionFunction {
 public:
  SplineOptionFunction(std::span<const double> xs, std::span<const double> values,
                       int degree = 1, double pad_spacings = 2.0);
  explicit SplineOptionFunction(const OptionChain& chain, int degree = 1);

  double operator()(double x) const;

  /// int x^k O~(x) e^{(iu-1)x} dx for k = 0, 1, 2, exact for the spline.
  std::array<cplx, 3> weighted_transforms(double u) const;
  cplx weighted_transform(int k, double u) const;

  std::span<const double> knots() const noexcept { return knots_; }
  int degree() const noexcept { return degree_; }
  double support_lo() const noexcept { return knots_.front(); }
  double support_hi() const noexcept { return knots_.back(); }

 private:
  // Segment i covers [knots_[i], knots_[i+1]] with local cubic
  // c0 + c1 s + c2 s^2 + c3 s^3, s = x - knots_[i].
  std::vector<double> knots_;
  std::vector<std::array<double, 4>> coeffs_;
  int degree_;
};

/// phi~(u) = 1 - u (u + i) F O~(u + i).
cplx phi_tilde(const SplineOptionFunction& spline, double u);
cplx phi_tilde(const std::array<cplx, 3>& transforms, double u);

/// |phi~(u)| >= scale * (1 + |u|)^2 / sqrt(n) defines the trusted band.
struct TrustRegion {
  double n = 1.0;
  double scale = 1.0;
  double threshold(double u) const;
  bool trusted(double u, cplx phi) const { return std::abs(phi) >= threshold(u); }
};

struct PsiTilde {
  cplx phi;
  cplx first;   // psi~'
  cplx second;  // psi~''
  bool trusted = true;
};

/// psi~' and psi~'' from the three weighted transforms; zero outside the
/// trust region.
PsiTilde psi_tilde_derivatives(const std::array<cplx, 3>& transforms,
                               double maturity, double u,
                               const TrustRegion& trust);
PsiTilde psi_tilde_derivatives(const SplineOptionFunction& spline,
                               double maturity, double u,
                               const TrustRegion& trust);

/// The option-scheme estimate of psi'' as a Psi2Estimate.
Psi2Estimate psi2_from_chain(const SplineOptionFunction& spline, double maturity,
                             const TrustRegion& trust, double valid_cutoff);

/// Everything the inversion and bandwidth selection need from one chain,
/// sampled on a symmetric midpoint grid.
struct OptionSpectra {
  FrequencyGrid grid;
  double maturity;
  std::vector<cplx> phi;
  std::vector<cplx> psi1;
  std::vector<cplx> psi2;
  std::vector<bool> trusted;
};

OptionSpectra sample_option_spectra(const SplineOptionFunction& spline,
                                    double maturity, const FrequencyGrid& grid,
                                    const TrustRegion& trust);

/// rho(x) = delta(x) / sqrt(f(x)) on the design range.
struct NoiseProfile {
  double bandwidth = 0.0;  // of the design-density estimate
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> grid;
  std::vector<double> design_density;
  std::vector<double> rho;
  /// ||x^k e^{-x} rho||_inf for k = 0, 1, 2 over [lo, hi].
  std::array<double, 3> sup_norms{};
  /// ||e^{-x} rho||_{L^2} over [lo, hi].
  double weighted_l2 = 0.0;

  double rho_at(double x) const;
  double density_at(double x) const;
};

/// Triangular-kernel estimate of the design density with Silverman's
/// bandwidth, linear interpolation of delta_j, evaluated on 1000 points.
NoiseProfile estimate_noise_profile(const OptionChain& chain);

/// (1/n b) sum (1 - |x - x_j| / b)_+.
double triangular_kde(std::span<const double> xs, double bandwidth, double x);
double silverman_bandwidth(std::span<const double> xs);

}  // namespace levyq
