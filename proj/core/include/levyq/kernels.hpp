#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace levyq {

/// Band-limited smoothing kernel described by its Fourier profile
/// FK(u) = int exp(iux) K(x) dx, an even function vanishing for |u| >= 1.
/// The bandwidth-h kernel K_h = K(./h)/h has profile FK(h u).
class SpectralKernel {
 public:
  using Profile = std::function<double(double)>;

  /// FK = 1 on [-c, c], 0 beyond 1, joined by the quintic smoothstep
  /// 1 - s^3 (10 - 15 s + 6 s^2), s = (|u| - c) / (1 - c).
  static SpectralKernel flat_top(double c = 0.5);

  /// FK(u) = (1 - |u|)_+, the Fejer (sinc^2) kernel of order 1.
  static SpectralKernel triangle();

  /// Arbitrary even profile; `order` empty means infinite order.
  static SpectralKernel from_profile(Profile profile, std::optional<int> order,
                                     std::string name);

  double profile(double u) const { return profile_(u); }
  double operator()(double u) const { return profile_(u); }

  std::optional<int> declared_order() const noexcept { return order_; }
  double flat_radius() const noexcept { return flat_radius_; }
  const std::string& name() const noexcept { return name_; }

 private:
  SpectralKernel(Profile profile, std::optional<int> order, double flat_radius,
                 std::string name)
      : profile_(std::move(profile)),
        order_(order),
        flat_radius_(flat_radius),
        name_(std::move(name)) {}

  Profile profile_;
  std::optional<int> order_;
  double flat_radius_ = 0.0;
  std::string name_;
};

/// Quintic bridge used by the flat-top family.
double smoothstep_bridge(double s);

struct MomentCheck {
  int order = 0;
  double value = 0.0;     // computed int x^l K(x) dx
  double residual = 0.0;  // |value - target|, target 1 for l = 0 else 0
  bool pass = false;
};

struct OrderReport {
  std::vector<MomentCheck> moments;
  bool pass = false;
};

/// Numerical check of int K = 1 (to `mass_tol`) and int x^l K = 0 (to
/// `moment_tol`) for l = 1..p.
///
/// K is tabulated by inverse Fourier transform of the profile. A C^2 profile
/// only gives |K(x)| ~ |x|^-4, so the moments are taken in the Abel sense
/// with a Gaussian spatial taper exp(-(x/A)^2), A = max(20, 14/c) for a flat
/// radius c. Finite moments are unchanged up to terms of order
/// exp(-(cA)^2 / 4).
OrderReport verify_order(const SpectralKernel& kernel, int p,
                         double moment_tol, double mass_tol = 1e-8);

/// K(x) for the given kernel by direct inverse transform of the profile.
std::vector<double> kernel_values(const SpectralKernel& kernel,
                                  const std::vector<double>& xs,
                                  std::size_t points = std::size_t{1} << 14);

}  // namespace levyq
