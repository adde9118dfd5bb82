#pragma once

#include <functional>
#include <optional>
#include <variant>

#include "levyq/numerics.hpp"

namespace levyq {

enum class Side { negative, positive };

inline double sign_of(Side side) { return side == Side::positive ? 1.0 : -1.0; }
const char* to_string(Side side);

/// Tempered stable measure C|x|^{-1-Y} e^{-G|x|} (x<0), C x^{-1-Y} e^{-Mx} (x>0).
struct Cgmy {
  double C = 1.0;
  double G = 5.0;
  double M = 8.0;
  double Y = 0.5;
};

/// Asymmetric double exponential jump law: with probability p_up an
/// Exp(rate_up) jump upwards, otherwise an Exp(rate_down) jump downwards.
struct DoubleExponentialJumps {
  double p_up = 1.0;
  double rate_up = 1.0;
  double rate_down = 1.0;
};

struct NormalJumps {
  double mean = 0.0;
  double sd = 1.0;
};

/// Any probability density; characteristic quantities go through quadrature.
struct CustomJumps {
  std::function<double(double)> pdf;
};

using JumpLaw = std::variant<DoubleExponentialJumps, NormalJumps, CustomJumps>;

/// Finite measure `intensity` * law.
struct CompoundPoisson {
  double intensity = 1.0;
  JumpLaw law = DoubleExponentialJumps{};
};

/// Variance gamma process theta*G + scale*W(G), G a gamma subordinator with
/// unit mean rate and variance rate `variance_rate`.
struct VarianceGamma {
  double scale = 0.2;
  double drift = 0.0;
  double variance_rate = 0.2;
};

struct NoJumps {};

using JumpMeasureSpec = std::variant<NoJumps, Cgmy, CompoundPoisson, VarianceGamma>;

/// Throws Errc::domain when the parameters violate the measure's invariants
/// (Y < 2, nonnegative tilts, positive intensities, ...).
void validate(const JumpMeasureSpec& jumps);

DoubleExponentialJumps exponential_jumps(double rate);

/// Levy density at x != 0.
double levy_density(const JumpMeasureSpec& jumps, double x);

/// Mass of the measure on one half line; empty when infinite.
std::optional<double> tail_mass(const JumpMeasureSpec& jumps, Side side);

/// int x^2 nu(dx).
double second_moment(const JumpMeasureSpec& jumps);

/// int x nu(dx); requires finite first moment near zero (Y < 1 for CGMY).
double first_moment(const JumpMeasureSpec& jumps);

/// Admissible strip for Im(u) in the jump integral: [lo, hi] with
/// open/closed ends folded into a small tolerance.
struct TiltStrip {
  double lo;
  double hi;
};
TiltStrip admissible_strip(const JumpMeasureSpec& jumps);

/// Levy-Khintchine triplet in Kolmogorov's form.
struct LevyModel {
  double sigma2 = 0.0;
  double gamma = 0.0;
  JumpMeasureSpec jumps = NoJumps{};

  /// Model whose drift satisfies the martingale condition E[e^{L_t}] = 1.
  static LevyModel martingale(double sigma2, JumpMeasureSpec jumps);
};

/// psi and its first two derivatives at complex u.
struct ExponentDerivatives {
  cplx value;
  cplx first;
  cplx second;
};

/// int (e^{iux} - 1 - iux) nu(dx) and its u-derivatives.
ExponentDerivatives jump_exponent(const JumpMeasureSpec& jumps, cplx u);

/// psi(u) = -sigma^2 u^2/2 + i gamma u + int (e^{iux} - 1 - iux) nu(dx).
cplx characteristic_exponent(const LevyModel& model, cplx u);
ExponentDerivatives exponent_derivatives(const LevyModel& model, cplx u);

/// phi_t(u) = exp(t psi(u)).
cplx characteristic_function(const LevyModel& model, double t, cplx u);

/// psi''(u) = -sigma^2 - F[x^2 nu](u).
cplx psi_second_derivative(const LevyModel& model, double u);

/// gamma = -sigma^2/2 - int (e^x - 1 - x) nu(dx).
double martingale_drift(double sigma2, const JumpMeasureSpec& jumps);

/// Ground truth for the generalized distribution function
/// N(t) = nu([t, inf)) for t > 0 and nu((-inf, t]) for t < 0.
class TailIntegralOracle {
 public:
  explicit TailIntegralOracle(JumpMeasureSpec jumps, double rel_tol = 1e-12);

  double operator()(double t) const { return tail_integral(t); }
  double tail_integral(double t) const;
  const JumpMeasureSpec& measure() const noexcept { return jumps_; }

 private:
  JumpMeasureSpec jumps_;
  double rel_tol_;
};

/// Root of N(+-t) = tau by bracketing and bisection (absolute tol 1e-8).
double true_quantile(const TailIntegralOracle& oracle, double tau, Side side);

/// |q^- - q^+| / (q^- + q^+).
double bowley_skewness(const TailIntegralOracle& oracle, double tau);

}  // namespace levyq
