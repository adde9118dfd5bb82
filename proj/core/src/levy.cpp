#include "levyq/levy.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <limits>
#include <string>

#include "levyq/errors.hpp"

namespace levyq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kQuantileTol = 1e-8;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi);
}

// Variance gamma as a CGMY measure with Y = 0.
Cgmy vg_as_cgmy(const VarianceGamma& vg) {
  const double nu = vg.variance_rate;
  const double th = vg.drift;
  const double s2 = vg.scale * vg.scale;
  const double root = std::sqrt(th * th * nu * nu / 4.0 + s2 * nu / 2.0);
  return Cgmy{1.0 / nu, 1.0 / (root - th * nu / 2.0),
              1.0 / (root + th * nu / 2.0), 0.0};
}

double cgmy_density(const Cgmy& m, double x) {
  const double a = std::abs(x);
  const double tilt = x < 0.0 ? m.G : m.M;
  return m.C * std::pow(a, -1.0 - m.Y) * std::exp(-tilt * a);
}

double law_pdf(const JumpLaw& law, double x) {
  return std::visit(
      Overloaded{
          [x](const DoubleExponentialJumps& d) {
            if (x > 0.0) return d.p_up * d.rate_up * std::exp(-d.rate_up * x);
            if (x < 0.0) {
              return (1.0 - d.p_up) * d.rate_down * std::exp(d.rate_down * x);
            }
            return 0.0;
          },
          [x](const NormalJumps& n) {
            return normal_pdf((x - n.mean) / n.sd) / n.sd;
          },
          [x](const CustomJumps& c) { return c.pdf(x); }},
      law);
}

// E[J^k e^{iuJ}] for k = 0, 1, 2.
struct LawMoments {
  cplx m0;
  cplx m1;
  cplx m2;
};

LawMoments custom_moments(const CustomJumps& c, cplx u) {
  auto part = [&](int k, bool imag_part) {
    auto f = [&](double x) {
      const cplx e = std::exp(kI * u * x) * std::pow(x, k) * c.pdf(x);
      return imag_part ? e.imag() : e.real();
    };
    auto g = [&](double x) { return f(-x); };
    return integrate_adaptive(f, 0.0, kInf, 1e-12) +
           integrate_adaptive(g, 0.0, kInf, 1e-12);
  };
  LawMoments out;
  out.m0 = {part(0, false), part(0, true)};
  out.m1 = {part(1, false), part(1, true)};
  out.m2 = {part(2, false), part(2, true)};
  return out;
}

LawMoments law_moments(const JumpLaw& law, cplx u) {
  return std::visit(
      Overloaded{
          [u](const DoubleExponentialJumps& d) {
            const double p = d.p_up;
            const double a = d.rate_up;
            const double b = d.rate_down;
            const cplx up = a - kI * u;
            const cplx dn = b + kI * u;
            LawMoments m;
            m.m0 = p * a / up + (1.0 - p) * b / dn;
            m.m1 = p * a / (up * up) - (1.0 - p) * b / (dn * dn);
            m.m2 = 2.0 * p * a / (up * up * up) +
                   2.0 * (1.0 - p) * b / (dn * dn * dn);
            return m;
          },
          [u](const NormalJumps& n) {
            const double s2 = n.sd * n.sd;
            const cplx phi = std::exp(kI * u * n.mean - 0.5 * s2 * u * u);
            const cplx a = kI * n.mean - s2 * u;
            LawMoments m;
            m.m0 = phi;
            m.m1 = (n.mean + kI * s2 * u) * phi;
            m.m2 = -(a * a - s2) * phi;
            return m;
          },
          [u](const CustomJumps& c) { return custom_moments(c, u); }},
      law);
}

double law_mean(const JumpLaw& law) {
  return law_moments(law, cplx{0.0, 0.0}).m1.real();
}

ExponentDerivatives cgmy_exponent(const Cgmy& m, cplx u) {
  const double Y = m.Y;
  const double a = m.C * std::tgamma(-Y);
  const double b = m.C * std::tgamma(1.0 - Y);
  const double c2 = m.C * std::tgamma(2.0 - Y);
  const cplx right = m.M - kI * u;
  const cplx left = m.G + kI * u;
  const double comp = std::pow(m.M, Y - 1.0) - std::pow(m.G, Y - 1.0);
  ExponentDerivatives d;
  d.value = a * (std::pow(right, Y) - std::pow(m.M, Y) + std::pow(left, Y) -
                 std::pow(m.G, Y)) -
            kI * u * b * comp;
  d.first = kI * b *
            (std::pow(right, Y - 1.0) - std::pow(m.M, Y - 1.0) -
             std::pow(left, Y - 1.0) + std::pow(m.G, Y - 1.0));
  d.second = -c2 * (std::pow(right, Y - 2.0) + std::pow(left, Y - 2.0));
  return d;
}

ExponentDerivatives vg_exponent(const VarianceGamma& vg, cplx u) {
  const double nu = vg.variance_rate;
  const double th = vg.drift;
  const double s2 = vg.scale * vg.scale;
  const cplx D = 1.0 - kI * u * th * nu + 0.5 * s2 * nu * u * u;
  const cplx w = kI * th - s2 * u;
  ExponentDerivatives d;
  d.value = -std::log(D) / nu - kI * u * th;
  d.first = w / D - kI * th;
  d.second = (-s2 * D + nu * w * w) / (D * D);
  return d;
}

bool contains(const TiltStrip& strip, double im) {
  return im > strip.lo && im <= strip.hi;
}

}  // namespace

const char* to_string(Side side) {
  return side == Side::positive ? "+" : "-";
}

DoubleExponentialJumps exponential_jumps(double rate) {
  return DoubleExponentialJumps{1.0, rate, 1.0};
}

void validate(const JumpMeasureSpec& jumps) {
  std::visit(
      Overloaded{
          [](const NoJumps&) {},
          [](const Cgmy& m) {
            if (!(m.C > 0.0)) throw Error(Errc::domain, "CGMY: C must be > 0");
            if (!(m.G > 0.0) || !(m.M > 0.0)) {
              throw Error(Errc::domain,
                          "CGMY: G and M must be > 0 for a finite second "
                          "moment");
            }
            if (!(m.Y < 2.0)) throw Error(Errc::domain, "CGMY: Y must be < 2");
            if (m.Y == 0.0 || m.Y == 1.0) {
              throw Error(Errc::unsupported,
                          "CGMY: Y in {0, 1} (logarithmic limits) is not "
                          "supported");
            }
          },
          [](const CompoundPoisson& cp) {
            if (!(cp.intensity > 0.0)) {
              throw Error(Errc::domain, "compound Poisson: intensity must be > 0");
            }
            std::visit(Overloaded{
                           [](const DoubleExponentialJumps& d) {
                             if (!(d.p_up >= 0.0 && d.p_up <= 1.0) ||
                                 !(d.rate_up > 0.0) || !(d.rate_down > 0.0)) {
                               throw Error(Errc::domain,
                                           "double exponential jumps: need "
                                           "p in [0,1] and positive rates");
                             }
                           },
                           [](const NormalJumps& n) {
                             if (!(n.sd > 0.0)) {
                               throw Error(Errc::domain,
                                           "normal jumps: sd must be > 0");
                             }
                           },
                           [](const CustomJumps& c) {
                             if (!c.pdf) {
                               throw Error(Errc::domain,
                                           "custom jumps: missing density");
                             }
                           }},
                       cp.law);
          },
          [](const VarianceGamma& vg) {
            if (!(vg.scale > 0.0) || !(vg.variance_rate > 0.0)) {
              throw Error(Errc::domain,
                          "variance gamma: scale and variance rate must be > 0");
            }
          }},
      jumps);
}

double levy_density(const JumpMeasureSpec& jumps, double x) {
  if (x == 0.0) {
    throw Error(Errc::domain, "levy_density: x must be nonzero");
  }
  return std::visit(
      Overloaded{[](const NoJumps&) { return 0.0; },
                 [x](const Cgmy& m) { return cgmy_density(m, x); },
                 [x](const CompoundPoisson& cp) {
                   return cp.intensity * law_pdf(cp.law, x);
                 },
                 [x](const VarianceGamma& vg) {
                   return cgmy_density(vg_as_cgmy(vg), x);
                 }},
      jumps);
}

std::optional<double> tail_mass(const JumpMeasureSpec& jumps, Side side) {
  const bool up = side == Side::positive;
  return std::visit(
      Overloaded{
          [](const NoJumps&) -> std::optional<double> { return 0.0; },
          [up](const Cgmy& m) -> std::optional<double> {
            if (m.Y >= 0.0) return std::nullopt;
            return m.C * std::tgamma(-m.Y) * std::pow(up ? m.M : m.G, m.Y);
          },
          [up](const CompoundPoisson& cp) -> std::optional<double> {
            const double share = std::visit(
                Overloaded{
                    [up](const DoubleExponentialJumps& d) {
                      return up ? d.p_up : 1.0 - d.p_up;
                    },
                    [up](const NormalJumps& n) {
                      const double below = normal_cdf(-n.mean / n.sd);
                      return up ? 1.0 - below : below;
                    },
                    [up](const CustomJumps& c) {
                      auto f = [&](double x) { return c.pdf(up ? x : -x); };
                      return integrate_adaptive(f, 0.0, kInf, 1e-12);
                    }},
                cp.law);
            return cp.intensity * share;
          },
          [](const VarianceGamma&) -> std::optional<double> {
            return std::nullopt;
          }},
      jumps);
}

double second_moment(const JumpMeasureSpec& jumps) {
  return -jump_exponent(jumps, cplx{0.0, 0.0}).second.real();
}

double first_moment(const JumpMeasureSpec& jumps) {
  return std::visit(
      Overloaded{
          [](const NoJumps&) { return 0.0; },
          [](const Cgmy& m) {
            if (!(m.Y < 1.0)) {
              throw Error(Errc::divergence,
                          "CGMY: first moment near zero diverges for Y >= 1");
            }
            return m.C * std::tgamma(1.0 - m.Y) *
                   (std::pow(m.M, m.Y - 1.0) - std::pow(m.G, m.Y - 1.0));
          },
          [](const CompoundPoisson& cp) {
            return cp.intensity * law_mean(cp.law);
          },
          [](const VarianceGamma& vg) { return vg.drift; }},
      jumps);
}

TiltStrip admissible_strip(const JumpMeasureSpec& jumps) {
  return std::visit(
      Overloaded{
          [](const NoJumps&) { return TiltStrip{-kInf, kInf}; },
          [](const Cgmy& m) { return TiltStrip{-m.M, m.G}; },
          [](const CompoundPoisson& cp) {
            return std::visit(
                Overloaded{
                    [](const DoubleExponentialJumps& d) {
                      const double lo = d.p_up > 0.0 ? -d.rate_up : -kInf;
                      const double hi =
                          d.p_up < 1.0 ? std::nextafter(d.rate_down, 0.0) : kInf;
                      return TiltStrip{lo, hi};
                    },
                    [](const NormalJumps&) { return TiltStrip{-kInf, kInf}; },
                    // Only real frequencies and the martingale point are
                    // probed for custom laws; quadrature reports divergence.
                    [](const CustomJumps&) { return TiltStrip{-kInf, kInf}; }},
                cp.law);
          },
          [](const VarianceGamma& vg) {
            const Cgmy m = vg_as_cgmy(vg);
            return TiltStrip{-m.M, std::nextafter(m.G, 0.0)};
          }},
      jumps);
}

ExponentDerivatives jump_exponent(const JumpMeasureSpec& jumps, cplx u) {
  if (!contains(admissible_strip(jumps), u.imag())) {
    throw Error(Errc::domain,
                "characteristic exponent: Im(u) = " + std::to_string(u.imag()) +
                    " outside the admissible tilt strip");
  }
  return std::visit(
      Overloaded{
          [](const NoJumps&) { return ExponentDerivatives{}; },
          [u](const Cgmy& m) {
            if (m.Y == 0.0 || m.Y == 1.0) {
              throw Error(Errc::unsupported, "CGMY with Y in {0, 1}");
            }
            return cgmy_exponent(m, u);
          },
          [u](const CompoundPoisson& cp) {
            const LawMoments lm = law_moments(cp.law, u);
            const double mean = law_mean(cp.law);
            ExponentDerivatives d;
            d.value = cp.intensity * (lm.m0 - 1.0 - kI * u * mean);
            d.first = cp.intensity * kI * (lm.m1 - mean);
            d.second = -cp.intensity * lm.m2;
            return d;
          },
          [u](const VarianceGamma& vg) { return vg_exponent(vg, u); }},
      jumps);
}

ExponentDerivatives exponent_derivatives(const LevyModel& model, cplx u) {
  ExponentDerivatives d = jump_exponent(model.jumps, u);
  d.value += -0.5 * model.sigma2 * u * u + kI * model.gamma * u;
  d.first += -model.sigma2 * u + kI * model.gamma;
  d.second += -model.sigma2;
  return d;
}

cplx characteristic_exponent(const LevyModel& model, cplx u) {
  return exponent_derivatives(model, u).value;
}

cplx characteristic_function(const LevyModel& model, double t, cplx u) {
  return std::exp(t * characteristic_exponent(model, u));
}

cplx psi_second_derivative(const LevyModel& model, double u) {
  return exponent_derivatives(model, cplx{u, 0.0}).second;
}

double martingale_drift(double sigma2, const JumpMeasureSpec& jumps) {
  validate(jumps);
  const cplx at = {0.0, -1.0};
  if (!contains(admissible_strip(jumps), at.imag())) {
    throw Error(Errc::divergence,
                "martingale drift: exponential moment of the jumps does not "
                "exist (CGMY needs M > 1)");
  }
  const double jump_part = jump_exponent(jumps, at).value.real();
  if (!std::isfinite(jump_part)) {
    throw Error(Errc::divergence, "martingale drift: int (e^x-1-x) nu diverges");
  }
  return -0.5 * sigma2 - jump_part;
}

LevyModel LevyModel::martingale(double sigma2, JumpMeasureSpec jumps) {
  if (!(sigma2 >= 0.0)) throw Error(Errc::domain, "sigma^2 must be >= 0");
  const double gamma = martingale_drift(sigma2, jumps);
  return LevyModel{sigma2, gamma, std::move(jumps)};
}

TailIntegralOracle::TailIntegralOracle(JumpMeasureSpec jumps, double rel_tol)
    : jumps_(std::move(jumps)), rel_tol_(rel_tol) {
  validate(jumps_);
}

double TailIntegralOracle::tail_integral(double t) const {
  if (t == 0.0) throw Error(Errc::domain, "tail_integral: t must be nonzero");
  const bool up = t > 0.0;
  const double a = std::abs(t);
  auto quad = [&](auto&& density) {
    // Near-field piece on [a, a + 1] plus an exp-sinh tail.
    auto f = [&](double x) { return density(x); };
    return integrate_adaptive(f, a, a + 1.0, rel_tol_) +
           integrate_adaptive(f, a + 1.0, kInf, rel_tol_);
  };
  return std::visit(
      Overloaded{
          [](const NoJumps&) { return 0.0; },
          [&](const Cgmy& m) {
            return quad([&](double x) { return cgmy_density(m, up ? x : -x); });
          },
          [&](const VarianceGamma& vg) {
            const Cgmy m = vg_as_cgmy(vg);
            return quad([&](double x) { return cgmy_density(m, up ? x : -x); });
          },
          [&](const CompoundPoisson& cp) {
            return std::visit(
                Overloaded{
                    [&](const DoubleExponentialJumps& d) {
                      return up ? cp.intensity * d.p_up * std::exp(-d.rate_up * a)
                                : cp.intensity * (1.0 - d.p_up) *
                                      std::exp(-d.rate_down * a);
                    },
                    [&](const NormalJumps& n) {
                      const double z = (t - n.mean) / n.sd;
                      return cp.intensity * (up ? normal_cdf(-z) : normal_cdf(z));
                    },
                    [&](const CustomJumps& c) {
                      return cp.intensity *
                             quad([&](double x) { return c.pdf(up ? x : -x); });
                    }},
                cp.law);
          }},
      jumps_);
}

double true_quantile(const TailIntegralOracle& oracle, double tau, Side side) {
  if (!(tau > 0.0)) throw Error(Errc::domain, "true_quantile: tau must be > 0");
  const double s = sign_of(side);
  if (const auto mass = tail_mass(oracle.measure(), side); mass && tau >= *mass) {
    throw Error(Errc::no_solution, "true_quantile: tau = " + std::to_string(tau) +
                                       " exceeds the tail mass " +
                                       std::to_string(*mass));
  }
  auto excess = [&](double t) { return oracle.tail_integral(s * t) - tau; };
  double hi = 1.0;
  while (excess(hi) > 0.0) {
    hi *= 2.0;
    if (hi > 1e8) throw Error(Errc::no_solution, "true_quantile: no upper bracket");
  }
  double lo = 0.5 * hi;
  while (excess(lo) < 0.0) {
    lo *= 0.5;
    if (lo < 1e-300) {
      throw Error(Errc::no_solution, "true_quantile: no lower bracket");
    }
  }
  return bracketed_root(excess, lo, hi, kQuantileTol);
}

double bowley_skewness(const TailIntegralOracle& oracle, double tau) {
  const double qm = true_quantile(oracle, tau, Side::negative);
  const double qp = true_quantile(oracle, tau, Side::positive);
  return std::abs(qm - qp) / (qm + qp);
}

}  // namespace levyq
