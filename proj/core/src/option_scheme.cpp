#include "levyq/option_scheme.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "levyq/errors.hpp"

namespace levyq {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double black_scholes_call(double x, double v) {
  const double s = std::sqrt(v);
  const double d1 = (-x + 0.5 * v) / s;
  return normal_cdf(d1) - std::exp(x) * normal_cdf(d1 - s);
}

double black_scholes_put(double x, double v) {
  const double s = std::sqrt(v);
  const double d1 = (-x + 0.5 * v) / s;
  return std::exp(x) * normal_cdf(-(d1 - s)) - normal_cdf(-d1);
}

struct PricingTransform {
  double reference_variance;  // total variance s_ref^2 T of the control
  std::vector<double> residual;  // O - O_BS at the requested points
};

PricingTransform pricing_residual(const LevyModel& model, double maturity,
                                  std::span<const double> xs,
                                  const OptionPricingSettings& settings) {
  if (!(maturity > 0.0)) throw Error(Errc::domain, "maturity must be > 0");
  const cplx minus_i{0.0, -1.0};
  const cplx at_minus_i = characteristic_function(model, maturity, minus_i);
  if (std::abs(at_minus_i - 1.0) > 1e-8) {
    throw Error(Errc::martingale_violation,
                "option_function: phi_T(-i) != 1, model is not martingale-fixed");
  }
  double s2 = settings.reference_sigma2;
  if (!(s2 > 0.0)) s2 = model.sigma2 + second_moment(model.jumps);
  if (!(s2 > 0.0)) s2 = 0.04;
  const LevyModel reference{s2, -0.5 * s2, NoJumps{}};

  auto integrand = [&](double u) {
    const cplx v{u, -1.0};
    const cplx num = characteristic_function(reference, maturity, v) -
                     characteristic_function(model, maturity, v);
    return num / (u * v);
  };
  auto envelope = [&](double u) {
    const cplx v{u, -1.0};
    return (std::abs(characteristic_function(reference, maturity, v)) +
            std::abs(characteristic_function(model, maturity, v))) /
           (u * u);
  };
  double cutoff = 10.0;
  while (envelope(cutoff) > settings.tail_eps && cutoff < 1e5) cutoff *= 1.2;

  const auto grid = FrequencyGrid::with_spacing(cutoff, settings.freq_step);
  const std::size_t m = grid.size();
  std::vector<cplx> samples(m);
  for (std::size_t j = m / 2; j < m; ++j) {
    samples[j] = integrand(grid.node(j));
    samples[m - 1 - j] = std::conj(samples[j]);
  }
  const auto values = inverse_fourier(samples, grid, xs);
  PricingTransform out;
  out.reference_variance = s2 * maturity;
  out.residual.resize(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out.residual[i] = values[i].real();
  return out;
}

// I_m = int_0^w s^m e^{zs} ds for m = 0..mmax.
void moment_integrals(cplx z, double w, cplx ezw, int mmax, cplx* out) {
  const cplx zw = z * w;
  if (std::abs(zw) < 6.0) {
    cplx terms[64];
    terms[0] = 1.0;
    int count = 1;
    for (; count < 64; ++count) {
      terms[count] = terms[count - 1] * zw / static_cast<double>(count);
      if (std::abs(terms[count]) < 1e-18) {
        ++count;
        break;
      }
    }
    double wpow = w;
    for (int m = 0; m <= mmax; ++m) {
      cplx sum{0.0, 0.0};
      for (int k = count - 1; k >= 0; --k) {
        sum += terms[k] / static_cast<double>(m + k + 1);
      }
      out[m] = wpow * sum;
      wpow *= w;
    }
    return;
  }
  out[0] = (ezw - 1.0) / z;
  double wpow = 1.0;
  for (int m = 1; m <= mmax; ++m) {
    wpow *= w;
    out[m] = (wpow * ezw - static_cast<double>(m) * out[m - 1]) / z;
  }
}

std::vector<std::array<double, 4>> natural_cubic(std::span<const double> x,
                                                 std::span<const double> y) {
  const std::size_t n = x.size();
  std::vector<double> second(n, 0.0);
  if (n > 2) {
    // Tridiagonal solve for interior second derivatives.
    std::vector<double> diag(n, 0.0), upper(n, 0.0), rhs(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = x[i] - x[i - 1];
      const double h1 = x[i + 1] - x[i];
      diag[i] = 2.0 * (h0 + h1);
      upper[i] = h1;
      rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
    }
    for (std::size_t i = 2; i + 1 < n; ++i) {
      const double lower = x[i] - x[i - 1];
      const double f = lower / diag[i - 1];
      diag[i] -= f * upper[i - 1];
      rhs[i] -= f * rhs[i - 1];
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
      second[i] = (rhs[i] - upper[i] * second[i + 1]) / diag[i];
      if (i == 1) break;
    }
  }
  std::vector<std::array<double, 4>> coeffs(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = x[i + 1] - x[i];
    coeffs[i] = {y[i],
                 (y[i + 1] - y[i]) / h - h * (2.0 * second[i] + second[i + 1]) / 6.0,
                 0.5 * second[i], (second[i + 1] - second[i]) / (6.0 * h)};
  }
  return coeffs;
}

}  // namespace

void OptionChain::validate() const {
  if (!(maturity > 0.0)) throw Error(Errc::domain, "chain: maturity must be > 0");
  if (xs.size() != prices.size() || xs.size() != noise_levels.size()) {
    throw Error(Errc::domain, "chain: column lengths differ");
  }
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) {
      throw Error(Errc::domain, "chain: strikes must be strictly increasing");
    }
  }
  for (double d : noise_levels) {
    if (!(d >= 0.0)) throw Error(Errc::domain, "chain: noise levels must be >= 0");
  }
}

double black_scholes_option_function(double x, double total_variance) {
  return x >= 0.0 ? black_scholes_call(x, total_variance)
                  : black_scholes_put(x, total_variance);
}

std::vector<double> option_function(const LevyModel& model, double maturity,
                                    std::span<const double> xs,
                                    const OptionPricingSettings& settings) {
  const auto transform = pricing_residual(model, maturity, xs, settings);
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out[i] = black_scholes_option_function(xs[i], transform.reference_variance) +
             transform.residual[i];
  }
  return out;
}

double option_function(const LevyModel& model, double maturity, double x,
                       const OptionPricingSettings& settings) {
  const double xs[] = {x};
  return option_function(model, maturity, xs, settings)[0];
}

std::vector<CallPut> call_put_values(const LevyModel& model, double maturity,
                                     std::span<const double> xs,
                                     const OptionPricingSettings& settings) {
  const auto transform = pricing_residual(model, maturity, xs, settings);
  std::vector<CallPut> out(xs.size());
  const double v = transform.reference_variance;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    // O - O_BS equals C - C_BS and P - P_BS alike.
    out[i] = {black_scholes_call(xs[i], v) + transform.residual[i],
              black_scholes_put(xs[i], v) + transform.residual[i]};
  }
  return out;
}

double StrikeLaw::quantile(double p) const {
  if (!(variance > 0.0)) throw Error(Errc::domain, "strike law: variance must be > 0");
  boost::math::normal_distribution<double> law(mean, std::sqrt(variance));
  return boost::math::quantile(law, p);
}

SyntheticDesign make_design(const LevyModel& model, double maturity,
                            double rate, std::size_t n, const StrikeLaw& law,
                            const OptionPricingSettings& settings) {
  if (n < 1) throw Error(Errc::domain, "design needs at least one strike");
  SyntheticDesign design;
  design.maturity = maturity;
  design.rate = rate;
  design.xs.resize(n);
  for (std::size_t j = 1; j <= n; ++j) {
    design.xs[j - 1] = law.quantile(static_cast<double>(j) / static_cast<double>(n + 1));
  }
  design.true_prices = option_function(model, maturity, design.xs, settings);
  for (double& p : design.true_prices) p = std::max(p, 0.0);
  return design;
}

OptionChain add_noise(const SyntheticDesign& design, double noise_fraction,
                      std::uint64_t seed) {
  if (!(noise_fraction >= 0.0)) {
    throw Error(Errc::domain, "noise fraction must be >= 0");
  }
  OptionChain chain;
  chain.maturity = design.maturity;
  chain.rate = design.rate;
  chain.xs = design.xs;
  chain.prices.resize(design.xs.size());
  chain.noise_levels.resize(design.xs.size());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t j = 0; j < design.xs.size(); ++j) {
    const double delta = noise_fraction * design.true_prices[j];
    const double eps = normal(rng);
    chain.noise_levels[j] = delta;
    chain.prices[j] = design.true_prices[j] + delta * eps;
  }
  return chain;
}

OptionChain generate_synthetic_chain(const LevyModel& model, double maturity,
                                     double rate, std::size_t n,
                                     double noise_fraction,
                                     const StrikeLaw& law, std::uint64_t seed) {
  return add_noise(make_design(model, maturity, rate, n, law), noise_fraction,
                   seed);
}

SplineOptionFunction::SplineOptionFunction(std::span<const double> xs,
                                           std::span<const double> values,
                                           int degree, double pad_spacings)
    : degree_(degree) {
  const std::size_t n = xs.size();
  if (n < 2 || values.size() != n) {
    throw Error(Errc::domain, "spline needs at least two matching points");
  }
  if (degree != 1 && degree != 3) {
    throw Error(Errc::domain, "spline degree must be 1 or 3");
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (!(xs[i] > xs[i - 1])) {
      throw Error(Errc::domain, "spline knots must be strictly increasing");
    }
  }
  const double pad =
      pad_spacings * (xs[n - 1] - xs[0]) / static_cast<double>(n - 1);
  knots_.reserve(n + 2);
  knots_.push_back(xs[0] - pad);
  knots_.insert(knots_.end(), xs.begin(), xs.end());
  knots_.push_back(xs[n - 1] + pad);

  coeffs_.reserve(n + 1);
  coeffs_.push_back({0.0, values[0] / pad, 0.0, 0.0});
  if (degree == 1) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      coeffs_.push_back(
          {values[i], (values[i + 1] - values[i]) / (xs[i + 1] - xs[i]), 0.0, 0.0});
    }
  } else {
    for (const auto& c : natural_cubic(xs, values)) coeffs_.push_back(c);
  }
  coeffs_.push_back({values[n - 1], -values[n - 1] / pad, 0.0, 0.0});
}

SplineOptionFunction::SplineOptionFunction(const OptionChain& chain, int degree)
    : SplineOptionFunction(chain.xs, chain.prices, degree) {}

double SplineOptionFunction::operator()(double x) const {
  if (x < knots_.front() || x > knots_.back()) return 0.0;
  auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
  std::size_t i = static_cast<std::size_t>(it - knots_.begin());
  i = std::min(i == 0 ? 0 : i - 1, coeffs_.size() - 1);
  const double s = x - knots_[i];
  const auto& c = coeffs_[i];
  return c[0] + s * (c[1] + s * (c[2] + s * c[3]));
}

std::array<cplx, 3> SplineOptionFunction::weighted_transforms(double u) const {
  const cplx z{-1.0, u};
  const int mmax = degree_ + 2;
  std::array<cplx, 3> out{};
  cplx e_left = std::exp(z * knots_[0]);
  cplx moments[8];
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    const double a = knots_[i];
    const double w = knots_[i + 1] - a;
    const cplx e_right = std::exp(z * knots_[i + 1]);
    moment_integrals(z, w, e_right / e_left, mmax, moments);
    const auto& c = coeffs_[i];
    // (a + s)^k p(s) expanded in s.
    cplx s0{0.0, 0.0}, s1{0.0, 0.0}, s2{0.0, 0.0};
    for (int m = 0; m <= degree_; ++m) {
      const double cm = c[static_cast<std::size_t>(m)];
      if (cm == 0.0) continue;
      s0 += cm * moments[m];
      s1 += cm * (a * moments[m] + moments[m + 1]);
      s2 += cm * (a * a * moments[m] + 2.0 * a * moments[m + 1] + moments[m + 2]);
    }
    out[0] += e_left * s0;
    out[1] += e_left * s1;
    out[2] += e_left * s2;
    e_left = e_right;
  }
  return out;
}

cplx SplineOptionFunction::weighted_transform(int k, double u) const {
  if (k < 0 || k > 2) throw Error(Errc::domain, "weighted_transform: k in {0,1,2}");
  return weighted_transforms(u)[static_cast<std::size_t>(k)];
}

cplx phi_tilde(const std::array<cplx, 3>& f, double u) {
  return 1.0 - u * cplx{u, 1.0} * f[0];
}

cplx phi_tilde(const SplineOptionFunction& spline, double u) {
  if (u == 0.0) return {1.0, 0.0};
  return phi_tilde(spline.weighted_transforms(u), u);
}

double TrustRegion::threshold(double u) const {
  const double a = 1.0 + std::abs(u);
  return scale * a * a / std::sqrt(n);
}

PsiTilde psi_tilde_derivatives(const std::array<cplx, 3>& f, double maturity,
                               double u, const TrustRegion& trust) {
  PsiTilde out;
  out.phi = phi_tilde(f, u);
  if (!trust.trusted(u, out.phi)) {
    out.trusted = false;
    out.first = out.second = {0.0, 0.0};
    return out;
  }
  const cplx iu{0.0, u};
  const cplx num1 = (2.0 * u + kI) * f[0] + u * (iu - 1.0) * f[1];
  const cplx num2 =
      2.0 * f[0] + (4.0 * iu - 2.0) * f[1] - (u * u + iu) * f[2];
  const cplx ratio = num1 / out.phi;
  out.first = -ratio / maturity;
  out.second = -num2 / (maturity * out.phi) - ratio * ratio / maturity;
  return out;
}

PsiTilde psi_tilde_derivatives(const SplineOptionFunction& spline,
                               double maturity, double u,
                               const TrustRegion& trust) {
  return psi_tilde_derivatives(spline.weighted_transforms(u), maturity, u, trust);
}

Psi2Estimate psi2_from_chain(const SplineOptionFunction& spline, double maturity,
                             const TrustRegion& trust, double valid_cutoff) {
  auto eval = [spline, maturity, trust](double u) {
    return psi_tilde_derivatives(spline, maturity, u, trust).second;
  };
  return Psi2Estimate(eval, valid_cutoff, Scheme::option);
}

OptionSpectra sample_option_spectra(const SplineOptionFunction& spline,
                                    double maturity, const FrequencyGrid& grid,
                                    const TrustRegion& trust) {
  const std::size_t m = grid.size();
  OptionSpectra s{grid, maturity, std::vector<cplx>(m), std::vector<cplx>(m),
                  std::vector<cplx>(m), std::vector<bool>(m, false)};
  for (std::size_t j = m / 2; j < m; ++j) {
    const double u = grid.node(j);
    const PsiTilde p = psi_tilde_derivatives(spline, maturity, u, trust);
    const std::size_t k = m - 1 - j;
    s.phi[j] = p.phi;
    s.psi1[j] = p.first;
    s.psi2[j] = p.second;
    s.trusted[j] = p.trusted;
    s.phi[k] = std::conj(p.phi);
    s.psi1[k] = std::conj(p.first);
    s.psi2[k] = std::conj(p.second);
    s.trusted[k] = p.trusted;
  }
  return s;
}

double triangular_kde(std::span<const double> xs, double bandwidth, double x) {
  double sum = 0.0;
  for (double xj : xs) {
    const double v = std::abs(x - xj) / bandwidth;
    if (v < 1.0) sum += 1.0 - v;
  }
  return sum / (static_cast<double>(xs.size()) * bandwidth);
}

double silverman_bandwidth(std::span<const double> xs) {
  const std::size_t n = xs.size();
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) /
                      static_cast<double>(n);
  double ss = 0.0;
  for (double v : sorted) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  auto quantile = [&](double p) {
    const double pos = p * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, n - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  };
  const double iqr = quantile(0.75) - quantile(0.25);
  double spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0)) spread = sd;
  return 1.06 * spread * std::pow(static_cast<double>(n), -0.2);
}

double NoiseProfile::rho_at(double x) const {
  if (x <= lo) return rho.front();
  if (x >= hi) return rho.back();
  const double pos = (x - lo) / (hi - lo) * static_cast<double>(grid.size() - 1);
  const auto i = std::min(static_cast<std::size_t>(pos), grid.size() - 2);
  const double f = pos - static_cast<double>(i);
  return (1.0 - f) * rho[i] + f * rho[i + 1];
}

double NoiseProfile::density_at(double x) const {
  const double pos = std::clamp((x - lo) / (hi - lo), 0.0, 1.0) *
                     static_cast<double>(grid.size() - 1);
  const auto i = std::min(static_cast<std::size_t>(pos), grid.size() - 2);
  const double f = pos - static_cast<double>(i);
  return (1.0 - f) * design_density[i] + f * design_density[i + 1];
}

NoiseProfile estimate_noise_profile(const OptionChain& chain) {
  const std::size_t n = chain.size();
  if (n < 5) throw Error(Errc::domain, "noise profile needs at least 5 strikes");
  const auto& xs = chain.xs;
  if (std::all_of(xs.begin(), xs.end(), [&](double x) { return x == xs.front(); })) {
    throw Error(Errc::degenerate_design, "noise profile: all strikes coincide");
  }
  chain.validate();
  NoiseProfile p;
  p.bandwidth = silverman_bandwidth(xs);
  p.lo = xs.front();
  p.hi = xs.back();
  constexpr std::size_t kPoints = 1000;
  p.grid.resize(kPoints);
  p.design_density.resize(kPoints);
  p.rho.resize(kPoints);
  const double step = (p.hi - p.lo) / static_cast<double>(kPoints - 1);
  std::size_t seg = 0;
  for (std::size_t i = 0; i < kPoints; ++i) {
    const double x = i + 1 == kPoints ? p.hi : p.lo + step * static_cast<double>(i);
    p.grid[i] = x;
    while (seg + 2 < n && x > xs[seg + 1]) ++seg;
    const double w = (x - xs[seg]) / (xs[seg + 1] - xs[seg]);
    const double delta = (1.0 - w) * chain.noise_levels[seg] +
                         w * chain.noise_levels[seg + 1];
    const double f = triangular_kde(xs, p.bandwidth, x);
    p.design_density[i] = f;
    p.rho[i] = f > 0.0 ? delta / std::sqrt(f)
                       : (delta > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
  }
  double l2 = 0.0;
  for (std::size_t i = 0; i < kPoints; ++i) {
    const double x = p.grid[i];
    const double base = std::exp(-x) * p.rho[i];
    for (std::size_t k = 0; k < 3; ++k) {
      p.sup_norms[k] = std::max(p.sup_norms[k],
                                std::pow(std::abs(x), static_cast<double>(k)) * base);
    }
    const double wgt = (i == 0 || i + 1 == kPoints) ? 0.5 : 1.0;
    l2 += wgt * base * base * step;
  }
  p.weighted_l2 = std::sqrt(l2);
  return p;
}

}  // namespace levyq
