#include "levyq/inversion.hpp"

#include <algorithm>
#include <cmath>

#include "levyq/errors.hpp"

namespace levyq {

namespace {

struct SampledSpectrum {
  FrequencyGrid grid;
  std::vector<cplx> values;
};

std::shared_ptr<const SampledSpectrum> smoothed_spectrum(
    const Psi2Estimate& psi2, const SpectralKernel& kernel, double h,
    std::size_t points) {
  if (!(h > 0.0)) throw Error(Errc::domain, "bandwidth must be > 0");
  const double cutoff = std::min(1.0 / h, psi2.valid_cutoff());
  FrequencyGrid grid(cutoff, points, true);
  auto values = psi2.sample(grid);
  for (std::size_t j = 0; j < grid.size(); ++j) values[j] *= kernel(h * grid.node(j));
  return std::make_shared<const SampledSpectrum>(
      SampledSpectrum{grid, std::move(values)});
}

}  // namespace

void InversionSettings::validate() const {
  if (!(x_max > 0.0)) throw Error(Errc::domain, "x_max must be > 0");
  if (!(freq_step > 0.0)) throw Error(Errc::domain, "freq_step must be > 0");
  if (!is_power_of_two(fft_size)) {
    throw Error(Errc::domain, "fft_size must be a power of two");
  }
  if (direct_points < 2 || quantile_grid < 2) {
    throw Error(Errc::domain, "grid sizes must be >= 2");
  }
  if (!(root_tol > 0.0)) throw Error(Errc::domain, "root_tol must be > 0");
}

DensityEstimate estimate_density(const Psi2Estimate& psi2,
                                 const SpectralKernel& kernel, double h,
                                 const InversionSettings& settings) {
  settings.validate();
  auto spectrum = smoothed_spectrum(psi2, kernel, h, settings.direct_points);
  auto eval = [spectrum](double t) {
    if (t == 0.0) throw Error(Errc::domain, "density estimate undefined at 0");
    const double xs[] = {t};
    const double m = inverse_fourier(spectrum->values, spectrum->grid, xs)[0].real();
    return -m / (t * t);
  };
  return DensityEstimate(eval, h, kernel.name());
}

DistributionEstimate estimate_distribution(const Psi2Estimate& psi2,
                                           const SpectralKernel& kernel,
                                           double h,
                                           const InversionSettings& settings) {
  const DensityEstimate density = estimate_density(psi2, kernel, h, settings);
  const double x_max = settings.x_max;
  auto eval = [density, x_max](double t) {
    if (t == 0.0) throw Error(Errc::domain, "distribution estimate undefined at 0");
    if (std::abs(t) >= x_max) return 0.0;
    auto f = [&](double x) { return density(x); };
    return t > 0.0 ? integrate_adaptive(f, t, x_max, 1e-10)
                   : integrate_adaptive(f, -x_max, t, 1e-10);
  };
  return DistributionEstimate(eval, h, kernel.name());
}

double density_from_psi2(const Psi2Estimate& psi2, const SpectralKernel& kernel,
                         double h, double t, const InversionSettings& settings) {
  return estimate_density(psi2, kernel, h, settings)(t);
}

double distribution_from_psi2(const Psi2Estimate& psi2,
                              const SpectralKernel& kernel, double h, double t,
                              const InversionSettings& settings) {
  return estimate_distribution(psi2, kernel, h, settings)(t);
}

QuantileEstimate quantile_from_distribution(const DistributionEstimate& dist,
                                            double tau, double eta, Side side,
                                            const InversionSettings& settings) {
  if (!(tau > 0.0)) throw Error(Errc::domain, "tau must be > 0");
  if (!(eta > 0.0) || !(eta < settings.x_max)) {
    throw Error(Errc::domain, "eta must lie in (0, x_max)");
  }
  QuantileEstimate out;
  out.side = side;
  out.tau = tau;
  out.bandwidth = dist.bandwidth();
  const double s = sign_of(side);
  auto excess = [&](double t) { return dist(s * t) - tau; };

  const std::size_t points = settings.quantile_grid;
  const double ratio = std::log(settings.x_max / eta) / static_cast<double>(points - 1);
  std::vector<double> ts(points), vals(points);
  for (std::size_t i = 0; i < points; ++i) {
    ts[i] = i + 1 == points ? settings.x_max
                            : eta * std::exp(ratio * static_cast<double>(i));
    vals[i] = excess(ts[i]);
  }
  for (std::size_t i = 0; i < points; ++i) {
    if (vals[i] == 0.0) {
      out.value = ts[i];
      out.at_threshold = i == 0;
      return out;
    }
    if (i + 1 < points && (vals[i] < 0.0) != (vals[i + 1] < 0.0) &&
        vals[i + 1] != 0.0) {
      out.value = bracketed_root(excess, ts[i], ts[i + 1], settings.root_tol);
      return out;
    }
  }
  if (vals[0] < 0.0) {
    out.value = eta;
    out.at_threshold = true;
    return out;
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < points; ++i) {
    if (std::abs(vals[i]) < std::abs(vals[best])) best = i;
  }
  out.value = ts[best];
  out.at_threshold = best == 0;
  return out;
}

LatticeEstimate::LatticeEstimate(SpatialLattice lattice, double h,
                                 std::string kernel, double x_max)
    : step_(lattice.step),
      origin_(lattice.origin()),
      h_(h),
      kernel_(std::move(kernel)),
      x_max_(x_max) {
  const std::size_t n = lattice.values.size();
  if (-origin_ <= x_max + 2.0 * step_) {
    throw Error(Errc::domain, "FFT lattice does not cover [-x_max, x_max]");
  }
  m_.resize(n);
  for (std::size_t k = 0; k < n; ++k) m_[k] = lattice.values[k].real();
  upper_tail_.assign(n, 0.0);
  lower_tail_.assign(n, 0.0);

  auto nu = [&](std::size_t k) {
    const double x = lattice.position(k);
    return -m_[k] / (x * x);
  };
  const std::size_t zero = n / 2;
  // int over [x_k, x_{k+1}] by the four-point rule; one-sided next to x = 0.
  auto segment = [&](std::size_t k) {
    if (k == zero + 1) {
      return step_ / 24.0 * (9.0 * nu(k) + 19.0 * nu(k + 1) - 5.0 * nu(k + 2) + nu(k + 3));
    }
    if (k + 2 == zero) {
      return step_ / 24.0 * (nu(k - 2) - 5.0 * nu(k - 1) + 19.0 * nu(k) + 9.0 * nu(k + 1));
    }
    return step_ / 24.0 * (-nu(k - 1) + 13.0 * nu(k) + 13.0 * nu(k + 1) - nu(k + 2));
  };
  auto hi = static_cast<std::size_t>(std::floor((x_max - origin_) / step_));
  upper_tail_[hi] = (x_max - lattice.position(hi)) * nu(hi);
  for (std::size_t k = hi; k-- > zero + 1;) upper_tail_[k] = upper_tail_[k + 1] + segment(k);
  auto lo = static_cast<std::size_t>(std::ceil((-x_max - origin_) / step_));
  lower_tail_[lo] = (lattice.position(lo) + x_max) * nu(lo);
  for (std::size_t k = lo + 1; k < zero; ++k) lower_tail_[k] = lower_tail_[k - 1] + segment(k - 1);
}

double LatticeEstimate::m_at(double x) const {
  // Catmull-Rom interpolation of the lattice values.
  const double pos = (x - origin_) / step_;
  const auto k = static_cast<std::ptrdiff_t>(std::floor(pos));
  const auto n = static_cast<std::ptrdiff_t>(m_.size());
  if (k < 1 || k + 2 >= n) return 0.0;
  const double f = pos - static_cast<double>(k);
  const double p0 = m_[static_cast<std::size_t>(k - 1)];
  const double p1 = m_[static_cast<std::size_t>(k)];
  const double p2 = m_[static_cast<std::size_t>(k + 1)];
  const double p3 = m_[static_cast<std::size_t>(k + 2)];
  return p1 + 0.5 * f *
                  (p2 - p0 +
                   f * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 +
                        f * (3.0 * (p1 - p2) + p3 - p0)));
}

double LatticeEstimate::density(double t) const {
  if (t == 0.0) throw Error(Errc::domain, "density estimate undefined at 0");
  return -m_at(t) / (t * t);
}

double LatticeEstimate::distribution(double t) const {
  if (t == 0.0) throw Error(Errc::domain, "distribution estimate undefined at 0");
  if (std::abs(t) >= x_max_) return 0.0;
  auto simpson = [&](double a, double b) {
    return (b - a) / 6.0 * (density(a) + 4.0 * density(0.5 * (a + b)) + density(b));
  };
  const auto k = static_cast<std::size_t>(std::floor((t - origin_) / step_));
  const double xk = origin_ + static_cast<double>(k) * step_;
  if (t > 0.0) {
    const double next = xk + step_;
    if (next > x_max_) return simpson(t, x_max_);
    return upper_tail_[k + 1] + simpson(t, next);
  }
  if (xk < -x_max_) return simpson(-x_max_, t);
  return lower_tail_[k] + simpson(xk, t);
}

DensityEstimate LatticeEstimate::density_view() const {
  auto self = std::make_shared<const LatticeEstimate>(*this);
  return DensityEstimate([self](double t) { return self->density(t); }, h_, kernel_);
}

DistributionEstimate LatticeEstimate::distribution_view() const {
  auto self = std::make_shared<const LatticeEstimate>(*this);
  return DistributionEstimate([self](double t) { return self->distribution(t); },
                              h_, kernel_);
}

QuantileEstimate LatticeEstimate::quantile(double tau, double eta, Side side,
                                           const InversionSettings& settings) const {
  DistributionEstimate view([this](double t) { return distribution(t); }, h_,
                            kernel_);
  return quantile_from_distribution(view, tau, eta, side, settings);
}

SpectralInverter::SpectralInverter(FrequencyGrid grid, std::vector<cplx> psi2,
                                   InversionSettings settings)
    : grid_(std::move(grid)), psi2_(std::move(psi2)), settings_(settings) {
  settings_.validate();
  if (!grid_.midpoint() || psi2_.size() != grid_.size()) {
    throw Error(Errc::domain, "SpectralInverter needs samples on a midpoint grid");
  }
  if (grid_.size() > settings_.fft_size) {
    throw Error(Errc::domain, "frequency grid exceeds the FFT length");
  }
}

SpectralInverter::SpectralInverter(const Psi2Estimate& psi2, double min_bandwidth,
                                   InversionSettings settings)
    : grid_(FrequencyGrid::with_spacing(
          std::min(1.0 / min_bandwidth, psi2.valid_cutoff()), settings.freq_step)),
      settings_(settings) {
  settings_.validate();
  if (grid_.size() > settings_.fft_size) {
    throw Error(Errc::domain, "frequency grid exceeds the FFT length");
  }
  psi2_ = psi2.sample(grid_);
}

LatticeEstimate SpectralInverter::at(const SpectralKernel& kernel, double h) const {
  if (!(h > 0.0)) throw Error(Errc::domain, "bandwidth must be > 0");
  std::vector<cplx> smoothed(psi2_.size());
  for (std::size_t j = 0; j < psi2_.size(); ++j) {
    const double w = kernel(h * grid_.node(j));
    smoothed[j] = w == 0.0 ? cplx{} : w * psi2_[j];
  }
  auto lattice = inverse_fourier_lattice(smoothed, grid_.spacing(), settings_.fft_size);
  return LatticeEstimate(std::move(lattice), h, kernel.name(), settings_.x_max);
}

}  // namespace levyq
