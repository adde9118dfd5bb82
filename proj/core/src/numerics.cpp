#include "levyq/numerics.hpp"

#include <fftw3.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>

#include "levyq/errors.hpp"

namespace levyq {

const char* to_string(Errc code) {
  switch (code) {
    case Errc::domain: return "domain";
    case Errc::unsupported: return "unsupported";
    case Errc::divergence: return "divergence";
    case Errc::no_solution: return "no_solution";
    case Errc::no_bracket: return "no_bracket";
    case Errc::martingale_violation: return "martingale_violation";
    case Errc::incompatible_method: return "incompatible_method";
    case Errc::degenerate_design: return "degenerate_design";
    case Errc::empty_grid: return "empty_grid";
    case Errc::guard_dominated: return "guard_dominated";
    case Errc::parse: return "parse";
  }
  return "unknown";
}

bool is_power_of_two(std::size_t n) noexcept {
  return n != 0 && (n & (n - 1)) == 0;
}

FrequencyGrid::FrequencyGrid(double cutoff, std::size_t points, bool midpoint)
    : cutoff_(cutoff), points_(points), midpoint_(midpoint) {
  if (!(cutoff > 0.0) || !std::isfinite(cutoff)) {
    throw Error(Errc::domain, "frequency grid cutoff must be positive");
  }
  if (points < 2) {
    throw Error(Errc::domain, "frequency grid needs at least two points");
  }
  spacing_ = midpoint ? 2.0 * cutoff / static_cast<double>(points)
                      : 2.0 * cutoff / static_cast<double>(points - 1);
}

FrequencyGrid FrequencyGrid::with_spacing(double cutoff, double spacing) {
  if (!(spacing > 0.0)) {
    throw Error(Errc::domain, "frequency spacing must be positive");
  }
  auto half = static_cast<std::size_t>(std::ceil(cutoff / spacing));
  half = std::max<std::size_t>(half, 1);
  return FrequencyGrid(spacing * static_cast<double>(half), 2 * half, true);
}

double FrequencyGrid::node(std::size_t j) const noexcept {
  const double offset = midpoint_ ? 0.5 : 0.0;
  return -cutoff_ + (static_cast<double>(j) + offset) * spacing_;
}

double FrequencyGrid::weight(std::size_t j) const noexcept {
  if (!midpoint_ && (j == 0 || j + 1 == points_)) return 0.5 * spacing_;
  return spacing_;
}

std::vector<double> FrequencyGrid::nodes() const {
  std::vector<double> out(points_);
  for (std::size_t j = 0; j < points_; ++j) out[j] = node(j);
  return out;
}

SampledFunction::SampledFunction(std::vector<double> abscissae,
                                 std::vector<cplx> ordinates)
    : x_(std::move(abscissae)), y_(std::move(ordinates)) {
  if (x_.size() != y_.size()) {
    throw Error(Errc::domain, "sampled function: length mismatch");
  }
  for (std::size_t i = 1; i < x_.size(); ++i) {
    if (!(x_[i] > x_[i - 1])) {
      throw Error(Errc::domain,
                  "sampled function: abscissae must be strictly increasing");
    }
  }
}

std::vector<cplx> inverse_fourier(std::span<const cplx> samples,
                                  const FrequencyGrid& grid,
                                  std::span<const double> targets) {
  if (samples.size() != grid.size()) {
    throw Error(Errc::domain, "inverse_fourier: sample count != grid size");
  }
  std::vector<cplx> weighted(samples.size());
  for (std::size_t j = 0; j < samples.size(); ++j) {
    weighted[j] = samples[j] * grid.weight(j);
  }
  const double u0 = grid.node(0);
  const double du = grid.spacing();
  std::vector<cplx> out(targets.size());
  for (std::size_t k = 0; k < targets.size(); ++k) {
    const double x = targets[k];
    // exp(-i u_j x) by rotation; renormalised periodically against drift.
    const cplx step = std::polar(1.0, -du * x);
    cplx rot = std::polar(1.0, -u0 * x);
    cplx acc{0.0, 0.0};
    for (std::size_t j = 0; j < weighted.size(); ++j) {
      acc += weighted[j] * rot;
      rot *= step;
      if ((j & 255) == 255) {
        rot = std::polar(1.0, -(u0 + static_cast<double>(j + 1) * du) * x);
      }
    }
    out[k] = acc / (2.0 * kPi);
  }
  return out;
}

SampledFunction inverse_fourier(const Spectrum& spectrum,
                                const FrequencyGrid& grid,
                                std::span<const double> targets) {
  std::vector<cplx> samples(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) samples[j] = spectrum(grid.node(j));
  std::vector<double> xs(targets.begin(), targets.end());
  return SampledFunction(std::move(xs), inverse_fourier(samples, grid, targets));
}

namespace {

struct PlanCache {
  std::mutex mutex;
  std::map<std::size_t, fftw_plan> plans;

  ~PlanCache() {
    for (auto& [n, plan] : plans) fftw_destroy_plan(plan);
  }

  fftw_plan get(std::size_t n) {
    std::lock_guard lock(mutex);
    auto it = plans.find(n);
    if (it != plans.end()) return it->second;
    auto* in = fftw_alloc_complex(n);
    auto* out = fftw_alloc_complex(n);
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), in, out,
                                      FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_free(in);
    fftw_free(out);
    plans.emplace(n, plan);
    return plan;
  }
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

struct FftwDeleter {
  void operator()(fftw_complex* p) const noexcept { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex[], FftwDeleter>;

}  // namespace

SpatialLattice inverse_fourier_lattice(std::span<const cplx> samples,
                                       double spacing,
                                       std::size_t fft_size) {
  const std::size_t m = samples.size();
  if (!is_power_of_two(fft_size) || m > fft_size || m % 2 != 0) {
    throw Error(Errc::domain,
                "inverse_fourier_lattice: need even sample count <= "
                "power-of-two fft size");
  }
  fftw_plan plan = plan_cache().get(fft_size);
  FftwBuffer in(fftw_alloc_complex(fft_size));
  FftwBuffer out(fftw_alloc_complex(fft_size));
  for (std::size_t j = 0; j < fft_size; ++j) {
    cplx v{0.0, 0.0};
    if (j < m) v = (j % 2 == 0) ? samples[j] : -samples[j];
    in[j][0] = v.real();
    in[j][1] = v.imag();
  }
  fftw_execute_dft(plan, in.get(), out.get());

  SpatialLattice lattice;
  lattice.step = 2.0 * kPi / (static_cast<double>(fft_size) * spacing);
  lattice.values.resize(fft_size);
  const double u0 = (0.5 - 0.5 * static_cast<double>(m)) * spacing;
  for (std::size_t k = 0; k < fft_size; ++k) {
    const double x = lattice.position(k);
    const cplx a{out[k][0], out[k][1]};
    lattice.values[k] = spacing / (2.0 * kPi) * std::polar(1.0, -u0 * x) * a;
  }
  return lattice;
}

double bracketed_root(const std::function<double(double)>& f, double lo,
                      double hi, double tol) {
  if (lo > hi) std::swap(lo, hi);
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (!(flo * fhi < 0.0)) {
    throw Error(Errc::no_bracket, "bracketed_root: no sign change on [" +
                                      std::to_string(lo) + ", " +
                                      std::to_string(hi) + "]");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fmid = f(mid);
    if (fmid == 0.0) return mid;
    if ((fmid < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double rel_tol) {
  if (std::isinf(b)) {
    boost::math::quadrature::exp_sinh<double> integrator;
    auto shifted = [&](double s) { return f(a + s); };
    return integrator.integrate(shifted, rel_tol);
  }
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, 20, rel_tol);
}

std::vector<double> cumulative_trapezoid(std::span<const double> values,
                                         double step) {
  std::vector<double> out(values.size(), 0.0);
  for (std::size_t i = 1; i < values.size(); ++i) {
    out[i] = out[i - 1] + 0.5 * step * (values[i] + values[i - 1]);
  }
  return out;
}

}  // namespace levyq
