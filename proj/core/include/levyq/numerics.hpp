#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

namespace levyq {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

/// Symmetric frequency grid on [-cutoff, cutoff].
///
/// With `midpoint` set the nodes are the cell centres -cutoff + (j+1/2)du,
/// du = 2 cutoff / points, and all quadrature weights equal du. Otherwise the
/// nodes include both endpoints, du = 2 cutoff / (points-1), and the
/// endpoint weights are halved (composite trapezoid). Either way an even
/// number of points never places a node on u = 0.
class FrequencyGrid {
 public:
  FrequencyGrid(double cutoff, std::size_t points, bool midpoint = true);

  /// Midpoint grid with a prescribed spacing, rounded up to an even count.
  static FrequencyGrid with_spacing(double cutoff, double spacing);

  double cutoff() const noexcept { return cutoff_; }
  std::size_t size() const noexcept { return points_; }
  double spacing() const noexcept { return spacing_; }
  bool midpoint() const noexcept { return midpoint_; }

  double node(std::size_t j) const noexcept;
  double weight(std::size_t j) const noexcept;
  std::vector<double> nodes() const;

 private:
  double cutoff_;
  std::size_t points_;
  bool midpoint_;
  double spacing_;
};

/// Ordered samples of a complex-valued function of one real variable.
class SampledFunction {
 public:
  SampledFunction() = default;
  SampledFunction(std::vector<double> abscissae, std::vector<cplx> ordinates);

  std::span<const double> abscissae() const noexcept { return x_; }
  std::span<const cplx> ordinates() const noexcept { return y_; }
  std::size_t size() const noexcept { return x_.size(); }

 private:
  std::vector<double> x_;
  std::vector<cplx> y_;
};

using Spectrum = std::function<cplx(double)>;

/// (1/2pi) * sum_j w_j exp(-i u_j x) g(u_j) at every target x.
SampledFunction inverse_fourier(const Spectrum& spectrum,
                                const FrequencyGrid& grid,
                                std::span<const double> targets);

/// Same transform for a spectrum already sampled on the grid nodes.
std::vector<cplx> inverse_fourier(std::span<const cplx> samples,
                                  const FrequencyGrid& grid,
                                  std::span<const double> targets);

/// Values of an inverse transform on the uniform lattice
/// x_k = (k - N/2) * step, k = 0..N-1.
struct SpatialLattice {
  double step = 0.0;
  std::vector<cplx> values;

  double origin() const noexcept {
    return -0.5 * static_cast<double>(values.size()) * step;
  }
  double position(std::size_t k) const noexcept {
    return origin() + static_cast<double>(k) * step;
  }
};

/// FFT evaluation of the midpoint-rule inverse transform. `samples` live on
/// a midpoint FrequencyGrid (even size M <= fft_size); the lattice step is
/// 2 pi / (fft_size * du). fft_size must be a power of two.
SpatialLattice inverse_fourier_lattice(std::span<const cplx> samples,
                                       double spacing,
                                       std::size_t fft_size);

/// Bisection on a sign change of `f` until the bracket is at most `tol` wide.
double bracketed_root(const std::function<double(double)>& f, double lo,
                      double hi, double tol);

/// Adaptive Gauss-Kronrod on [a, b]; b may be +infinity (exp-sinh).
double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double rel_tol = 1e-10);

/// Running trapezoid integral: out[i] = int_{x_0}^{x_i} f.
std::vector<double> cumulative_trapezoid(std::span<const double> values,
                                         double step);

bool is_power_of_two(std::size_t n) noexcept;

}  // namespace levyq
