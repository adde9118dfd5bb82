#include "levyq/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "levyq/errors.hpp"
#include "levyq/numerics.hpp"

namespace levyq {

double smoothstep_bridge(double s) {
  return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

SpectralKernel SpectralKernel::flat_top(double c) {
  if (!(c > 0.0 && c < 1.0)) {
    throw Error(Errc::domain, "flat-top kernel needs 0 < c < 1");
  }
  auto fk = [c](double u) {
    const double a = std::abs(u);
    if (a <= c) return 1.0;
    if (a >= 1.0) return 0.0;
    return smoothstep_bridge((a - c) / (1.0 - c));
  };
  return SpectralKernel(fk, std::nullopt, c, "flat_top");
}

SpectralKernel SpectralKernel::triangle() {
  auto fk = [](double u) { return std::max(0.0, 1.0 - std::abs(u)); };
  return SpectralKernel(fk, 1, 0.0, "triangle");
}

SpectralKernel SpectralKernel::from_profile(Profile profile,
                                            std::optional<int> order,
                                            std::string name) {
  return SpectralKernel(std::move(profile), order, 0.0, std::move(name));
}

std::vector<double> kernel_values(const SpectralKernel& kernel,
                                  const std::vector<double>& xs,
                                  std::size_t points) {
  const FrequencyGrid grid(1.0, points, true);
  std::vector<cplx> samples(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) samples[j] = kernel.profile(grid.node(j));
  const auto values = inverse_fourier(samples, grid, xs);
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = values[i].real();
  return out;
}

OrderReport verify_order(const SpectralKernel& kernel, int p,
                         double moment_tol, double mass_tol) {
  const double c = kernel.flat_radius();
  const double taper = c > 0.0 ? std::max(20.0, 14.0 / c) : 20.0;
  constexpr double step = 0.1;
  const auto half = static_cast<int>(5.0 * taper / step);
  std::vector<double> xs;
  xs.reserve(2 * half + 1);
  for (int i = -half; i <= half; ++i) xs.push_back(i * step);
  const auto k = kernel_values(kernel, xs);

  OrderReport report;
  report.pass = true;
  for (int l = 0; l <= std::max(p, 0); ++l) {
    double sum = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double x = xs[i];
      sum += std::pow(x, l) * k[i] * std::exp(-(x / taper) * (x / taper));
    }
    sum *= step;
    MomentCheck check;
    check.order = l;
    check.value = sum;
    check.residual = std::abs(l == 0 ? sum - 1.0 : sum);
    check.pass = check.residual < (l == 0 ? mass_tol : moment_tol);
    report.pass = report.pass && check.pass;
    report.moments.push_back(check);
  }
  return report;
}

}  // namespace levyq
