#include "levyq/direct_scheme.hpp"

#include <cmath>
#include <limits>
#include <memory>

#include "levyq/errors.hpp"

namespace levyq {

IncrementSample::IncrementSample(std::vector<double> values, double delta)
    : values_(std::move(values)), delta_(delta) {
  if (values_.empty()) {
    throw Error(Errc::domain, "increment sample must be nonempty");
  }
  if (!(delta_ > 0.0)) {
    throw Error(Errc::domain, "increment spacing Delta must be > 0");
  }
}

cplx ecf_derivative(const IncrementSample& sample, double u, int k) {
  if (k < 0 || k > 2) {
    throw Error(Errc::domain, "ecf_derivative: k must be 0, 1 or 2");
  }
  cplx acc{0.0, 0.0};
  for (double y : sample.values()) {
    const cplx e = std::polar(1.0, u * y);
    const cplx iy{0.0, y};
    acc += k == 0 ? e : (k == 1 ? iy * e : iy * iy * e);
  }
  return acc / static_cast<double>(sample.size());
}

CharacteristicDerivatives ecf_derivatives(const IncrementSample& sample,
                                          double u) {
  CharacteristicDerivatives d{};
  for (double y : sample.values()) {
    const cplx e = std::polar(1.0, u * y);
    d.phi += e;
    d.first += cplx{0.0, y} * e;
    d.second += -y * y * e;
  }
  const double n = static_cast<double>(sample.size());
  d.phi /= n;
  d.first /= n;
  d.second /= n;
  return d;
}

std::vector<CharacteristicDerivatives> ecf_derivatives_on_grid(
    const IncrementSample& sample, const FrequencyGrid& grid) {
  const std::size_t first = grid.size() / 2;
  const std::size_t count = grid.size() - first;
  const double u0 = grid.node(first);
  const double du = grid.spacing();
  std::vector<CharacteristicDerivatives> out(count);
  for (double y : sample.values()) {
    const cplx step = std::polar(1.0, du * y);
    cplx rot = std::polar(1.0, u0 * y);
    const double y2 = y * y;
    for (std::size_t j = 0; j < count; ++j) {
      auto& d = out[j];
      d.phi += rot;
      d.first += cplx{-y * rot.imag(), y * rot.real()};
      d.second -= y2 * rot;
      rot *= step;
      if ((j & 127) == 127) {
        rot = std::polar(1.0, (u0 + static_cast<double>(j + 1) * du) * y);
      }
    }
  }
  const double n = static_cast<double>(sample.size());
  for (auto& d : out) {
    d.phi /= n;
    d.first /= n;
    d.second /= n;
  }
  return out;
}

cplx psi2_identity(const CharacteristicDerivatives& d, double t) {
  return (d.second * d.phi - d.first * d.first) / (t * d.phi * d.phi);
}

cplx guarded_psi2(const CharacteristicDerivatives& d, double t,
                  double threshold) {
  if (!(std::abs(d.phi) >= threshold)) return {0.0, 0.0};
  return psi2_identity(d, t);
}

CharacteristicDerivatives model_characteristic_derivatives(
    const LevyModel& model, double t, double u) {
  const ExponentDerivatives e = exponent_derivatives(model, cplx{u, 0.0});
  const cplx phi = std::exp(t * e.value);
  return {phi, t * e.first * phi, (t * e.second + t * t * e.first * e.first) * phi};
}

Psi2Estimate psi2_from_increments(IncrementSample sample) {
  if (sample.size() < 2) {
    throw Error(Errc::domain, "psi2_from_increments needs n >= 2");
  }
  auto shared = std::make_shared<const IncrementSample>(std::move(sample));
  const double delta = shared->delta();
  const double threshold =
      1.0 / std::sqrt(delta * static_cast<double>(shared->size()));

  auto eval = [shared, delta, threshold](double u) {
    return guarded_psi2(ecf_derivatives(*shared, u), delta, threshold);
  };
  auto grid_eval = [shared, delta, threshold](const FrequencyGrid& grid) {
    const auto half = ecf_derivatives_on_grid(*shared, grid);
    const std::size_t m = grid.size();
    const std::size_t first = m / 2;
    std::vector<cplx> out(m);
    for (std::size_t j = 0; j < half.size(); ++j) {
      out[first + j] = guarded_psi2(half[j], delta, threshold);
      if (first + j != m - 1 - (first + j)) {
        out[m - 1 - (first + j)] = std::conj(out[first + j]);
      }
    }
    return out;
  };
  return Psi2Estimate(eval, std::numeric_limits<double>::max(), Scheme::direct,
                      grid_eval);
}

}  // namespace levyq
