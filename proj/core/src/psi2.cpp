#include "levyq/psi2.hpp"

#include <cmath>
#include <limits>

#include "levyq/errors.hpp"

namespace levyq {

const char* to_string(Scheme scheme) {
  return scheme == Scheme::direct ? "direct" : "option";
}

Psi2Estimate::Psi2Estimate(PointFn eval, double valid_cutoff, Scheme scheme,
                           GridFn grid_eval)
    : eval_(std::move(eval)),
      valid_cutoff_(valid_cutoff),
      scheme_(scheme),
      grid_eval_(std::move(grid_eval)) {
  if (!eval_) throw Error(Errc::domain, "Psi2Estimate: empty evaluator");
  if (!(valid_cutoff_ > 0.0)) {
    throw Error(Errc::domain, "Psi2Estimate: cutoff must be positive");
  }
}

std::vector<cplx> Psi2Estimate::sample(const FrequencyGrid& grid) const {
  if (grid_eval_) return grid_eval_(grid);
  const std::size_t m = grid.size();
  std::vector<cplx> out(m);
  for (std::size_t j = m / 2; j < m; ++j) {
    const double u = grid.node(j);
    out[j] = std::abs(u) <= valid_cutoff_ ? eval_(u) : cplx{};
    out[m - 1 - j] = std::conj(out[j]);
  }
  if (m % 2 == 1) {
    const double u = grid.node(m / 2);
    out[m / 2] = eval_(u);
  }
  return out;
}

Psi2Estimate Psi2Estimate::with_cutoff(double cutoff) const {
  Psi2Estimate copy = *this;
  if (!(cutoff > 0.0)) {
    throw Error(Errc::domain, "Psi2Estimate: cutoff must be positive");
  }
  copy.valid_cutoff_ = cutoff;
  return copy;
}

Psi2Estimate exact_psi2(const LevyModel& model, Scheme scheme) {
  auto eval = [model](double u) { return psi_second_derivative(model, u); };
  return Psi2Estimate(eval, std::numeric_limits<double>::max(), scheme);
}

Psi2Estimate constant_psi2(cplx value, Scheme scheme) {
  auto eval = [value](double) { return value; };
  return Psi2Estimate(eval, std::numeric_limits<double>::max(), scheme);
}

}  // namespace levyq
