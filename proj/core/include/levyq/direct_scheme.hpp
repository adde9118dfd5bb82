#pragma once

#include <span>
#include <vector>

#include "levyq/levy.hpp"
#include "levyq/psi2.hpp"

namespace levyq {

/// n increments Y_k = L_{k Delta} - L_{(k-1) Delta} of a Levy process.
class IncrementSample {
 public:
  IncrementSample(std::vector<double> values, double delta);

  std::span<const double> values() const noexcept { return values_; }
  double delta() const noexcept { return delta_; }
  std::size_t size() const noexcept { return values_.size(); }

 private:
  std::vector<double> values_;
  double delta_;
};

/// phi and its first two derivatives at one frequency.
struct CharacteristicDerivatives {
  cplx phi;
  cplx first;
  cplx second;
};

/// (1/n) sum (iY_k)^k e^{iuY_k}, k in {0, 1, 2}.
cplx ecf_derivative(const IncrementSample& sample, double u, int k);

CharacteristicDerivatives ecf_derivatives(const IncrementSample& sample,
                                          double u);

/// Empirical derivatives at the nonnegative nodes of a symmetric grid,
/// node(size/2) onwards, computed in one pass over the sample.
std::vector<CharacteristicDerivatives> ecf_derivatives_on_grid(
    const IncrementSample& sample, const FrequencyGrid& grid);

/// (phi'' phi - phi'^2) / (t phi^2): psi'' recovered from phi_t.
cplx psi2_identity(const CharacteristicDerivatives& d, double t);

/// Exact phi_t, phi_t', phi_t'' of a model (plug-in oracle).
CharacteristicDerivatives model_characteristic_derivatives(
    const LevyModel& model, double t, double u);

/// psi2_identity gated by |phi| >= threshold, 0 otherwise.
cplx guarded_psi2(const CharacteristicDerivatives& d, double t,
                  double threshold);

/// Empirical psi'' from increments, zeroed where |phi_{Delta,n}| <
/// (Delta n)^{-1/2}.
Psi2Estimate psi2_from_increments(IncrementSample sample);

}  // namespace levyq
