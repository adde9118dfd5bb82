#pragma once

#include <functional>
#include <vector>

#include "levyq/levy.hpp"
#include "levyq/numerics.hpp"

namespace levyq {

enum class Scheme { direct, option };

const char* to_string(Scheme scheme);

/// An estimate of psi'' on frequencies |u| <= valid_cutoff, the common input
/// of density, distribution and quantile estimation. Evaluations are
/// Hermitian, psi''(-u) = conj psi''(u).
class Psi2Estimate {
 public:
  using PointFn = std::function<cplx(double)>;
  /// Optional batch evaluation on a symmetric grid (fills every node).
  using GridFn = std::function<std::vector<cplx>(const FrequencyGrid&)>;

  Psi2Estimate(PointFn eval, double valid_cutoff, Scheme scheme,
               GridFn grid_eval = {});

  cplx operator()(double u) const { return eval_(u); }

  /// Values at every node of `grid`. Without a batch evaluator only the
  /// nonnegative half is evaluated and mirrored by conjugation.
  std::vector<cplx> sample(const FrequencyGrid& grid) const;

  double valid_cutoff() const noexcept { return valid_cutoff_; }
  Scheme scheme() const noexcept { return scheme_; }

  Psi2Estimate with_cutoff(double cutoff) const;

 private:
  PointFn eval_;
  double valid_cutoff_;
  Scheme scheme_;
  GridFn grid_eval_;
};

/// psi'' of a known model, for oracles and noiseless checks.
Psi2Estimate exact_psi2(const LevyModel& model, Scheme scheme = Scheme::direct);

/// Constant psi'' (e.g. -sigma^2 for a pure Brownian model).
Psi2Estimate constant_psi2(cplx value, Scheme scheme = Scheme::direct);

}  // namespace levyq
