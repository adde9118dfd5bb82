#pragma once

#include <array>
#include <functional>
#include <vector>

#include "levyq/kernels.hpp"
#include "levyq/levy.hpp"
#include "levyq/option_scheme.hpp"

namespace levyq {

struct GridSettings {
  double L = 1.1;
  /// Upper end of the grid; <= 0 selects the asymptotic (log n)^-5.
  double h_max = 0.0;
  /// Whether the lower cut j~ is applied (otherwise j_min = 0).
  bool apply_cut = true;
};

/// h_j = L^j / n for j in [j_min, j_max].
struct BandwidthGrid {
  double n = 0.0;
  double L = 1.1;
  int j_min = 0;
  int j_max = 0;
  std::vector<double> values;
  /// Cut statistic S(j) for j = 0..j_max (empty when the cut is off).
  std::vector<double> statistics;
  /// Whether S(j_min) fell into [1/2, 1] rather than skipping the band.
  bool cut_in_band = true;

  std::size_t size() const noexcept { return values.size(); }
};

/// Smallest j with L^j / n >= top.
int top_index(double n, double L, double top);

/// S(h) = scale (log n)^2 n^-1/2 (int_{|u|<=1/h} (1+u^4) 1{trusted} / |phi~|^2 du)^1/2
/// by the trapezoid rule on the spectra grid. `scale` is the same noise scale
/// as the trust region's (1 reproduces the unscaled statistic).
double cut_statistic(const OptionSpectra& spectra, double n, double h,
                     double scale = 1.0);

/// Grid from a cut statistic: j_min is the first j with S(j) <= 1.
/// Throws Errc::empty_grid when no j <= j_max qualifies.
BandwidthGrid build_grid(double n, const GridSettings& settings,
                         const std::function<double(double)>& statistic);
BandwidthGrid build_grid(double n, const GridSettings& settings,
                         const OptionSpectra& spectra, double scale = 1.0);

/// F g_t(-u) = int g_t(x) e^{-iux} dx with g_t = x^-2 1{x >= t} (t > 0) or x^-2 1{x <= t} (t < 0),
/// truncated at |x| = x_max.
cplx tail_weight_transform(double t, double u, double x_max);

/// The three auxiliary spectra of the linearized stochastic error at one node.
std::array<cplx, 3> chi_tilde(cplx g, double fk, double u, double maturity,
                              cplx phi, cplx psi1, cplx psi2);

struct SigmaInputs {
  const OptionSpectra* spectra = nullptr;
  const SpectralKernel* kernel = nullptr;
  /// ||x^k e^-x rho||_inf, k = 0, 1, 2.
  std::array<double, 3> sup_norms{};
  double n = 0.0;
  double x_max = 5.0;
};

/// (2 pi sqrt(n) T)^-1 sum_k ||x^k e^-x rho||_inf ||chi~^(k)||_L2 at
/// bandwidth h and jump size t (sign selects the side).
/// Throws Errc::guard_dominated if no trusted node lies in [-1/h, 1/h].
double sigma_tilde(const SigmaInputs& in, double h, double t);

/// (1 + delta) sqrt(2 log log n).
double lepski_multiplier(double n, double delta);

struct LepskiCandidate {
  double h = 0.0;
  double q = 0.0;
  double density_at_q = 0.0;
  double sigma = 0.0;
};

struct LepskiRecord {
  double h = 0.0;
  double q = 0.0;
  double sigma = 0.0;
  double V = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool dropped = false;  // density estimate vanished at q
  bool chosen = false;
};

struct LepskiResult {
  double h = 0.0;
  double q = 0.0;
  std::size_t chosen = 0;
  std::vector<LepskiRecord> records;
};

/// Intervals [q - V, q + V] with V = multiplier sigma / |nu(q)|; the chosen
/// bandwidth is the largest h whose running intersection over all smaller
/// bandwidths is nonempty. Candidates must be sorted by increasing h.
LepskiResult select_bandwidth(const std::vector<LepskiCandidate>& candidates,
                              double n, double delta);

}  // namespace levyq
