#include "levyq/lepski.hpp"

#include <gsl/gsl_sf_expint.h>

#include <cmath>
#include <limits>

#include "levyq/errors.hpp"

namespace levyq {

int top_index(double n, double L, double top) {
  return static_cast<int>(std::ceil(std::log(top * n) / std::log(L) - 1e-12));
}

double cut_statistic(const OptionSpectra& spectra, double n, double h,
                     double scale) {
  const auto& grid = spectra.grid;
  const double cutoff = 1.0 / h;
  // Midpoint nodes are symmetric; integrate over u >= 0 and double.
  double integral = 0.0;
  for (std::size_t j = grid.size() / 2; j < grid.size(); ++j) {
    const double u = grid.node(j);
    if (u > cutoff) break;
    if (!spectra.trusted[j]) continue;
    const double a = std::norm(spectra.phi[j]);
    integral += grid.weight(j) * (1.0 + u * u * u * u) / a;
  }
  integral *= 2.0;
  const double logn = std::log(n);
  return scale * logn * logn / std::sqrt(n) * std::sqrt(integral);
}

BandwidthGrid build_grid(double n, const GridSettings& settings,
                         const std::function<double(double)>& statistic) {
  if (!(n >= 10.0)) throw Error(Errc::domain, "bandwidth grid needs n >= 10");
  if (!(settings.L > 1.0)) throw Error(Errc::domain, "grid ratio L must be > 1");
  const double top =
      settings.h_max > 0.0 ? settings.h_max : std::pow(std::log(n), -5.0);
  BandwidthGrid grid;
  grid.n = n;
  grid.L = settings.L;
  grid.j_max = top_index(n, settings.L, top);
  if (grid.j_max < 0) {
    throw Error(Errc::empty_grid, "bandwidth grid: upper end below 1/n");
  }
  auto h_of = [&](int j) { return std::pow(settings.L, j) / n; };
  grid.j_min = 0;
  if (settings.apply_cut) {
    grid.j_min = -1;
    for (int j = 0; j <= grid.j_max; ++j) {
      const double s = statistic(h_of(j));
      grid.statistics.push_back(s);
      if (grid.j_min < 0 && s <= 1.0) {
        grid.j_min = j;
        grid.cut_in_band = s >= 0.5;
      }
    }
    if (grid.j_min < 0) {
      throw Error(Errc::empty_grid,
                  "bandwidth grid: cut statistic exceeds 1 on the whole grid");
    }
  }
  for (int j = grid.j_min; j <= grid.j_max; ++j) grid.values.push_back(h_of(j));
  return grid;
}

BandwidthGrid build_grid(double n, const GridSettings& settings,
                         const OptionSpectra& spectra, double scale) {
  return build_grid(n, settings,
                    [&](double h) { return cut_statistic(spectra, n, h, scale); });
}

cplx tail_weight_transform(double t, double u, double x_max) {
  if (t == 0.0) throw Error(Errc::domain, "tail weight undefined at t = 0");
  const double a = std::abs(t);
  if (a >= x_max) return {0.0, 0.0};
  cplx value;
  if (u == 0.0) {
    value = {1.0 / a - 1.0 / x_max, 0.0};
  } else {
    // int_a^X x^-2 e^{-iux} dx after one integration by parts; the remaining
    // int_a^X x^-1 e^{-iux} dx is expressed through Ci and Si.
    const double w = std::abs(u);
    const double cos_part = gsl_sf_Ci(w * x_max) - gsl_sf_Ci(w * a);
    const double sin_part =
        (u > 0.0 ? 1.0 : -1.0) * (gsl_sf_Si(w * x_max) - gsl_sf_Si(w * a));
    const cplx remainder{cos_part, -sin_part};
    value = std::polar(1.0 / a, -u * a) - std::polar(1.0 / x_max, -u * x_max) -
            cplx{0.0, u} * remainder;
  }
  return t > 0.0 ? value : std::conj(value);
}

std::array<cplx, 3> chi_tilde(cplx g, double fk, double u, double maturity,
                              cplx phi, cplx psi1, cplx psi2) {
  const double T = maturity;
  const cplx iu{0.0, u};
  const cplx common = g * fk;
  const cplx inv = 1.0 / phi;
  const cplx c0 = common * (u * cplx{u, -1.0} * (T * T * psi1 * psi1 - T * psi2) * inv +
                            2.0 * T * cplx{-2.0 * u, 1.0} * psi1 * inv + 2.0 * inv);
  const cplx c1 =
      common * ((4.0 * iu + 2.0) * inv - 2.0 * T * u * (iu + 1.0) * psi1 * inv);
  const cplx c2 = u * cplx{-u, 1.0} * common * inv;
  return {c0, c1, c2};
}

double sigma_tilde(const SigmaInputs& in, double h, double t) {
  if (in.spectra == nullptr || in.kernel == nullptr) {
    throw Error(Errc::domain, "sigma_tilde: missing spectra or kernel");
  }
  if (!(h > 0.0)) throw Error(Errc::domain, "bandwidth must be > 0");
  const auto& s = *in.spectra;
  const auto& grid = s.grid;
  const double cutoff = 1.0 / h;
  std::array<double, 3> sq{};
  bool any = false;
  for (std::size_t j = grid.size() / 2; j < grid.size(); ++j) {
    const double u = grid.node(j);
    if (u >= cutoff) break;
    if (!s.trusted[j]) continue;
    const double fk = (*in.kernel)(h * u);
    if (fk == 0.0) continue;
    any = true;
    const cplx g = tail_weight_transform(t, u, in.x_max);
    const auto chi = chi_tilde(g, fk, u, s.maturity, s.phi[j], s.psi1[j], s.psi2[j]);
    for (std::size_t k = 0; k < 3; ++k) sq[k] += grid.weight(j) * std::norm(chi[k]);
  }
  if (!any) {
    throw Error(Errc::guard_dominated,
                "sigma_tilde: trust region empty on [-1/h, 1/h]");
  }
  // |chi(-u)| = |chi(u)| for real data, so the half-line sum is doubled.
  double total = 0.0;
  for (std::size_t k = 0; k < 3; ++k) total += in.sup_norms[k] * std::sqrt(2.0 * sq[k]);
  return total / (2.0 * kPi * std::sqrt(in.n) * s.maturity);
}

double lepski_multiplier(double n, double delta) {
  if (!(n > std::exp(1.0))) throw Error(Errc::domain, "log log n needs n > e");
  return (1.0 + delta) * std::sqrt(2.0 * std::log(std::log(n)));
}

LepskiResult select_bandwidth(const std::vector<LepskiCandidate>& candidates,
                              double n, double delta) {
  if (candidates.empty()) throw Error(Errc::empty_grid, "no bandwidth candidates");
  const double mult = lepski_multiplier(n, delta);
  LepskiResult out;
  out.records.reserve(candidates.size());
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool open = true;
  bool found = false;
  double previous_h = 0.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    if (i > 0 && !(c.h > previous_h)) {
      throw Error(Errc::domain, "candidates must be sorted by increasing h");
    }
    previous_h = c.h;
    LepskiRecord r;
    r.h = c.h;
    r.q = c.q;
    r.sigma = c.sigma;
    if (c.density_at_q == 0.0 || !std::isfinite(c.density_at_q)) {
      r.dropped = true;
      r.V = std::numeric_limits<double>::infinity();
      r.lo = -r.V;
      r.hi = r.V;
      out.records.push_back(r);
      continue;
    }
    r.V = mult * c.sigma / std::abs(c.density_at_q);
    r.lo = c.q - r.V;
    r.hi = c.q + r.V;
    out.records.push_back(r);
    if (!open) continue;
    lo = std::max(lo, r.lo);
    hi = std::min(hi, r.hi);
    if (lo <= hi) {
      out.chosen = out.records.size() - 1;
      found = true;
    } else {
      open = false;
    }
  }
  if (!found) {
    throw Error(Errc::empty_grid, "every bandwidth was dropped");
  }
  out.records[out.chosen].chosen = true;
  out.h = out.records[out.chosen].h;
  out.q = out.records[out.chosen].q;
  return out;
}

}  // namespace levyq
