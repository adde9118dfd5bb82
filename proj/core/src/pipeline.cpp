#include "levyq/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "levyq/errors.hpp"

namespace levyq {

namespace {

struct Prepared {
  NoiseProfile noise;
  double scale = 1.0;
  OptionSpectra spectra;
  SpectralInverter inverter;
};

Prepared prepare(const OptionChain& chain, const PipelineSettings& settings,
                 double min_bandwidth) {
  chain.validate();
  if (chain.size() < 10) {
    throw Error(Errc::domain, "option chain needs at least 10 strikes");
  }
  NoiseProfile noise = estimate_noise_profile(chain);
  const double scale = guard_scale_for(noise, settings);
  const double n = static_cast<double>(chain.size());
  const SplineOptionFunction spline(chain, settings.spline_degree);
  const TrustRegion trust{n, scale};
  const double cutoff = std::min(1.0 / min_bandwidth, settings.max_frequency);
  const auto grid = FrequencyGrid::with_spacing(cutoff, settings.inversion.freq_step);
  OptionSpectra spectra = sample_option_spectra(spline, chain.maturity, grid, trust);
  SpectralInverter inverter(grid, spectra.psi2, settings.inversion);
  return {std::move(noise), scale, std::move(spectra), std::move(inverter)};
}

}  // namespace

const char* to_string(GuardMode mode) {
  return mode == GuardMode::unit ? "unit" : "noise";
}

GuardMode parse_guard_mode(const std::string& name) {
  if (name == "unit") return GuardMode::unit;
  if (name == "noise") return GuardMode::noise;
  throw Error(Errc::parse, "unknown guard mode '" + name + "'");
}

void PipelineSettings::validate() const {
  inversion.validate();
  if (!(eta > 0.0) || !(eta < inversion.x_max)) {
    throw Error(Errc::domain, "eta must lie in (0, x_max)");
  }
  if (!(kernel_c >= 0.0) || !(kernel_c < 1.0)) {
    throw Error(Errc::domain, "kernel flat radius must lie in [0, 1)");
  }
  if (!(grid.L > 1.0)) throw Error(Errc::domain, "L must be > 1");
  if (!(delta > 0.0)) throw Error(Errc::domain, "delta must be > 0");
  if (spline_degree != 1 && spline_degree != 3) {
    throw Error(Errc::domain, "spline degree must be 1 or 3");
  }
  if (!(guard_scale > 0.0) || !(guard_floor >= 0.0)) {
    throw Error(Errc::domain, "guard scale must be > 0");
  }
  if (!(max_frequency > 0.0)) throw Error(Errc::domain, "max_frequency must be > 0");
}

double guard_scale_for(const NoiseProfile& noise, const PipelineSettings& settings) {
  if (settings.guard == GuardMode::unit) return settings.guard_scale;
  return std::max(settings.guard_scale * noise.weighted_l2, settings.guard_floor);
}

ChainAnalysis analyze_chain(const OptionChain& chain, std::span<const double> taus,
                            const PipelineSettings& settings, bool all_bandwidths) {
  settings.validate();
  if (taus.empty()) throw Error(Errc::domain, "no tau values given");
  const double n = static_cast<double>(chain.size());
  const SpectralKernel kernel = SpectralKernel::flat_top(settings.kernel_c);
  Prepared p = prepare(chain, settings, 1.0 / n);

  ChainAnalysis out;
  out.noise = p.noise;
  out.guard_scale = p.scale;
  out.grid = build_grid(n, settings.grid, p.spectra, p.scale);
  if (all_bandwidths) {
    for (int j = 0; j <= out.grid.j_max; ++j) {
      out.bandwidths.push_back(std::pow(settings.grid.L, j) / n);
    }
    out.grid_offset = static_cast<std::size_t>(out.grid.j_min);
  } else {
    out.bandwidths = out.grid.values;
    out.grid_offset = 0;
  }

  out.sides.resize(2 * taus.size());
  for (std::size_t i = 0; i < taus.size(); ++i) {
    for (Side side : {Side::negative, Side::positive}) {
      auto& s = out.sides[2 * i + (side == Side::positive ? 1 : 0)];
      s.tau = taus[i];
      s.side = side;
      s.per_bandwidth.reserve(out.bandwidths.size());
    }
  }
  for (double h : out.bandwidths) {
    const LatticeEstimate est = p.inverter.at(kernel, h);
    for (auto& s : out.sides) {
      const QuantileEstimate q =
          est.quantile(s.tau, settings.eta, s.side, settings.inversion);
      s.per_bandwidth.push_back(q);
      s.density_at_q.push_back(est.density(sign_of(s.side) * q.value));
    }
  }

  SigmaInputs in;
  in.spectra = &p.spectra;
  in.kernel = &kernel;
  in.sup_norms = p.noise.sup_norms;
  in.n = n;
  in.x_max = settings.inversion.x_max;
  for (auto& s : out.sides) {
    std::vector<LepskiCandidate> candidates;
    for (std::size_t k = out.grid_offset; k < out.bandwidths.size(); ++k) {
      const double h = out.bandwidths[k];
      const double q = s.per_bandwidth[k].value;
      candidates.push_back(
          {h, q, s.density_at_q[k], sigma_tilde(in, h, sign_of(s.side) * q)});
    }
    s.lepski = select_bandwidth(candidates, n, settings.delta);
  }
  return out;
}

std::vector<QuantileEstimate> chain_quantiles(const OptionChain& chain,
                                              double tau, Side side,
                                              std::span<const double> bandwidths,
                                              const PipelineSettings& settings) {
  settings.validate();
  if (bandwidths.empty()) return {};
  const SpectralKernel kernel = SpectralKernel::flat_top(settings.kernel_c);
  const double h_min = *std::min_element(bandwidths.begin(), bandwidths.end());
  Prepared p = prepare(chain, settings, h_min);
  std::vector<QuantileEstimate> out;
  out.reserve(bandwidths.size());
  for (double h : bandwidths) {
    out.push_back(p.inverter.at(kernel, h).quantile(tau, settings.eta, side,
                                                    settings.inversion));
  }
  return out;
}

}  // namespace levyq
