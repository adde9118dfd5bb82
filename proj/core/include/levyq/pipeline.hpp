#pragma once

#include <span>
#include <string>
#include <vector>

#include "levyq/inversion.hpp"
#include "levyq/kernels.hpp"
#include "levyq/lepski.hpp"
#include "levyq/option_scheme.hpp"

namespace levyq {

/// How the trust-region threshold (1+|u|)^2 / sqrt(n) is scaled.
/// unit: scale 1. noise: the standard deviation scale ||e^-x rho||_L2 of the
/// noise in phi~, floored at guard_floor.
enum class GuardMode { unit, noise };

const char* to_string(GuardMode mode);
GuardMode parse_guard_mode(const std::string& name);

struct PipelineSettings {
  double eta = 0.02;
  double kernel_c = 0.5;
  InversionSettings inversion;
  GridSettings grid;
  double delta = 0.1;
  int spline_degree = 1;
  GuardMode guard = GuardMode::noise;
  double guard_scale = 1.0;
  double guard_floor = 1e-6;
  /// Frequencies beyond this are never sampled from the chain.
  double max_frequency = 200.0;

  void validate() const;
};

struct SideAnalysis {
  double tau = 0.0;
  Side side = Side::positive;
  /// Quantile at every evaluated bandwidth (ChainAnalysis::bandwidths).
  std::vector<QuantileEstimate> per_bandwidth;
  std::vector<double> density_at_q;
  /// Bandwidth selection over the grid B_n.
  LepskiResult lepski;
};

struct ChainAnalysis {
  /// The adaptive grid B_n.
  BandwidthGrid grid;
  /// Bandwidths at which quantiles were evaluated; B_n is its tail.
  std::vector<double> bandwidths;
  std::size_t grid_offset = 0;
  NoiseProfile noise;
  double guard_scale = 1.0;
  /// One entry per (tau, side): tau-major, negative side first.
  std::vector<SideAnalysis> sides;

  const SideAnalysis& at(std::size_t tau_index, Side side) const {
    return sides[2 * tau_index + (side == Side::positive ? 1 : 0)];
  }
};

/// Guard scale of a chain under the given settings.
double guard_scale_for(const NoiseProfile& noise, const PipelineSettings& settings);

/// Full option pipeline. With `all_bandwidths` the quantiles are also
/// evaluated below the cut j~ (from h = 1/n upward), as needed for oracle
/// bandwidths; the adaptive choice always uses B_n only.
ChainAnalysis analyze_chain(const OptionChain& chain, std::span<const double> taus,
                            const PipelineSettings& settings,
                            bool all_bandwidths = false);

/// Quantiles at fixed bandwidths without the adaptive step.
std::vector<QuantileEstimate> chain_quantiles(const OptionChain& chain,
                                              double tau, Side side,
                                              std::span<const double> bandwidths,
                                              const PipelineSettings& settings);

}  // namespace levyq
