#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "levyq/levy.hpp"
#include "levyq/option_scheme.hpp"
#include "levyq/pipeline.hpp"
#include "levyq/simulate.hpp"

namespace levyq {

enum class McMode { oracle, adaptive, both };

const char* to_string(McMode mode);

struct ModelConfig {
  /// cgmy | compound_poisson | variance_gamma | brownian
  std::string kind = "cgmy";
  Cgmy cgmy{};
  double sigma = 0.1;
  double rate = 0.06;
  double maturity = 0.25;
  double spot = 1.0;
  /// Compound Poisson: intensity and jump law (exponential |
  /// double_exponential | normal).
  double intensity = 1.0;
  std::string jump_law = "exponential";
  double jump_rate = 1.0;
  double jump_rate_up = 1.0;
  double jump_rate_down = 1.0;
  double p_up = 1.0;
  double jump_mean = 0.0;
  double jump_sd = 1.0;
  VarianceGamma vg{};
  /// Drift of the direct-scheme model (option models are martingale-fixed).
  double gamma = 0.0;
};

/// Flat key = value configuration. Unknown keys are rejected; '#' starts a
/// comment. Keys:
///   model    kind C G M Y sigma r T S0 gamma lambda jump_law jump_rate
///            jump_rate_up jump_rate_down p_up jump_mean jump_sd
///            vg_scale vg_drift vg_nu
///   chain    n noise_fraction strike_mean strike_variance
///   estimate eta kernel_c x_max freq_step fft_size quantile_grid
///            max_frequency spline_degree guard guard_scale guard_floor
///   lepski   L delta h_max cut
///   mc       replications seed taus mode threads
///   direct   increment_spacing samples bandwidth method
struct ExperimentConfig {
  ModelConfig model;
  std::size_t n = 100;
  double noise_fraction = 0.01;
  StrikeLaw strike_law{};
  PipelineSettings pipeline = default_pipeline();
  std::size_t replications = 200;
  std::uint64_t seed = 20150601;
  std::vector<double> taus{0.5, 1.0, 1.5, 2.0, 2.5};
  bool taus_given = false;
  McMode mode = McMode::both;
  unsigned threads = 0;  // 0: hardware concurrency

  double increment_spacing = 0.5;
  std::size_t samples = 100000;
  double bandwidth = 0.05;
  SamplingMethod method = SamplingMethod::compound_poisson;

  /// Entries as read, for the provenance echo.
  std::vector<std::pair<std::string, std::string>> entries;

  static PipelineSettings default_pipeline();
  /// Re-checks every positivity and ordering constraint.
  void validate() const;
};

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

JumpMeasureSpec jump_measure(const ModelConfig& model);
/// Martingale-fixed model for option pricing.
LevyModel option_model(const ModelConfig& model);
/// Model with the configured drift, for increments.
LevyModel direct_model(const ModelConfig& model);

nlohmann::json config_echo(const ExperimentConfig& config);

}  // namespace levyq
