#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "levyq/config.hpp"
#include "levyq/pipeline.hpp"

namespace levyq {

/// Runs fn(0) .. fn(count-1) on up to `threads` workers (0: hardware
/// concurrency). Exceptions escaping fn are rethrown after all workers stop.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& fn);

/// One row of the Monte Carlo table; RMSE columns are multiplied by 100.
struct RmseRow {
  double tau = 0.0;
  double q_minus = 0.0;
  double q_plus = 0.0;
  double oracle_minus = 0.0;
  double adaptive_minus = 0.0;
  double oracle_plus = 0.0;
  double adaptive_plus = 0.0;
  /// Oracle bandwidths (by RMSE over all replications).
  double oracle_h_minus = 0.0;
  double oracle_h_plus = 0.0;
};

struct RmseTable {
  std::vector<RmseRow> rows;
  std::size_t replications = 0;
  std::size_t failures = 0;
  McMode mode = McMode::both;
};

/// Synthetic chains around a fixed design, one noise draw per replication
/// (seed derive_seed(config.seed, r)). Oracle: the grid bandwidth with the
/// smallest RMSE per (tau, side). Adaptive: the Lepski choice per chain.
RmseTable run_mc_table(const ExperimentConfig& config,
                       const std::function<void(std::size_t)>& progress = {});

/// tau,q_minus,q_plus,oracle_minus,adaptive_minus,oracle_plus,adaptive_plus
void write_table_csv(std::ostream& out, const RmseTable& table);
nlohmann::json table_json(const RmseTable& table, const ExperimentConfig& config);

struct ChainEstimate {
  std::vector<double> taus;
  ChainAnalysis analysis;
};

/// Adaptive estimates for the configured taus (default 0.2, 0.4, ..., 4).
ChainEstimate estimate_chain(const OptionChain& chain, const ExperimentConfig& config);

nlohmann::json chain_report_json(const ChainEstimate& estimate,
                                 const ExperimentConfig& config);
/// report.json plus quantiles_minus.csv and quantiles_plus.csv ("tau,q").
void write_chain_outputs(const std::filesystem::path& dir, const ChainEstimate& estimate,
                         const ExperimentConfig& config);

struct DirectQuantile {
  double tau = 0.0;
  Side side = Side::positive;
  QuantileEstimate estimate;
  std::optional<double> truth;
};

struct DirectReport {
  std::size_t samples = 0;
  double delta = 0.0;
  double bandwidth = 0.0;
  std::vector<DirectQuantile> quantiles;
};

/// Direct scheme end to end at the configured bandwidth: simulate, estimate
/// psi'' from increments, invert, compare with the true quantiles.
DirectReport demo_direct(const ExperimentConfig& config);
DirectReport demo_direct(const IncrementSample& sample, const ExperimentConfig& config);

nlohmann::json direct_report_json(const DirectReport& report,
                                  const ExperimentConfig& config);

}  // namespace levyq
