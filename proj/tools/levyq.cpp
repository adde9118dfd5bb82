#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "levyq/config.hpp"
#include "levyq/errors.hpp"
#include "levyq/harness.hpp"
#include "levyq/io.hpp"
#include "levyq/simulate.hpp"

namespace {

constexpr int kInputError = 2;
constexpr int kNumericalError = 3;

levyq::ExperimentConfig config_from(const std::string& path) {
  return path.empty() ? levyq::ExperimentConfig{} : levyq::load_config(path);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw levyq::Error(levyq::Errc::parse, "cannot write " + path);
  return out;
}

levyq::ChainQuote quote_of(const levyq::ExperimentConfig& config) {
  return {config.model.spot, config.model.rate, config.model.maturity};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonparametric estimation of generalized Levy quantiles"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string chain_path;
  std::string json_path;
  std::optional<std::size_t> reps;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  bool quiet = false;

  auto* mc = app.add_subcommand("mc-table", "Monte Carlo RMSE table on synthetic chains");
  mc->add_option("--config", config_path, "Configuration file")->required()->check(CLI::ExistingFile);
  mc->add_option("--reps", reps, "Number of replications");
  mc->add_option("--seed", seed, "Root seed");
  mc->add_option("--threads", threads, "Worker threads (0: all cores)");
  mc->add_option("--out", out_path, "Output CSV")->required();
  mc->add_option("--json", json_path, "Also write a JSON report");
  mc->add_flag("--quiet", quiet, "No progress output");

  auto* chain = app.add_subcommand("estimate-chain", "Adaptive quantile curves from an option chain");
  chain->add_option("--chain", chain_path, "Chain CSV (x,price,noise or strike,price,noise)")
      ->required()
      ->check(CLI::ExistingFile);
  chain->add_option("--config", config_path, "Configuration file")->required()->check(CLI::ExistingFile);
  chain->add_option("--out", out_path, "Output directory")->required();

  auto* direct = app.add_subcommand("demo-direct", "Direct scheme on simulated increments");
  direct->add_option("--config", config_path, "Configuration file")->required()->check(CLI::ExistingFile);
  direct->add_option("--increments", chain_path, "Use increments from a CSV instead of simulating")
      ->check(CLI::ExistingFile);
  direct->add_option("--seed", seed, "Root seed");
  direct->add_option("--out", out_path, "Output JSON")->required();

  auto* generate = app.add_subcommand("generate-chain", "Synthetic option chain with noise");
  generate->add_option("--config", config_path, "Configuration file")->check(CLI::ExistingFile);
  generate->add_option("--seed", seed, "Noise seed");
  generate->add_option("--out", out_path, "Output CSV")->required();

  auto* simulate = app.add_subcommand("simulate-increments", "Simulated increments of the model");
  simulate->add_option("--config", config_path, "Configuration file")->check(CLI::ExistingFile);
  simulate->add_option("--seed", seed, "Root seed");
  simulate->add_option("--out", out_path, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }

  try {
    auto config = config_from(config_path);
    if (reps) config.replications = *reps;
    if (seed) config.seed = *seed;
    if (threads) config.threads = *threads;
    config.validate();

    if (*mc) {
      const auto table = levyq::run_mc_table(config, [&](std::size_t done) {
        if (!quiet) std::cerr << "\rreplication " << done << "/" << config.replications << std::flush;
      });
      if (!quiet) std::cerr << '\n';
      auto out = open_out(out_path);
      levyq::write_table_csv(out, table);
      if (!json_path.empty()) open_out(json_path) << levyq::table_json(table, config).dump(2) << '\n';
      if (table.failures > 0) {
        std::cerr << table.failures << " replication(s) failed and were excluded\n";
      }
    } else if (*chain) {
      const auto data = levyq::read_chain_csv(std::filesystem::path(chain_path), quote_of(config));
      const auto estimate = levyq::estimate_chain(data, config);
      levyq::write_chain_outputs(out_path, estimate, config);
    } else if (*direct) {
      const auto report =
          chain_path.empty()
              ? levyq::demo_direct(config)
              : levyq::demo_direct(levyq::read_increments_csv(std::filesystem::path(chain_path),
                                                              config.increment_spacing),
                                   config);
      open_out(out_path) << levyq::direct_report_json(report, config).dump(2) << '\n';
    } else if (*generate) {
      const auto model = levyq::option_model(config.model);
      const auto data = levyq::generate_synthetic_chain(model, config.model.maturity,
                                                        config.model.rate, config.n,
                                                        config.noise_fraction,
                                                        config.strike_law, config.seed);
      levyq::write_chain_csv(std::filesystem::path(out_path), data);
    } else if (*simulate) {
      const levyq::IncrementSampler sampler{levyq::direct_model(config.model),
                                            config.increment_spacing, config.method,
                                            levyq::derive_seed(config.seed, 0)};
      levyq::write_increments_csv(std::filesystem::path(out_path),
                                  levyq::sample_increments(sampler, config.samples));
    }
  } catch (const levyq::Error& e) {
    std::cerr << "error (" << levyq::to_string(e.code()) << "): " << e.what() << '\n';
    return levyq::is_input_error(e.code()) ? kInputError : kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericalError;
  }
  return 0;
}
