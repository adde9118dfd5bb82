#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "levyq/config.hpp"
#include "levyq/errors.hpp"
#include "levyq/harness.hpp"
#include "levyq/io.hpp"
#include "oracles.hpp"

using namespace levyq;
namespace fs = std::filesystem;

namespace {

const Cgmy kCgmy{1.0, 5.0, 8.0, 0.5};

std::string parse_error(std::string_view text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::parse);
    return e.what();
  }
  ADD_FAILURE() << "no parse error";
  return {};
}

ExperimentConfig exponential_direct(std::size_t samples) {
  return parse_config(
      "kind = compound_poisson\nlambda = 1\njump_law = exponential\njump_rate = 1\n"
      "sigma = 0\ngamma = 1\nincrement_spacing = 0.5\nbandwidth = 0.05\n"
      "samples = " + std::to_string(samples) + "\ntaus = 0.5\n");
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("levyq_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
}

}  // namespace

TEST(Config, DefaultsAreThePaperSettings) {
  const auto c = parse_config("");
  EXPECT_EQ(c.model.kind, "cgmy");
  EXPECT_EQ(c.model.cgmy.C, 1.0);
  EXPECT_EQ(c.model.cgmy.G, 5.0);
  EXPECT_EQ(c.model.cgmy.M, 8.0);
  EXPECT_EQ(c.model.cgmy.Y, 0.5);
  EXPECT_EQ(c.model.sigma, 0.1);
  EXPECT_EQ(c.model.maturity, 0.25);
  EXPECT_EQ(c.n, 100u);
  EXPECT_EQ(c.noise_fraction, 0.01);
  EXPECT_EQ(c.pipeline.eta, 0.02);
  EXPECT_EQ(c.pipeline.grid.L, 1.1);
  EXPECT_EQ(c.pipeline.delta, 0.1);
  EXPECT_EQ(c.replications, 200u);
  EXPECT_EQ(c.taus, (std::vector<double>{0.5, 1.0, 1.5, 2.0, 2.5}));
}

TEST(Config, ParsesKeysCommentsAndLists) {
  const auto c = parse_config(
      "# table run\n"
      "n = 250   # strikes\n"
      "\n"
      "noise_fraction=0\n"
      "taus = 0.3, 0.6,1.2\n"
      "mode = oracle\n"
      "L = 1.2\n"
      "cut = off\n"
      "seed = 99\n");
  EXPECT_EQ(c.n, 250u);
  EXPECT_EQ(c.noise_fraction, 0.0);
  EXPECT_EQ(c.taus, (std::vector<double>{0.3, 0.6, 1.2}));
  EXPECT_TRUE(c.taus_given);
  EXPECT_EQ(c.mode, McMode::oracle);
  EXPECT_EQ(c.pipeline.grid.L, 1.2);
  EXPECT_FALSE(c.pipeline.grid.apply_cut);
  EXPECT_EQ(c.seed, 99u);
  EXPECT_EQ(c.entries.size(), 7u);
}

TEST(Config, ErrorsNameTheLine) {
  EXPECT_NE(parse_error("n = 100\nwobble = 3\n").find("line 2"), std::string::npos);
  EXPECT_NE(parse_error("n = 100\n\nsigma = abc\n").find("line 3"), std::string::npos);
  EXPECT_NE(parse_error("just text\n").find("line 1"), std::string::npos);
  EXPECT_NE(parse_error("mode = sometimes\n").find("line 1"), std::string::npos);
}

TEST(Config, RevalidatesConstraints) {
  for (const char* text : {"n = 5\n", "L = 1\n", "eta = 0\n", "C = -1\n", "Y = 2\n", "kernel_c = 1\n",
                           "noise_fraction = -0.1\n", "T = 0\n"}) {
    EXPECT_THROW(parse_config(text), Error) << text;
  }
  EXPECT_THROW(load_config("/nonexistent/levyq.cfg"), Error);
}

TEST(ChainCsv, RoundTripGivesIdenticalEstimates) {
  auto config = parse_config("taus = 0.5, 1.5\n");
  const auto model = option_model(config.model);
  const auto chain = generate_synthetic_chain(model, config.model.maturity, config.model.rate, config.n,
                                              config.noise_fraction, config.strike_law, 17);
  std::stringstream buffer;
  write_chain_csv(buffer, chain);
  const auto back = read_chain_csv(buffer, ChainQuote{1.0, config.model.rate, config.model.maturity});
  ASSERT_EQ(back.size(), chain.size());
  EXPECT_EQ(back.xs, chain.xs);
  EXPECT_EQ(back.prices, chain.prices);
  EXPECT_EQ(back.noise_levels, chain.noise_levels);

  const auto a = estimate_chain(chain, config);
  const auto b = estimate_chain(back, config);
  ASSERT_EQ(a.analysis.sides.size(), b.analysis.sides.size());
  for (std::size_t i = 0; i < a.analysis.sides.size(); ++i) {
    EXPECT_EQ(a.analysis.sides[i].lepski.q, b.analysis.sides[i].lepski.q);
    EXPECT_EQ(a.analysis.sides[i].lepski.h, b.analysis.sides[i].lepski.h);
  }
}

TEST(ChainCsv, StrikeFormIsNormalized) {
  std::stringstream in("strike,price,noise\n90,2,0.1\n100,5,0.2\n");
  const auto c = read_chain_csv(in, ChainQuote{100.0, 0.05, 0.5});
  EXPECT_NEAR(c.xs[0], std::log(0.9) - 0.025, 1e-15);
  EXPECT_NEAR(c.prices[1], 0.05, 1e-15);
  EXPECT_NEAR(c.noise_levels[0], 0.001, 1e-15);
  EXPECT_EQ(c.maturity, 0.5);
}

TEST(ChainCsv, MalformedRowNamesTheLine) {
  auto message = [](const std::string& text) {
    std::stringstream in(text);
    try {
      read_chain_csv(in, ChainQuote{});
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::parse);
      return std::string(e.what());
    }
    ADD_FAILURE() << "accepted: " << text;
    return std::string();
  };
  EXPECT_NE(message("x,price,noise\n-0.1,0.01,0\n0.0,abc,0\n").find("line 3"), std::string::npos);
  EXPECT_NE(message("x,price,noise\n-0.1,0.01,0\n0.2,0.01\n").find("line 3"), std::string::npos);
  EXPECT_NE(message("x,price,noise\n0.1,0.01,0\n-0.2,0.01,0\n").find("line 3"), std::string::npos);
  EXPECT_NE(message("x,price,noise\n0.1,0.01,-1\n").find("line 2"), std::string::npos);
  EXPECT_NE(message("k,p\n").find("line 1"), std::string::npos);
}

TEST(EstimateChain, NeedsTenStrikes) {
  OptionChain chain;
  chain.xs = {-0.2, -0.1, 0.0, 0.1, 0.2};
  chain.prices = {0.01, 0.02, 0.03, 0.02, 0.01};
  chain.noise_levels.assign(5, 0.0);
  EXPECT_THROW(estimate_chain(chain, parse_config("")), Error);
}

TEST(EstimateChain, NoiselessPaperChainLowerQuantile) {
  // Without noise the variance bound vanishes and the smallest admissible
  // bandwidth is chosen; what remains is interpolation bias of the chain.
  const double truth = oracle::cgmy_quantile(kCgmy, 0.5, -1.0);
  auto error_at = [&](std::size_t n) {
    auto config = parse_config("noise_fraction = 0\ntaus = 0.5\nn = " + std::to_string(n) + "\n");
    const auto chain = generate_synthetic_chain(option_model(config.model), config.model.maturity,
                                                config.model.rate, config.n, 0.0, config.strike_law, 1);
    return std::abs(estimate_chain(chain, config).analysis.at(0, Side::negative).lepski.q - truth);
  };
  EXPECT_LE(error_at(100), 1e-2);
  EXPECT_LE(error_at(1000), 3e-3);
}

TEST(EstimateChain, DefaultTauGridAndOutputs) {
  auto config = parse_config("");
  const auto chain = generate_synthetic_chain(option_model(config.model), config.model.maturity, config.model.rate,
                                              config.n, config.noise_fraction, config.strike_law, 3);
  const auto est = estimate_chain(chain, config);
  ASSERT_EQ(est.taus.size(), 20u);
  EXPECT_NEAR(est.taus.front(), 0.2, 1e-12);
  EXPECT_NEAR(est.taus.back(), 4.0, 1e-12);

  const auto dir = scratch_dir("chain_outputs");
  write_chain_outputs(dir, est, config);
  for (const char* name : {"report.json", "quantiles_minus.csv", "quantiles_plus.csv"}) {
    EXPECT_TRUE(fs::exists(dir / name)) << name;
  }
  std::ifstream csv(dir / "quantiles_plus.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "tau,q");
  std::size_t rows = 0;
  for (std::string line; std::getline(csv, line);) rows += !line.empty();
  EXPECT_EQ(rows, 20u);

  const auto report = chain_report_json(est, config);
  ASSERT_TRUE(report.contains("config"));
  const auto& record = report["quantiles"][0]["diagnostics"][0];
  for (const char* key : {"h", "q", "sigma", "V", "lo", "hi", "chosen"}) EXPECT_TRUE(record.contains(key)) << key;
}

TEST(McTable, DeterministicForFixedSeed) {
  auto config = parse_config("replications = 1\nseed = 5\ntaus = 1.0\n");
  std::ostringstream a;
  std::ostringstream b;
  write_table_csv(a, run_mc_table(config));
  write_table_csv(b, run_mc_table(config));
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str().substr(0, a.str().find('\n')),
            "tau,q_minus,q_plus,oracle_minus,adaptive_minus,oracle_plus,adaptive_plus");
}

TEST(McTable, ThreadCountDoesNotChangeResults) {
  auto config = parse_config("replications = 4\nseed = 8\ntaus = 1.0, 2.0\n");
  config.threads = 1;
  const auto a = run_mc_table(config);
  config.threads = 3;
  const auto b = run_mc_table(config);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].oracle_minus, b.rows[i].oracle_minus);
    EXPECT_EQ(a.rows[i].adaptive_plus, b.rows[i].adaptive_plus);
  }
}

TEST(McTable, ZeroNoiseOracleErrorIsBiasOnly) {
  auto config = parse_config("replications = 1\nnoise_fraction = 0\nmode = oracle\n");
  const auto table = run_mc_table(config);
  EXPECT_EQ(table.failures, 0u);
  for (const auto& row : table.rows) {
    EXPECT_NEAR(row.q_minus, oracle::cgmy_quantile(kCgmy, row.tau, -1.0), 1e-8);
    EXPECT_NEAR(row.q_plus, oracle::cgmy_quantile(kCgmy, row.tau, 1.0), 1e-8);
    // One replication: RMSE x 100 is the absolute error x 100.
    EXPECT_LE(row.oracle_minus, 1.0) << row.tau;
    EXPECT_LE(row.oracle_plus, 1.0) << row.tau;
    EXPECT_TRUE(std::isnan(row.adaptive_minus));
  }
}

TEST(DemoDirect, ExponentialJumpsAtLargeN) {
  const auto config = exponential_direct(100000);
  int within = 0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    auto c = config;
    c.seed = s;
    const auto report = demo_direct(c);
    ASSERT_EQ(report.quantiles.size(), 2u);
    const auto& q = report.quantiles[1];
    ASSERT_EQ(q.side, Side::positive);
    ASSERT_TRUE(q.truth.has_value());
    EXPECT_NEAR(*q.truth, std::log(2.0), 1e-8);
    within += std::abs(q.estimate.value - std::log(2.0)) <= 0.05;
  }
  EXPECT_GE(within, 45);
}

TEST(DemoDirect, MedianErrorShrinksWithSampleSize) {
  auto median_error = [](std::size_t samples) {
    const auto config = exponential_direct(samples);
    std::vector<double> errs;
    for (std::uint64_t s = 0; s < 50; ++s) {
      auto c = config;
      c.seed = 1000 + s;
      errs.push_back(std::abs(demo_direct(c).quantiles[1].estimate.value - std::log(2.0)));
    }
    std::nth_element(errs.begin(), errs.begin() + 25, errs.end());
    return errs[25];
  };
  EXPECT_GT(median_error(100), median_error(100000));
}

TEST(DemoDirect, BeyondMassReturnsThreshold) {
  auto config = exponential_direct(20000);
  config.taus = {10.0};
  for (std::uint64_t s = 0; s < 10; ++s) {
    config.seed = s;
    const auto report = demo_direct(config);
    for (const auto& q : report.quantiles) {
      EXPECT_TRUE(q.estimate.at_threshold);
      EXPECT_EQ(q.estimate.value, config.pipeline.eta);
    }
  }
}

#ifdef LEVYQ_CLI
namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + LEVYQ_CLI + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Cli, ExitCodes) {
  const auto dir = scratch_dir("cli");
  write_text(dir / "good.cfg", "kind = compound_poisson\nlambda = 1\ngamma = 1\nsigma = 0\nsamples = 2000\n");
  write_text(dir / "bad.cfg", "n = 100\nwobble = 1\n");
  EXPECT_EQ(run_cli("demo-direct --config " + (dir / "good.cfg").string() + " --out " + (dir / "d.json").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "d.json"));
  EXPECT_EQ(run_cli("demo-direct --config " + (dir / "bad.cfg").string() + " --out " + (dir / "e.json").string()), 2);
  EXPECT_EQ(run_cli("demo-direct --config " + (dir / "missing.cfg").string() + " --out x.json"), 2);
  EXPECT_EQ(run_cli("no-such-command"), 2);

  write_text(dir / "paper.cfg", "taus = 1.0\n");
  EXPECT_EQ(run_cli("generate-chain --config " + (dir / "paper.cfg").string() + " --out " +
                    (dir / "chain.csv").string()),
            0);
  EXPECT_EQ(run_cli("estimate-chain --chain " + (dir / "chain.csv").string() + " --config " +
                    (dir / "paper.cfg").string() + " --out " + (dir / "est").string()),
            0);
  EXPECT_TRUE(fs::exists(dir / "est" / "report.json"));
  write_text(dir / "broken.csv", "x,price,noise\n-0.1,0.01,0\noops\n");
  EXPECT_EQ(run_cli("estimate-chain --chain " + (dir / "broken.csv").string() + " --config " +
                    (dir / "paper.cfg").string() + " --out " + (dir / "est2").string()),
            2);
}
#endif
