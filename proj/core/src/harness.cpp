#include "levyq/harness.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "levyq/errors.hpp"
#include "levyq/simulate.hpp"

namespace levyq {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::optional<double> truth_or_none(const TailIntegralOracle& oracle, double tau,
                                    Side side) {
  try {
    return true_quantile(oracle, tau, side);
  } catch (const Error& e) {
    if (e.code() == Errc::no_solution) return std::nullopt;
    throw;
  }
}

nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

struct Replication {
  bool ok = false;
  // Per (tau, side) slot: quantile at every oracle bandwidth, adaptive pick.
  std::vector<std::vector<double>> per_bandwidth;
  std::vector<double> adaptive;
};

}  // namespace

void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& fn) {
  unsigned workers = threads == 0 ? std::thread::hardware_concurrency() : threads;
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

RmseTable run_mc_table(const ExperimentConfig& config,
                       const std::function<void(std::size_t)>& progress) {
  config.validate();
  const LevyModel model = option_model(config.model);
  const TailIntegralOracle oracle(model.jumps);
  const SyntheticDesign design = make_design(model, config.model.maturity,
                                             config.model.rate, config.n,
                                             config.strike_law);
  const std::size_t slots = 2 * config.taus.size();
  std::vector<double> truth(slots);
  for (std::size_t i = 0; i < config.taus.size(); ++i) {
    truth[2 * i] = true_quantile(oracle, config.taus[i], Side::negative);
    truth[2 * i + 1] = true_quantile(oracle, config.taus[i], Side::positive);
  }
  const bool want_oracle = config.mode != McMode::adaptive;
  const bool want_adaptive = config.mode != McMode::oracle;

  std::vector<Replication> reps(config.replications);
  std::vector<double> bandwidths;
  std::mutex bandwidth_mutex;
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;
  parallel_for(config.replications, config.threads, [&](std::size_t r) {
    Replication& rep = reps[r];
    try {
      const OptionChain chain =
          add_noise(design, config.noise_fraction, derive_seed(config.seed, r));
      const ChainAnalysis a =
          analyze_chain(chain, config.taus, config.pipeline, want_oracle);
      rep.per_bandwidth.resize(slots);
      rep.adaptive.resize(slots);
      for (std::size_t k = 0; k < slots; ++k) {
        for (const auto& q : a.sides[k].per_bandwidth) rep.per_bandwidth[k].push_back(q.value);
        rep.adaptive[k] = a.sides[k].lepski.q;
      }
      if (want_oracle) {
        std::lock_guard lock(bandwidth_mutex);
        if (bandwidths.empty()) bandwidths = a.bandwidths;
      }
      rep.ok = true;
    } catch (const Error&) {
      rep.ok = false;
    }
    if (progress) {
      std::lock_guard lock(progress_mutex);
      progress(++done);
    }
  });

  RmseTable table;
  table.mode = config.mode;
  for (const auto& rep : reps) {
    if (rep.ok) ++table.replications;
    else ++table.failures;
  }
  if (table.replications == 0) {
    throw Error(Errc::divergence, "every Monte Carlo replication failed");
  }
  std::vector<double> oracle_rmse(slots, kNaN), oracle_h(slots, kNaN),
      adaptive_rmse(slots, kNaN);
  const double count = static_cast<double>(table.replications);
  for (std::size_t k = 0; k < slots; ++k) {
    if (want_oracle) {
      for (std::size_t j = 0; j < bandwidths.size(); ++j) {
        double sq = 0.0;
        for (const auto& rep : reps) {
          if (!rep.ok) continue;
          const double e = rep.per_bandwidth[k][j] - truth[k];
          sq += e * e;
        }
        const double rmse = std::sqrt(sq / count);
        if (!(rmse >= oracle_rmse[k])) {
          oracle_rmse[k] = rmse;
          oracle_h[k] = bandwidths[j];
        }
      }
    }
    if (want_adaptive) {
      double sq = 0.0;
      for (const auto& rep : reps) {
        if (!rep.ok) continue;
        const double e = rep.adaptive[k] - truth[k];
        sq += e * e;
      }
      adaptive_rmse[k] = std::sqrt(sq / count);
    }
  }
  for (std::size_t i = 0; i < config.taus.size(); ++i) {
    RmseRow row;
    row.tau = config.taus[i];
    row.q_minus = truth[2 * i];
    row.q_plus = truth[2 * i + 1];
    row.oracle_minus = 100.0 * oracle_rmse[2 * i];
    row.oracle_plus = 100.0 * oracle_rmse[2 * i + 1];
    row.adaptive_minus = 100.0 * adaptive_rmse[2 * i];
    row.adaptive_plus = 100.0 * adaptive_rmse[2 * i + 1];
    row.oracle_h_minus = oracle_h[2 * i];
    row.oracle_h_plus = oracle_h[2 * i + 1];
    table.rows.push_back(row);
  }
  return table;
}

void write_table_csv(std::ostream& out, const RmseTable& table) {
  out << "tau,q_minus,q_plus,oracle_minus,adaptive_minus,oracle_plus,adaptive_plus\n";
  out << std::fixed;
  for (const auto& r : table.rows) {
    out << std::setprecision(2) << r.tau << ',' << std::setprecision(6) << r.q_minus
        << ',' << r.q_plus << ',' << r.oracle_minus << ',' << r.adaptive_minus << ','
        << r.oracle_plus << ',' << r.adaptive_plus << '\n';
  }
}

nlohmann::json table_json(const RmseTable& table, const ExperimentConfig& config) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : table.rows) {
    rows.push_back({{"tau", r.tau},
                    {"q_minus", r.q_minus},
                    {"q_plus", r.q_plus},
                    {"oracle_minus", number_or_null(r.oracle_minus)},
                    {"adaptive_minus", number_or_null(r.adaptive_minus)},
                    {"oracle_plus", number_or_null(r.oracle_plus)},
                    {"adaptive_plus", number_or_null(r.adaptive_plus)},
                    {"oracle_h_minus", number_or_null(r.oracle_h_minus)},
                    {"oracle_h_plus", number_or_null(r.oracle_h_plus)}});
  }
  return {{"config", config_echo(config)},
          {"mode", to_string(table.mode)},
          {"replications", table.replications},
          {"failures", table.failures},
          {"rows", rows}};
}

ChainEstimate estimate_chain(const OptionChain& chain, const ExperimentConfig& config) {
  ChainEstimate out;
  if (config.taus_given) {
    out.taus = config.taus;
  } else {
    for (int i = 1; i <= 20; ++i) out.taus.push_back(0.2 * i);
  }
  if (chain.size() < 10) {
    throw Error(Errc::domain, "option chain needs at least 10 strikes, got " +
                                  std::to_string(chain.size()));
  }
  out.analysis = analyze_chain(chain, out.taus, config.pipeline, false);
  return out;
}

nlohmann::json chain_report_json(const ChainEstimate& estimate,
                                 const ExperimentConfig& config) {
  const auto& a = estimate.analysis;
  nlohmann::json quantiles = nlohmann::json::array();
  for (const auto& s : a.sides) {
    nlohmann::json records = nlohmann::json::array();
    for (const auto& r : s.lepski.records) {
      records.push_back({{"h", r.h},
                         {"q", r.q},
                         {"sigma", r.sigma},
                         {"V", number_or_null(r.V)},
                         {"lo", number_or_null(r.lo)},
                         {"hi", number_or_null(r.hi)},
                         {"dropped", r.dropped},
                         {"chosen", r.chosen}});
    }
    const auto& chosen = s.per_bandwidth[a.grid_offset + s.lepski.chosen];
    quantiles.push_back({{"tau", s.tau},
                         {"side", to_string(s.side)},
                         {"q", s.lepski.q},
                         {"h", s.lepski.h},
                         {"at_threshold", chosen.at_threshold},
                         {"diagnostics", records}});
  }
  return {{"config", config_echo(config)},
          {"x_max", config.pipeline.inversion.x_max},
          {"eta", config.pipeline.eta},
          {"guard_scale", a.guard_scale},
          {"grid",
           {{"n", a.grid.n},
            {"L", a.grid.L},
            {"j_min", a.grid.j_min},
            {"j_max", a.grid.j_max},
            {"cut_in_band", a.grid.cut_in_band},
            {"values", a.grid.values},
            {"statistics", a.grid.statistics}}},
          {"noise",
           {{"design_bandwidth", a.noise.bandwidth},
            {"sup_norms", a.noise.sup_norms},
            {"weighted_l2", a.noise.weighted_l2}}},
          {"quantiles", quantiles}};
}

void write_chain_outputs(const std::filesystem::path& dir, const ChainEstimate& estimate,
                         const ExperimentConfig& config) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "report.json");
    if (!out) throw Error(Errc::parse, "cannot write " + (dir / "report.json").string());
    out << chain_report_json(estimate, config).dump(2) << '\n';
  }
  for (Side side : {Side::negative, Side::positive}) {
    const auto name = side == Side::negative ? "quantiles_minus.csv" : "quantiles_plus.csv";
    std::ofstream out(dir / name);
    if (!out) throw Error(Errc::parse, "cannot write " + (dir / name).string());
    out << "tau,q\n" << std::setprecision(10);
    for (const auto& s : estimate.analysis.sides) {
      if (s.side == side) out << s.tau << ',' << s.lepski.q << '\n';
    }
  }
}

DirectReport demo_direct(const IncrementSample& sample, const ExperimentConfig& config) {
  config.validate();
  const double h = config.bandwidth;
  const auto& settings = config.pipeline;
  const SpectralKernel kernel = SpectralKernel::flat_top(settings.kernel_c);
  const SpectralInverter inverter(psi2_from_increments(sample), h, settings.inversion);
  const LatticeEstimate est = inverter.at(kernel, h);
  const TailIntegralOracle oracle(jump_measure(config.model));

  DirectReport report;
  report.samples = sample.size();
  report.delta = sample.delta();
  report.bandwidth = h;
  for (double tau : config.taus) {
    for (Side side : {Side::negative, Side::positive}) {
      DirectQuantile q;
      q.tau = tau;
      q.side = side;
      q.estimate = est.quantile(tau, settings.eta, side, settings.inversion);
      q.truth = truth_or_none(oracle, tau, side);
      report.quantiles.push_back(q);
    }
  }
  return report;
}

DirectReport demo_direct(const ExperimentConfig& config) {
  config.validate();
  const IncrementSampler sampler{direct_model(config.model), config.increment_spacing,
                                 config.method, derive_seed(config.seed, 0)};
  return demo_direct(sample_increments(sampler, config.samples), config);
}

nlohmann::json direct_report_json(const DirectReport& report,
                                  const ExperimentConfig& config) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& q : report.quantiles) {
    nlohmann::json row = {{"tau", q.tau},
                          {"side", to_string(q.side)},
                          {"q", q.estimate.value},
                          {"h", q.estimate.bandwidth},
                          {"at_threshold", q.estimate.at_threshold}};
    if (q.truth) {
      row["truth"] = *q.truth;
      row["error"] = q.estimate.value - *q.truth;
    } else {
      row["truth"] = nullptr;
    }
    rows.push_back(row);
  }
  return {{"config", config_echo(config)},
          {"samples", report.samples},
          {"delta", report.delta},
          {"bandwidth", report.bandwidth},
          {"x_max", config.pipeline.inversion.x_max},
          {"quantiles", rows}};
}

}  // namespace levyq
