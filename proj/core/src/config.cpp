#include "levyq/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "levyq/errors.hpp"

namespace levyq {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    throw Error(Errc::parse, "config: '" + key + "' expects a number, got '" + value + "'");
  }
  return out;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    throw Error(Errc::parse,
                "config: '" + key + "' expects a nonnegative integer, got '" + value + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "on" || value == "true" || value == "1") return true;
  if (value == "off" || value == "false" || value == "0") return false;
  throw Error(Errc::parse, "config: '" + key + "' expects on/off, got '" + value + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
  if (out.empty()) throw Error(Errc::parse, "config: '" + key + "' is empty");
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto num = [&t](const char* key, auto member) {
      t[key] = [member](ExperimentConfig& c, const std::string& k, const std::string& v) {
        member(c) = to_double(k, v);
      };
    };
    auto count = [&t](const char* key, auto member) {
      t[key] = [member](ExperimentConfig& c, const std::string& k, const std::string& v) {
        member(c) = static_cast<std::remove_reference_t<decltype(member(c))>>(
            to_unsigned(k, v));
      };
    };
    t["kind"] = [](ExperimentConfig& c, const std::string&, const std::string& v) {
      c.model.kind = v;
    };
    num("C", [](ExperimentConfig& c) -> double& { return c.model.cgmy.C; });
    num("G", [](ExperimentConfig& c) -> double& { return c.model.cgmy.G; });
    num("M", [](ExperimentConfig& c) -> double& { return c.model.cgmy.M; });
    num("Y", [](ExperimentConfig& c) -> double& { return c.model.cgmy.Y; });
    num("sigma", [](ExperimentConfig& c) -> double& { return c.model.sigma; });
    num("r", [](ExperimentConfig& c) -> double& { return c.model.rate; });
    num("T", [](ExperimentConfig& c) -> double& { return c.model.maturity; });
    num("S0", [](ExperimentConfig& c) -> double& { return c.model.spot; });
    num("gamma", [](ExperimentConfig& c) -> double& { return c.model.gamma; });
    num("lambda", [](ExperimentConfig& c) -> double& { return c.model.intensity; });
    t["jump_law"] = [](ExperimentConfig& c, const std::string&, const std::string& v) {
      c.model.jump_law = v;
    };
    num("jump_rate", [](ExperimentConfig& c) -> double& { return c.model.jump_rate; });
    num("jump_rate_up", [](ExperimentConfig& c) -> double& { return c.model.jump_rate_up; });
    num("jump_rate_down",
        [](ExperimentConfig& c) -> double& { return c.model.jump_rate_down; });
    num("p_up", [](ExperimentConfig& c) -> double& { return c.model.p_up; });
    num("jump_mean", [](ExperimentConfig& c) -> double& { return c.model.jump_mean; });
    num("jump_sd", [](ExperimentConfig& c) -> double& { return c.model.jump_sd; });
    num("vg_scale", [](ExperimentConfig& c) -> double& { return c.model.vg.scale; });
    num("vg_drift", [](ExperimentConfig& c) -> double& { return c.model.vg.drift; });
    num("vg_nu", [](ExperimentConfig& c) -> double& { return c.model.vg.variance_rate; });

    count("n", [](ExperimentConfig& c) -> std::size_t& { return c.n; });
    num("noise_fraction", [](ExperimentConfig& c) -> double& { return c.noise_fraction; });
    num("strike_mean", [](ExperimentConfig& c) -> double& { return c.strike_law.mean; });
    num("strike_variance",
        [](ExperimentConfig& c) -> double& { return c.strike_law.variance; });

    num("eta", [](ExperimentConfig& c) -> double& { return c.pipeline.eta; });
    num("kernel_c", [](ExperimentConfig& c) -> double& { return c.pipeline.kernel_c; });
    num("x_max", [](ExperimentConfig& c) -> double& { return c.pipeline.inversion.x_max; });
    num("freq_step",
        [](ExperimentConfig& c) -> double& { return c.pipeline.inversion.freq_step; });
    count("fft_size",
          [](ExperimentConfig& c) -> std::size_t& { return c.pipeline.inversion.fft_size; });
    count("quantile_grid", [](ExperimentConfig& c) -> std::size_t& {
      return c.pipeline.inversion.quantile_grid;
    });
    num("max_frequency",
        [](ExperimentConfig& c) -> double& { return c.pipeline.max_frequency; });
    count("spline_degree", [](ExperimentConfig& c) -> int& { return c.pipeline.spline_degree; });
    t["guard"] = [](ExperimentConfig& c, const std::string&, const std::string& v) {
      c.pipeline.guard = parse_guard_mode(v);
    };
    num("guard_scale", [](ExperimentConfig& c) -> double& { return c.pipeline.guard_scale; });
    num("guard_floor", [](ExperimentConfig& c) -> double& { return c.pipeline.guard_floor; });

    num("L", [](ExperimentConfig& c) -> double& { return c.pipeline.grid.L; });
    num("delta", [](ExperimentConfig& c) -> double& { return c.pipeline.delta; });
    num("h_max", [](ExperimentConfig& c) -> double& { return c.pipeline.grid.h_max; });
    t["cut"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.pipeline.grid.apply_cut = to_bool(k, v);
    };

    count("replications", [](ExperimentConfig& c) -> std::size_t& { return c.replications; });
    count("seed", [](ExperimentConfig& c) -> std::uint64_t& { return c.seed; });
    t["taus"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.taus = to_list(k, v);
      c.taus_given = true;
    };
    t["mode"] = [](ExperimentConfig& c, const std::string&, const std::string& v) {
      if (v == "oracle") c.mode = McMode::oracle;
      else if (v == "adaptive") c.mode = McMode::adaptive;
      else if (v == "both") c.mode = McMode::both;
      else throw Error(Errc::parse, "config: mode must be oracle, adaptive or both");
    };
    count("threads", [](ExperimentConfig& c) -> unsigned& { return c.threads; });

    num("increment_spacing",
        [](ExperimentConfig& c) -> double& { return c.increment_spacing; });
    count("samples", [](ExperimentConfig& c) -> std::size_t& { return c.samples; });
    num("bandwidth", [](ExperimentConfig& c) -> double& { return c.bandwidth; });
    t["method"] = [](ExperimentConfig& c, const std::string&, const std::string& v) {
      c.method = parse_sampling_method(v);
    };
    return t;
  }();
  return table;
}

}  // namespace

const char* to_string(McMode mode) {
  switch (mode) {
    case McMode::oracle: return "oracle";
    case McMode::adaptive: return "adaptive";
    case McMode::both: return "both";
  }
  return "both";
}

PipelineSettings ExperimentConfig::default_pipeline() {
  PipelineSettings s;
  s.grid.h_max = 0.5;
  return s;
}

void ExperimentConfig::validate() const {
  pipeline.validate();
  levyq::validate(jump_measure(model));
  if (!(model.sigma >= 0.0)) throw Error(Errc::domain, "sigma must be >= 0");
  if (!(model.maturity > 0.0)) throw Error(Errc::domain, "T must be > 0");
  if (!(model.spot > 0.0)) throw Error(Errc::domain, "S0 must be > 0");
  if (n < 10) throw Error(Errc::domain, "n must be >= 10");
  if (!(noise_fraction >= 0.0)) throw Error(Errc::domain, "noise_fraction must be >= 0");
  if (!(strike_law.variance > 0.0)) throw Error(Errc::domain, "strike_variance must be > 0");
  if (replications == 0) throw Error(Errc::domain, "replications must be >= 1");
  for (double tau : taus) {
    if (!(tau > 0.0)) throw Error(Errc::domain, "taus must be > 0");
  }
  if (!(increment_spacing > 0.0)) throw Error(Errc::domain, "increment_spacing must be > 0");
  if (samples < 2) throw Error(Errc::domain, "samples must be >= 2");
  if (!(bandwidth > 0.0)) throw Error(Errc::domain, "bandwidth must be > 0");
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig config;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw Error(Errc::parse, "config line " + std::to_string(number) +
                                   ": expected key = value");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) {
      throw Error(Errc::parse, "config line " + std::to_string(number) +
                                   ": unknown key '" + key + "'");
    }
    try {
      it->second(config, key, value);
    } catch (const Error& e) {
      throw Error(e.code(), "config line " + std::to_string(number) + ": " + e.what());
    }
    config.entries.emplace_back(key, value);
  }
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::parse, "cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

JumpMeasureSpec jump_measure(const ModelConfig& model) {
  if (model.kind == "cgmy") return model.cgmy;
  if (model.kind == "brownian") return NoJumps{};
  if (model.kind == "variance_gamma") return model.vg;
  if (model.kind == "compound_poisson") {
    JumpLaw law;
    if (model.jump_law == "exponential") {
      law = exponential_jumps(model.jump_rate);
    } else if (model.jump_law == "double_exponential") {
      law = DoubleExponentialJumps{model.p_up, model.jump_rate_up, model.jump_rate_down};
    } else if (model.jump_law == "normal") {
      law = NormalJumps{model.jump_mean, model.jump_sd};
    } else {
      throw Error(Errc::parse, "unknown jump_law '" + model.jump_law + "'");
    }
    return CompoundPoisson{model.intensity, law};
  }
  throw Error(Errc::parse, "unknown model kind '" + model.kind + "'");
}

LevyModel option_model(const ModelConfig& model) {
  return LevyModel::martingale(model.sigma * model.sigma, jump_measure(model));
}

LevyModel direct_model(const ModelConfig& model) {
  return LevyModel{model.sigma * model.sigma, model.gamma, jump_measure(model)};
}

nlohmann::json config_echo(const ExperimentConfig& config) {
  nlohmann::json entries = nlohmann::json::object();
  for (const auto& [k, v] : config.entries) entries[k] = v;
  const auto& p = config.pipeline;
  return {{"entries", entries},
          {"effective",
           {{"kind", config.model.kind},
            {"n", config.n},
            {"noise_fraction", config.noise_fraction},
            {"eta", p.eta},
            {"kernel_c", p.kernel_c},
            {"x_max", p.inversion.x_max},
            {"freq_step", p.inversion.freq_step},
            {"L", p.grid.L},
            {"h_max", p.grid.h_max},
            {"cut", p.grid.apply_cut},
            {"delta", p.delta},
            {"spline_degree", p.spline_degree},
            {"guard", to_string(p.guard)},
            {"guard_scale", p.guard_scale},
            {"seed", config.seed},
            {"replications", config.replications}}}};
}

}  // namespace levyq
