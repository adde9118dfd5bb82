#include "levyq/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <vector>

#include "levyq/errors.hpp"

namespace levyq {

namespace {

std::string strip(std::string line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
  return line;
}

std::vector<double> parse_row(const std::string& line, std::size_t columns,
                              std::size_t number) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    const std::string field =
        line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    double value = 0.0;
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (field.empty() || ec != std::errc{} || ptr != end || !std::isfinite(value)) {
      throw Error(Errc::parse, "line " + std::to_string(number) + ": bad number '" +
                                   field + "'");
    }
    out.push_back(value);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.size() != columns) {
    throw Error(Errc::parse, "line " + std::to_string(number) + ": expected " +
                                 std::to_string(columns) + " columns, got " +
                                 std::to_string(out.size()));
  }
  return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::parse, "cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::parse, "cannot write " + path.string());
  return out;
}

}  // namespace

OptionChain read_chain_csv(std::istream& in, const ChainQuote& quote) {
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::parse, "line 1: empty chain file");
  const std::string header = strip(line);
  bool by_strike = false;
  if (header == "strike,price,noise") {
    by_strike = true;
    if (!(quote.spot > 0.0)) throw Error(Errc::domain, "S0 must be > 0");
  } else if (header != "x,price,noise") {
    throw Error(Errc::parse,
                "line 1: header must be 'x,price,noise' or 'strike,price,noise'");
  }
  OptionChain chain;
  chain.maturity = quote.maturity;
  chain.rate = quote.rate;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    line = strip(line);
    if (line.empty()) continue;
    const auto row = parse_row(line, 3, number);
    double x = row[0];
    double price = row[1];
    double noise = row[2];
    if (by_strike) {
      if (!(x > 0.0)) {
        throw Error(Errc::parse, "line " + std::to_string(number) + ": strike must be > 0");
      }
      x = std::log(x / quote.spot) - quote.rate * quote.maturity;
      price /= quote.spot;
      noise /= quote.spot;
    }
    if (noise < 0.0) {
      throw Error(Errc::parse, "line " + std::to_string(number) + ": noise must be >= 0");
    }
    if (!chain.xs.empty() && !(x > chain.xs.back())) {
      throw Error(Errc::parse,
                  "line " + std::to_string(number) + ": strikes must be strictly increasing");
    }
    chain.xs.push_back(x);
    chain.prices.push_back(price);
    chain.noise_levels.push_back(noise);
  }
  return chain;
}

OptionChain read_chain_csv(const std::filesystem::path& path, const ChainQuote& quote) {
  auto in = open_input(path);
  return read_chain_csv(in, quote);
}

void write_chain_csv(std::ostream& out, const OptionChain& chain) {
  out << "x,price,noise\n" << std::setprecision(17);
  for (std::size_t i = 0; i < chain.size(); ++i) {
    out << chain.xs[i] << ',' << chain.prices[i] << ',' << chain.noise_levels[i] << '\n';
  }
}

void write_chain_csv(const std::filesystem::path& path, const OptionChain& chain) {
  auto out = open_output(path);
  write_chain_csv(out, chain);
}

IncrementSample read_increments_csv(std::istream& in, double delta) {
  std::string line;
  if (!std::getline(in, line) || strip(line) != "increment") {
    throw Error(Errc::parse, "line 1: header must be 'increment'");
  }
  std::vector<double> values;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    line = strip(line);
    if (line.empty()) continue;
    values.push_back(parse_row(line, 1, number)[0]);
  }
  if (values.empty()) throw Error(Errc::parse, "increment file has no rows");
  return IncrementSample(std::move(values), delta);
}

IncrementSample read_increments_csv(const std::filesystem::path& path, double delta) {
  auto in = open_input(path);
  return read_increments_csv(in, delta);
}

void write_increments_csv(std::ostream& out, const IncrementSample& sample) {
  out << "increment\n" << std::setprecision(17);
  for (double y : sample.values()) out << y << '\n';
}

void write_increments_csv(const std::filesystem::path& path, const IncrementSample& sample) {
  auto out = open_output(path);
  write_increments_csv(out, sample);
}

}  // namespace levyq
