#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "levyq/direct_scheme.hpp"
#include "levyq/option_scheme.hpp"

namespace levyq {

/// Market quantities for chains quoted by strike.
struct ChainQuote {
  double spot = 1.0;
  double rate = 0.0;
  double maturity = 0.25;
};

/// Reads "x,price,noise" rows, or "strike,price,noise" rows which are mapped
/// to x = log(K/S0) - rT with price and noise divided by S0. Rows must be
/// sorted by strike. Throws Errc::parse naming the offending line.
OptionChain read_chain_csv(std::istream& in, const ChainQuote& quote);
OptionChain read_chain_csv(const std::filesystem::path& path, const ChainQuote& quote);

/// Writes the "x,price,noise" form with round-trip precision.
void write_chain_csv(std::ostream& out, const OptionChain& chain);
void write_chain_csv(const std::filesystem::path& path, const OptionChain& chain);

/// Single-column "increment" files.
IncrementSample read_increments_csv(std::istream& in, double delta);
IncrementSample read_increments_csv(const std::filesystem::path& path, double delta);
void write_increments_csv(std::ostream& out, const IncrementSample& sample);
void write_increments_csv(const std::filesystem::path& path, const IncrementSample& sample);

}  // namespace levyq
