#pragma once

// Experiment configuration: flat key=value files, presets of the form
// "name:key=value,key=value", and the symbol preset table.

#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sparsepdo/func.hpp"
#include "sparsepdo/symbol.hpp"

namespace sparsepdo {

// Bad configuration or preset; the CLI maps it to exit status 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// "1.5", "-0.25", "4/3", "inf"; throws ConfigError otherwise.
double parse_number(const std::string& text);
int parse_int(const std::string& text);

struct Preset {
  std::string name;
  std::map<std::string, double> params;

  double get(const std::string& key, double fallback) const;
  double require(const std::string& key) const;
  // Throws when params holds a key outside the list.
  void only(const std::vector<std::string>& keys) const;
};

Preset parse_preset(const std::string& text);

// Symbol presets:
//   oscillatory:m=..,rho=..[,width=..]   bessel:m=..
//   xdep:m=..,rho=..[,period=..,width=..] multiplier:alpha=..,beta=..
//   const[:c=..]
Symbol symbol_from_preset(const std::string& text);

struct ExperimentConfig {
  std::string experiment;
  int n = 1;
  double length = 16.0;
  int samples = 1024;
  std::string symbol = "oscillatory:m=-0.5,rho=0";
  std::vector<std::pair<double, double>> exponents;  // (r, s')
  double epsilon = 0.1;
  int j_max = 0;
  std::optional<std::pair<int, int>> l_range;
  int trials = 20;
  std::uint64_t seed = 1;
  std::string out;
  int threads = 1;
  bool quick = false;
  // Keys not recognized above, kept for experiment-specific use.
  std::map<std::string, std::string> extra;

  Lattice lattice() const;
  void set(const std::string& key, const std::string& value);
  void validate() const;
};

// Blank lines and lines starting with '#' are skipped.
ExperimentConfig read_config(std::istream& is);
std::vector<std::pair<double, double>> parse_exponents(const std::string& text);

}  // namespace sparsepdo
