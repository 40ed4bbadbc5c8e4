#include "sparsepdo/config.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "sparsepdo/multiplier.hpp"

namespace sparsepdo {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_plain(const std::string& s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError("not a number: '" + s + "'");
  return v;
}

bool is_power_of_two(double x) {
  if (!(x > 0.0)) return false;
  int e = 0;
  return std::frexp(x, &e) == 0.5;
}

}  // namespace

// Accepts "1.5", "-0.25", "4/3", "inf".
double parse_number(const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "inf") return kInf;
  const auto slash = s.find('/');
  if (slash == std::string::npos) return parse_plain(s);
  const double den = parse_plain(s.substr(slash + 1));
  if (den == 0.0) throw ConfigError("zero denominator in '" + s + "'");
  return parse_plain(s.substr(0, slash)) / den;
}

int parse_int(const std::string& raw) {
  const std::string s = trim(raw);
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ConfigError("not an integer: '" + s + "'");
  return v;
}

double Preset::get(const std::string& key, double fallback) const {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

double Preset::require(const std::string& key) const {
  auto it = params.find(key);
  if (it == params.end()) throw ConfigError("preset '" + name + "' needs " + key);
  return it->second;
}

void Preset::only(const std::vector<std::string>& keys) const {
  for (const auto& [k, v] : params) {
    bool known = false;
    for (const auto& key : keys) known = known || key == k;
    if (!known) throw ConfigError("preset '" + name + "' has no parameter '" + k + "'");
  }
}

Preset parse_preset(const std::string& text) {
  Preset p;
  const std::string s = trim(text);
  const auto colon = s.find(':');
  p.name = trim(s.substr(0, colon));
  if (p.name.empty()) throw ConfigError("empty preset name");
  if (colon == std::string::npos) return p;
  std::stringstream rest(s.substr(colon + 1));
  std::string item;
  while (std::getline(rest, item, ',')) {
    if (trim(item).empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key=value in preset: '" + item + "'");
    const std::string key = trim(item.substr(0, eq));
    if (p.params.count(key)) throw ConfigError("duplicate preset key '" + key + "'");
    p.params[key] = parse_number(item.substr(eq + 1));
  }
  return p;
}

Symbol symbol_from_preset(const std::string& text) {
  const Preset p = parse_preset(text);
  if (p.name == "oscillatory") {
    p.only({"m", "rho", "width"});
    return model_oscillatory(p.require("m"), p.require("rho"), p.get("width", 0.0));
  }
  if (p.name == "bessel") {
    p.only({"m"});
    return model_bessel(p.require("m"));
  }
  if (p.name == "xdep") {
    p.only({"m", "rho", "period", "width"});
    return model_x_dependent(p.require("m"), p.require("rho"), p.get("period", 4.0), p.get("width", 0.0));
  }
  if (p.name == "multiplier") {
    p.only({"alpha", "beta"});
    return model_multiplier(p.require("alpha"), p.require("beta"));
  }
  if (p.name == "const") {
    p.only({"c"});
    return constant_symbol(Complex(p.get("c", 1.0)));
  }
  throw ConfigError("unknown symbol preset '" + p.name + "'");
}

std::vector<std::pair<double, double>> parse_exponents(const std::string& text) {
  std::vector<std::pair<double, double>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (trim(item).empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError("exponent pair must be r:s', got '" + item + "'");
    const double r = parse_number(item.substr(0, colon));
    const double sp = parse_number(item.substr(colon + 1));
    if (!(r >= 1.0) || !(sp >= 1.0)) throw ConfigError("exponents must be >= 1");
    out.emplace_back(r, sp);
  }
  return out;
}

Lattice ExperimentConfig::lattice() const { return Lattice(n, length, samples); }

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (key == "experiment") experiment = v;
  else if (key == "n") n = parse_int(v);
  else if (key == "L") length = parse_number(v);
  else if (key == "N") samples = parse_int(v);
  else if (key == "symbol") symbol = v;
  else if (key == "exponents") exponents = parse_exponents(v);
  else if (key == "epsilon") epsilon = parse_number(v);
  else if (key == "j_max") j_max = parse_int(v);
  else if (key == "l_range") {
    const auto colon = v.find(':');
    if (colon == std::string::npos) throw ConfigError("l_range must be lo:hi");
    l_range = std::make_pair(parse_int(v.substr(0, colon)), parse_int(v.substr(colon + 1)));
  } else if (key == "trials") trials = parse_int(v);
  else if (key == "seed") seed = std::uint64_t(parse_number(v));
  else if (key == "out") out = v;
  else if (key == "threads") threads = parse_int(v);
  else if (key == "quick") quick = v == "1" || v == "true";
  else extra[key] = v;
}

void ExperimentConfig::validate() const {
  if (n != 1) throw ConfigError("operators are implemented for n = 1");
  if (samples < 8 || !is_power_of_two(samples)) throw ConfigError("N must be a power of two >= 8");
  if (!is_power_of_two(length)) throw ConfigError("L must be a power of two");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (l_range && l_range->first > l_range->second) throw ConfigError("empty l_range");
  try {
    (void)symbol_from_preset(symbol);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("symbol preset: ") + e.what());
  }
}

ExperimentConfig read_config(std::istream& is) {
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    cfg.set(trim(t.substr(0, eq)), t.substr(eq + 1));
  }
  return cfg;
}

}  // namespace sparsepdo
