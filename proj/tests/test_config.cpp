#include <doctest.h>

#include <sstream>

#include "sparsepdo/config.hpp"

using namespace sparsepdo;

TEST_CASE("preset parsing") {
  const Preset p = parse_preset("oscillatory:m=-1/2, rho=0.25");
  CHECK(p.name == "oscillatory");
  CHECK(p.require("m") == -0.5);
  CHECK(p.get("rho", 0.0) == 0.25);
  CHECK(p.get("width", 7.0) == 7.0);
  CHECK(parse_preset("const").params.empty());
  CHECK_THROWS_AS(parse_preset("x:m"), ConfigError);
  CHECK_THROWS_AS(parse_preset("x:m=1,m=2"), ConfigError);
  CHECK_THROWS_AS(parse_preset("x:m=abc"), ConfigError);
  CHECK_THROWS_AS(parse_preset(":m=1"), ConfigError);
}

TEST_CASE("symbol presets") {
  CHECK(symbol_from_preset("oscillatory:m=-0.5,rho=0").params.m == -0.5);
  CHECK(symbol_from_preset("bessel:m=-1").params.rho == 1.0);
  CHECK_FALSE(symbol_from_preset("xdep:m=-0.5,rho=0.5,period=2").x_independent);
  CHECK(symbol_from_preset("multiplier:alpha=0.5,beta=0.25").params.rho == 0.5);
  CHECK(symbol_from_preset("const:c=2")(0.0, 5.0) == Complex(2.0));
  CHECK_THROWS_AS(symbol_from_preset("oscillatory:m=-0.5"), ConfigError);
  CHECK_THROWS_AS(symbol_from_preset("bessel:m=-1,q=2"), ConfigError);
  CHECK_THROWS_AS(symbol_from_preset("unknown"), ConfigError);
}

TEST_CASE("config files") {
  std::istringstream in(
      "# comment\n"
      "experiment = dominate\n"
      "L = 32\n"
      "N = 2048\n"
      "exponents = 4/3:4; 2:2\n"
      "l_range = -1:3\n"
      "seed = 42\n"
      "custom = value\n");
  ExperimentConfig cfg = read_config(in);
  CHECK(cfg.experiment == "dominate");
  CHECK(cfg.length == 32.0);
  CHECK(cfg.samples == 2048);
  REQUIRE(cfg.exponents.size() == 2);
  CHECK(cfg.exponents[0].first == doctest::Approx(4.0 / 3.0));
  CHECK(cfg.exponents[1].second == 2.0);
  CHECK(cfg.l_range->first == -1);
  CHECK(cfg.seed == 42);
  CHECK(cfg.extra.at("custom") == "value");
  CHECK_NOTHROW(cfg.validate());

  cfg.samples = 1000;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.samples = 1024;
  cfg.trials = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.trials = 1;
  cfg.symbol = "nope";
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  std::istringstream bad("no equals sign\n");
  CHECK_THROWS_AS(read_config(bad), ConfigError);
  CHECK_THROWS_AS(parse_exponents("0.5:2"), ConfigError);
}
