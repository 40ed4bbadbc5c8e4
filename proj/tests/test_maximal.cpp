#include <doctest.h>

#include <random>

#include "sparsepdo/maximal.hpp"
#include "oracles.hpp"

using namespace sparsepdo;
using namespace sparsepdo::oracle;

TEST_CASE("maximal function of constants and Jensen ordering") {
  std::mt19937_64 rng(1);
  const Lattice lat(1, 8.0, 128);
  GridFunction c(lat);
  for (Index i = 0; i < c.size(); ++i) c[i] = 2.5;
  const GridFunction Mc = maximal(c, MaximalKind::hl());
  for (Index i = 0; i < c.size(); ++i) CHECK(Mc[i].real() == doctest::Approx(2.5));

  const GridFunction f = random_test_function(lat, rng);
  const GridFunction g = random_test_function(lat, rng);
  const GridFunction M1 = maximal(f, MaximalKind::hl());
  const GridFunction M2 = maximal(f, MaximalKind::lp(2.0));
  const GridFunction Mg = maximal(f, MaximalKind::power_gamma(2.0));
  GridFunction fg = f;
  fg.values() += g.values();
  const GridFunction Mfg = maximal(fg, MaximalKind::hl());
  const GridFunction Mgg = maximal(g, MaximalKind::hl());
  for (Index i = 0; i < f.size(); ++i) {
    CHECK(M2[i].real() >= M1[i].real() * (1 - 1e-12));
    CHECK(Mg[i].real() == doctest::Approx(M2[i].real()));
    CHECK(M1[i].real() >= std::abs(f[i]) * (1 - 1e-12));
    CHECK(Mfg[i].real() <= (M1[i].real() + Mgg[i].real()) * (1 + 1e-12));
  }
  const GridFunction MM = maximal(f, MaximalKind::iterated(2));
  for (Index i = 0; i < f.size(); ++i) CHECK(MM[i].real() >= M1[i].real() * (1 - 1e-12));
  CHECK_THROWS_AS(maximal(f, MaximalKind{MaximalKind::Tag::Grand, 1.0, nullptr}), Error);
}

TEST_CASE("maximal function matches exhaustive scan") {
  std::mt19937_64 rng(2);
  const Lattice lat(1, 4.0, 32);
  const auto cubes = brute_cubes(lat);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 4; ++trial) {
    GridFunction f(lat);
    for (Index i = 0; i < f.size(); ++i) f[i] = Complex(nd(rng), nd(rng));
    for (double p : {1.0, 2.0}) {
      const GridFunction M = maximal(f, p == 1.0 ? MaximalKind::hl() : MaximalKind::lp(p));
      std::vector<double> ref(32, 0.0);
      for (const auto& q : cubes) {
        double s = 0.0;
        for (Index c : q.cells) s += std::pow(std::abs(f[c]), p);
        const double avg = std::pow(s / double(q.cells.size()), 1.0 / p);
        for (Index c : q.cells) ref[std::size_t(c)] = std::max(ref[std::size_t(c)], avg);
      }
      for (Index i = 0; i < 32; ++i) CHECK(M[i].real() == doctest::Approx(ref[std::size_t(i)]).epsilon(1e-12));
    }
  }

  SUBCASE("indicator of a cube") {
    GridFunction chi(lat);
    for (Index i = 8; i < 16; ++i) chi[i] = 1.0;  // the cube [1, 2)
    const GridFunction M = maximal(chi, MaximalKind::hl());
    for (Index i = 8; i < 16; ++i) CHECK(M[i].real() == doctest::Approx(1.0));
    for (Index i = 0; i < 32; ++i) CHECK(M[i].real() >= 0.25 - 1e-12);  // the root covers everything
  }
}

TEST_CASE("grand maximal function matches exhaustive scan") {
  std::mt19937_64 rng(3);
  const Lattice lat(1, 4.0, 32);
  const Symbol a = model_oscillatory(-0.5, 0.5);
  const OperatorMatrix T = operator_matrix(a, lat);
  const GridFunction f = random_test_function(lat, rng);
  const GridFunction G = grand_maximal(T, f);
  std::vector<double> ref(32, 0.0);
  for (const auto& q : brute_cubes(lat)) {
    GridFunction h = f;
    for (int i = 0; i < 32; ++i)
      if (in_tripled(q, lat.position(i), lat.length())) h[i] = 0.0;
    const GridFunction Th = T.apply(h);
    double best = 0.0;
    for (Index c : q.cells) best = std::max(best, std::abs(Th[c]));
    for (Index c : q.cells) ref[std::size_t(c)] = std::max(ref[std::size_t(c)], best);
  }
  for (Index i = 0; i < 32; ++i) CHECK(G[i].real() == doctest::Approx(ref[std::size_t(i)]).epsilon(1e-9));
}

TEST_CASE("weak type ratio") {
  const Lattice lat(1, 4.0, 16);
  GridFunction g(lat);
  g[0] = 4.0;
  g[1] = 1.0;
  // sup over lambda: 4 * 0.25 = 1 and 1 * 0.5 = 0.5 (r = 1).
  CHECK(weak_type_ratio(g, 1.0, 1.0) == doctest::Approx(1.0));
  CHECK(weak_type_ratio(g, 2.0, 2.0) == doctest::Approx(std::max(4.0 * 0.5, 1.0 * std::sqrt(0.5)) / 2.0));
}

TEST_CASE("pointwise domination") {
  const Lattice lat(1, 16.0, 256);
  SUBCASE("zero input") {
    const auto res = pointwise_dominate(model_oscillatory(-0.5, 0.5), GridFunction(lat), 2.0);
    CHECK(res.collection.family.empty());
    CHECK(res.ratio == 0.0);
  }
  SUBCASE("indicator input under a bounded multiplier") {
    GridFunction chi(lat);
    for (Index i = 64; i < 96; ++i) chi[i] = 1.0;
    const auto res = pointwise_dominate(model_oscillatory(-0.5, 0.5), chi, 2.0);
    CHECK(res.ratio > 0.0);
    CHECK(std::isfinite(res.ratio));
    CHECK_FALSE(res.partial);
    CHECK(res.collection.witness.has_value());
    CHECK(res.collection.eta >= 0.5);
    CHECK(verify_witness(res.collection, lat));
    CHECK(carleson_constant(res.collection.family) <= 2.0 + 1e-12);
  }
  SUBCASE("random inputs") {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 3; ++t) {
      const GridFunction f = random_test_function(lat, rng);
      const auto res = pointwise_dominate(model_oscillatory(-0.75, 0.25), f, 1.25);
      CHECK(std::isfinite(res.ratio));
      CHECK(res.collection.witness.has_value());
      CHECK(verify_witness(res.collection, lat));
    }
  }
}

TEST_CASE("grand maximal weak type report") {
  std::mt19937_64 rng(5);
  const Lattice lat(1, 16.0, 256);
  GrandWeakOptions o;
  o.trials = 3;
  const auto rep = grand_maximal_weak_type(model_oscillatory(-0.5, 0.5), lat, 2.0, rng, o);
  CHECK(rep.p == doctest::Approx(1.125));
  CHECK(rep.majorant_per_trial.size() == 3);
  CHECK(rep.weak_constant > 0.0);
  CHECK(std::isfinite(rep.majorant_constant));
  CHECK(std::isfinite(rep.large_cube_constant));
}
