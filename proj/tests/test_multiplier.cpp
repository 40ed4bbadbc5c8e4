#include <doctest.h>

#include <random>

#include "sparsepdo/maximal.hpp"
#include "sparsepdo/multiplier.hpp"

using namespace sparsepdo;

namespace {

// Direct reading of the multiplier region: with a = |alpha|, b = |beta|,
//   1 <= r <= s <= 2:        b > n a (1/r - 1/2)
//   1 <= r <= 2 <= s <= r':  b > n a (1/r - 1/s)
// and the same after (r, s) -> (s', r').
bool direct_region(double alpha, double beta, double x, double y) {
  const double a = std::abs(alpha), b = std::abs(beta);
  auto check = [&](double ir, double is) {
    // ir = 1/r, is = 1/s
    const bool A = ir <= 1.0 && ir >= is && is >= 0.5;
    const bool B = ir <= 1.0 && ir >= 0.5 && is <= 0.5 && is >= 1.0 - ir;
    return (A && b > a * (ir - 0.5)) || (B && b > a * (ir - is));
  };
  return check(x, 1.0 - y) || check(y, 1.0 - x);
}

}  // namespace

TEST_CASE("model multiplier values and support") {
  const Symbol m = model_multiplier(0.5, 0.25);
  const Complex v = m(0.0, 16.0);
  CHECK(std::abs(v) == doctest::Approx(0.5));
  CHECK(std::arg(v) == doctest::Approx(4.0 - 2 * kPi));
  CHECK(m(0.0, 0.5) == Complex(0.0));
  CHECK(m.params.m == -0.25);
  CHECK(m.params.rho == 0.5);

  const Symbol low = model_multiplier(-1.0, -0.5);
  CHECK(std::abs(low(0.0, 0.5)) > 0.0);
  CHECK(low(0.0, 2.0) == Complex(0.0));
  CHECK(low(0.0, 0.0) == Complex(0.0));
  CHECK_THROWS_AS(model_multiplier(0.0, 1.0), Error);
}

TEST_CASE("Miyachi condition") {
  for (auto [alpha, beta] : {std::pair{0.5, 0.25}, std::pair{2.0, 0.5}, std::pair{-1.0, -0.5}}) {
    const Symbol m = model_multiplier(alpha, beta);
    const auto rep = miyachi_check(m, alpha, beta, 3);
    CHECK(rep.pass);
    const auto sub = subdyadic_check(m, alpha, beta, 3);
    CHECK(sub.pass);
  }
  // Claiming more decay than the multiplier has fails at order 0.
  const auto bad = miyachi_check(model_multiplier(0.5, 0.25), 0.5, 0.75, 2);
  CHECK_FALSE(bad.pass);
  CHECK_FALSE(bad.entries[0].uniform);
  // Low-frequency mislabel: less growth towards 0 than claimed.
  CHECK_FALSE(miyachi_check(model_multiplier(-1.0, -0.5), -1.0, -1.0, 1).pass);

  SUBCASE("constant on an annulus with alpha = 1") {
    Symbol c = constant_symbol(1.0);
    c.eval = [](double, double xi) { return Complex(std::abs(xi) >= 1.0 ? 1.0 : 0.0); };
    CHECK(miyachi_check(c, 1.0, 0.0, 3).pass);
    CHECK(subdyadic_check(c, 1.0, 0.0, 3).pass);
  }
}

TEST_CASE("subdyadic condition tolerates L2-small roughness") {
  const double alpha = 0.5, beta = 0.25;
  const Symbol base = model_multiplier(alpha, beta);
  Symbol rough = base;
  // In band b: a bump t e^{-t^2} of width r 2^-b and height d^-beta 2^(-b/2)
  // centred on a sample point of the pointwise sweep.
  rough.eval = [=](double x, double xi) {
    Complex v = base(x, xi);
    const double a = std::abs(xi);
    for (int b = 1; b <= 9; ++b) {
      const double d = std::exp2(b);
      const double c = std::exp2(b + 0.5);
      const double w = std::pow(d, 1.0 - alpha) * std::exp2(-b);
      const double t = (a - c) / w;
      if (std::abs(t) < 12.0) v += std::pow(d, -beta) * std::exp2(-b / 2.0) * t * std::exp(-t * t);
    }
    return v;
  };
  CHECK(subdyadic_check(rough, alpha, beta, 1).pass);
  const auto pointwise = miyachi_check(rough, alpha, beta, 1);
  CHECK_FALSE(pointwise.pass);
  CHECK(pointwise.entries[0].uniform);
}

TEST_CASE("kernel exponent transfer") {
  const auto t = oscillatory_kernel_transfer(2.0, 0.5);
  CHECK(t.alpha == 2.0);
  CHECK(t.beta == 0.5);
  CHECK(t.admissible);
  const auto g = oscillatory_kernel_transfer(0.5, 0.75);
  CHECK(g.alpha == -1.0);
  CHECK(g.beta == 0.0);
  CHECK_FALSE(g.admissible);
  CHECK_FALSE(g.diagnostic.empty());
  CHECK_THROWS_AS(oscillatory_kernel_transfer(1.0, 1.0), Error);
  CHECK_THROWS_AS(oscillatory_kernel_transfer(0.5, 0.1), Error);

  const auto env = kernel_envelope_check(2.0, 0.5);
  CHECK(env.pass);
  // Stationary phase: |K^| ~ sqrt(2 pi) |xi|^-1/2.
  CHECK(env.constant == doctest::Approx(std::sqrt(2 * kPi)).epsilon(0.2));
}

TEST_CASE("low-frequency pieces decay towards zero frequency") {
  const Lattice lat(1, 4096.0, 4096);
  const Symbol m = model_multiplier(-1.0, -0.5);
  const std::vector<int> js{-6, -5, -4, -3, -2};
  const auto norms = low_frequency_piece_norms(m, js, lat);
  for (std::size_t i = 1; i < norms.size(); ++i) CHECK(norms[i] > norms[i - 1]);
  const auto fit = decay_fit(js, norms);
  CHECK(fit.slope == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("region translation matches the direct inequalities") {
  for (auto [alpha, beta] : {std::pair{0.5, 0.25}, std::pair{2.0, 0.5}, std::pair{-1.0, -0.75}, std::pair{0.5, 0.125}}) {
    const Region R = multiplier_region(alpha, beta);
    for (int i = 0; i <= 16; ++i)
      for (int k = 0; k <= 16; ++k) {
        const double x = i / 16.0, y = k / 16.0;
        if (x == 0.0 || y == 0.0) continue;
        INFO("alpha=" << alpha << " beta=" << beta << " x=" << x << " y=" << y);
        CHECK(in_region(ExponentPair::from_point(x, y), R, 0.0) == direct_region(alpha, beta, x, y));
      }
  }
}

TEST_CASE("propagator") {
  std::mt19937_64 rng(12);
  const Lattice lat(1, 16.0, 512);
  const GridFunction f = random_test_function(lat, rng);
  for (double alpha : {1.0, 2.0, 3.0}) {
    const GridFunction u = propagate(alpha, 0.7, f);
    CHECK(std::abs(lp_norm(u, 2.0) - lp_norm(f, 2.0)) / lp_norm(f, 2.0) < 1e-12);
  }
  GridFunction d = propagate(2.0, 1e-9, f);
  d.values() -= f.values();
  CHECK(lp_norm(d, 2.0) < 1e-5 * lp_norm(f, 2.0));

  SUBCASE("rescaling covariance") {
    const Bump b1{6.0, 0.5, 3.0, {1.0, 0.0}}, b2{10.0, 1.0, -2.0, {0.0, 1.0}};
    const Lattice big(1, 32.0, 512);
    auto on = [](const Bump& b, const Lattice& l, double s) {
      return GridFunction::sample(l, [&](double x) { return b(x / s); });
    };
    const ExponentPair pt{4.0 / 3.0, 4.0};
    const auto r1 = propagator_sparse_report(2, 1.0, 0.5, on(b1, lat, 1.0), on(b2, lat, 1.0), pt);
    const auto r4 = propagator_sparse_report(2, 4.0, 0.5, on(b1, big, 2.0), on(b2, big, 2.0), pt);
    CHECK(r1.ratio > 0.0);
    CHECK(r4.scale_shift == 1);
    CHECK(r4.ratio == doctest::Approx(r1.ratio).epsilon(1e-9));
    CHECK(r1.mass_error < 1e-12);
    CHECK_THROWS_AS(propagator_sparse_report(2, 2.0, 0.5, f, f, pt), Error);
  }
}
