#include "sparsepdo/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace sparsepdo {

double support_ramp(double t, double width) {
  if (width <= 0.0) return t >= 1.0 ? 1.0 : 0.0;
  if (t <= 1.0) return 0.0;
  return 1.0 - smooth_cutoff(1.0 + (t - 1.0) / width);
}

namespace {

std::string fmt(const char* name, std::initializer_list<std::pair<const char*, double>> kv) {
  std::ostringstream os;
  os << name << ':';
  bool first = true;
  for (auto [k, v] : kv) {
    os << (first ? "" : ",") << k << '=' << v;
    first = false;
  }
  return os.str();
}

Complex oscillatory_value(double m, double rho, double width, double xi) {
  const double a = std::abs(xi);
  const double gate = rho >= 1.0 ? 1.0 : support_ramp(std::pow(a, 1.0 - rho), width);
  if (gate == 0.0) return 0.0;
  return gate * std::pow(1.0 + a, m) * std::polar(1.0, std::pow(a, 1.0 - rho));
}

}  // namespace

Symbol model_oscillatory(double m, double rho, double support_width) {
  Symbol s;
  s.params = {m, rho, 0.0};
  s.eval = [=](double, double xi) { return oscillatory_value(m, rho, support_width, xi); };
  s.label = fmt("oscillatory", {{"m", m}, {"rho", rho}});
  return s;
}

Symbol model_bessel(double m) {
  Symbol s;
  s.params = {m, 1.0, 0.0};
  s.eval = [=](double, double xi) { return Complex(std::pow(1.0 + xi * xi, 0.5 * m)); };
  s.label = fmt("bessel", {{"m", m}});
  return s;
}

Symbol model_x_dependent(double m, double rho, double period, double support_width) {
  if (!(period > 0.0)) throw Error("x period must be positive");
  Symbol s;
  s.params = {m, rho, 0.0};
  s.eval = [=](double x, double xi) {
    return (2.0 + std::sin(2.0 * kPi * x / period)) * oscillatory_value(m, rho, support_width, xi);
  };
  s.label = fmt("xdep", {{"m", m}, {"rho", rho}});
  s.x_independent = false;
  s.x_period = period;
  return s;
}

Symbol constant_symbol(Complex c, ClassParams params) {
  Symbol s;
  s.params = params;
  s.eval = [=](double, double) { return c; };
  s.label = fmt("const", {{"re", c.real()}, {"im", c.imag()}});
  return s;
}

Symbol relabel(const Symbol& a, ClassParams params) {
  Symbol s = a;
  s.params = params;
  return s;
}

namespace {

// Weights of the k-th central difference at offsets (k/2 - i) h, i = 0..k.
std::vector<double> stencil(int k) {
  std::vector<double> w(std::size_t(k) + 1);
  double binom = 1.0;
  for (int i = 0; i <= k; ++i) {
    w[std::size_t(i)] = (i % 2 == 0 ? 1.0 : -1.0) * binom;
    binom = binom * (k - i) / (i + 1);
  }
  return w;
}

}  // namespace

Complex finite_difference(const Symbol& a, double x, double xi, int nu, int sigma, double hx, double hxi) {
  if (nu < 0 || sigma < 0) throw Error("derivative orders must be nonnegative");
  if (nu > 0 && (!(hx > 0.0) || x + hx == x)) throw Error("finite-difference step underflow");
  if (sigma > 0 && (!(hxi > 0.0) || xi + hxi == xi)) throw Error("finite-difference step underflow");
  const auto wx = stencil(nu);
  const auto wxi = stencil(sigma);
  Complex acc = 0.0;
  for (int i = 0; i <= nu; ++i) {
    const double xp = x + (0.5 * nu - i) * hx;
    for (int k = 0; k <= sigma; ++k) {
      const double xip = xi + (0.5 * sigma - k) * hxi;
      acc += wx[std::size_t(i)] * wxi[std::size_t(k)] * a(xp, xip);
    }
  }
  return acc / (std::pow(hx, nu) * std::pow(hxi, sigma));
}

SeminormReport seminorm_check(const Symbol& a, int max_order, double xi_min, double xi_max,
                              const SeminormOptions& opt) {
  if (max_order < 0 || max_order > 4) throw Error("seminorm_check supports orders 0..4");
  if (!(xi_min > 0.0 && xi_max > xi_min)) throw Error("invalid frequency range");
  if (opt.points_per_octave < 1) throw Error("points_per_octave must be positive");

  const double eps = std::numeric_limits<double>::epsilon();
  const ClassParams& p = a.params;
  auto weight_base = [&](double xi) { return opt.homogeneous_weight ? std::abs(xi) : 1.0 + std::abs(xi); };
  auto xi_scale = [&](double xi) {
    if (opt.xi_scale) return opt.xi_scale(xi);
    return std::pow(weight_base(xi), p.rho);
  };

  std::vector<double> xs;
  const int nx = a.x_independent ? 1 : std::max(1, opt.x_samples);
  for (int i = 0; i < nx; ++i) xs.push_back(a.x_independent ? 0.0 : a.x_period * (i + 0.5) / nx);

  std::vector<double> mags;
  const double steps = std::ceil(std::log2(xi_max / xi_min) * opt.points_per_octave);
  for (int t = 0; t <= int(steps); ++t) mags.push_back(std::min(xi_max, xi_min * std::exp2(t / double(opt.points_per_octave))));
  const int band0 = int(std::floor(std::log2(xi_min)));
  const int band1 = int(std::floor(std::log2(xi_max)));
  // Low-frequency sweeps look for blow-up as |xi| -> 0, i.e. negative slopes.
  const bool low_frequency = xi_max <= 1.0;

  SeminormReport report;
  double scale0 = 0.0;
  for (int order = 0; order <= max_order; ++order) {
    for (int nu = 0; nu <= order; ++nu) {
      const int sigma = order - nu;
      if (a.x_independent && nu > 0) continue;
      SeminormEntry e;
      e.nu = nu;
      e.sigma = sigma;
      std::map<int, double> bands;
      for (int b = band0; b <= band1; ++b) bands[b] = 0.0;
      const double hx = opt.x_scale * std::pow(eps, 1.0 / (nu + 2));
      for (double mag : mags) {
        for (double xi : {mag, -mag}) {
          const double hxi = xi_scale(xi) * std::pow(eps, 1.0 / (sigma + 2));
          const double w = std::pow(weight_base(xi), -p.m + p.rho * sigma - p.delta * nu);
          for (double x : xs) {
            const double v = std::abs(finite_difference(a, x, xi, nu, sigma, hx, hxi)) * w;
            if (!std::isfinite(v)) throw NumericalError("non-finite symbol derivative");
            e.constant = std::max(e.constant, v);
            auto& slot = bands[std::clamp(int(std::floor(std::log2(mag))), band0, band1)];
            slot = std::max(slot, v);
          }
        }
      }
      if (order == 0) scale0 = std::max(scale0, e.constant);
      const double floor = 1e-12 * std::max(1.0, scale0);
      std::vector<double> bx, by;
      for (auto [b, c] : bands) {
        e.band_constants.push_back(c);
        bx.push_back(b);
        by.push_back(std::log2(std::max(c, floor)));
      }
      if (bx.size() >= 2) {
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < bx.size(); ++i) mx += bx[i], my += by[i];
        mx /= double(bx.size());
        my /= double(bx.size());
        double sxy = 0, sxx = 0;
        for (std::size_t i = 0; i < bx.size(); ++i) sxy += (bx[i] - mx) * (by[i] - my), sxx += (bx[i] - mx) * (bx[i] - mx);
        e.slope = sxy / sxx;
      }
      e.uniform = low_frequency ? e.slope >= -opt.slope_tolerance : e.slope <= opt.slope_tolerance;
      report.pass = report.pass && e.uniform;
      report.entries.push_back(std::move(e));
    }
  }
  return report;
}

}  // namespace sparsepdo
