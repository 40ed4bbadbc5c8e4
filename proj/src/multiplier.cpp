#include "sparsepdo/multiplier.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sparsepdo/pdo.hpp"

namespace sparsepdo {

namespace {

double ols_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() < 2) return 0.0;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
  mx /= double(xs.size());
  my /= double(xs.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

// Bounded-in-band test shared by the sweeps: high-frequency sweeps flag
// growth, low-frequency sweeps flag blow-up towards 0.
bool uniform_slope(double slope, double tol, bool low_frequency) {
  return low_frequency ? slope >= -tol : slope <= tol;
}

std::string label(const char* name, double alpha, double beta) {
  std::ostringstream os;
  os << name << ":alpha=" << alpha << ",beta=" << beta;
  return os.str();
}

}  // namespace

ClassParams multiplier_class(double alpha, double beta) { return {-beta, 1.0 - alpha, 0.0}; }

Symbol model_multiplier(double alpha, double beta) {
  if (alpha == 0.0) throw Error("alpha = 0 multipliers are out of scope");
  Symbol s;
  s.params = multiplier_class(alpha, beta);
  s.eval = [=](double, double xi) -> Complex {
    const double a = std::abs(xi);
    if (a == 0.0) return 0.0;
    const double pa = std::pow(a, alpha);
    if (!(pa >= 1.0)) return 0.0;
    return std::pow(a, -beta) * std::exp(Complex(0.0, pa));
  };
  s.label = label("multiplier", alpha, beta);
  return s;
}

Region multiplier_region(double alpha, double beta, int n) {
  return region_vertices(-std::abs(beta), 1.0 - std::abs(alpha), n);
}

std::pair<double, double> multiplier_frequency_range(double alpha) {
  if (alpha > 0.0) return {2.0, 1024.0};
  return {std::exp2(-8.0), std::exp2(-0.25)};
}

SeminormReport miyachi_check(const Symbol& m, double alpha, double beta, int max_order,
                             const SeminormOptions& options) {
  if (alpha == 0.0) throw Error("alpha = 0 multipliers are out of scope");
  SeminormOptions o = options;
  o.homogeneous_weight = true;
  const auto [lo, hi] = multiplier_frequency_range(alpha);
  Symbol a = relabel(m, multiplier_class(alpha, beta));
  a.x_independent = true;
  return seminorm_check(a, max_order, lo, hi, o);
}

SubdyadicReport subdyadic_check(const Symbol& m, double alpha, double beta, int max_order,
                                const SubdyadicOptions& opt) {
  if (alpha == 0.0) throw Error("alpha = 0 multipliers are out of scope");
  if (max_order < 0 || max_order > 4) throw Error("subdyadic_check supports orders 0..4");
  if (opt.samples_per_ball < 1 || opt.max_balls_per_band < 1) throw Error("invalid subdyadic sampling");
  const auto [lo, hi] = multiplier_frequency_range(alpha);
  const int band0 = int(std::floor(std::log2(lo)));
  const int band1 = int(std::ceil(std::log2(hi))) - 1;
  const bool low_frequency = hi <= 1.0;
  const double eps = std::numeric_limits<double>::epsilon();

  SubdyadicReport rep;
  double scale0 = 0.0;
  for (int order = 0; order <= max_order; ++order) {
    SubdyadicEntry e;
    e.order = order;
    std::vector<double> bx, by;
    for (int b = band0; b <= band1; ++b) {
      const double d = std::exp2(b);
      const double radius = std::min(std::pow(d, 1.0 - alpha), d / 2.0);
      const Index total = Index(std::ceil(d / (2.0 * radius)));
      const Index count = std::min<Index>(total, opt.max_balls_per_band);
      double band = 0.0;
      for (Index k = 0; k < count; ++k) {
        // Evenly spread subset of the tiling when the band holds too many balls.
        const Index slot = count == total ? k : Index(double(k) * double(total) / double(count));
        const double centre = d + (2.0 * double(slot) + 1.0) * radius;
        const double dist = centre - radius;
        const double h = std::min(radius, std::pow(dist, 1.0 - alpha)) * std::pow(eps, 1.0 / (order + 2));
        for (double sign : {1.0, -1.0}) {
          double acc = 0.0;
          for (int t = 0; t < opt.samples_per_ball; ++t) {
            const double xi = sign * (centre - radius + 2.0 * radius * (t + 0.5) / opt.samples_per_ball);
            acc += std::norm(finite_difference(m, 0.0, xi, 0, order, 1.0, h));
          }
          const double v = std::pow(dist, beta + (1.0 - alpha) * order) * std::sqrt(acc / opt.samples_per_ball);
          if (!std::isfinite(v)) throw NumericalError("non-finite multiplier derivative");
          band = std::max(band, v);
        }
        ++rep.balls;
      }
      e.band_constants.push_back(band);
      e.constant = std::max(e.constant, band);
      bx.push_back(b);
    }
    if (order == 0) scale0 = e.constant;
    const double floor = 1e-12 * std::max(1.0, scale0);
    for (double c : e.band_constants) by.push_back(std::log2(std::max(c, floor)));
    // Slope over the half of the bands nearest the singular end (|xi| -> inf
    // or |xi| -> 0), where the asymptotic regime holds.
    const std::size_t half = (bx.size() + 1) / 2;
    const std::size_t from = low_frequency ? 0 : bx.size() - half;
    e.slope = ols_slope(std::vector<double>(bx.begin() + from, bx.begin() + from + half),
                        std::vector<double>(by.begin() + from, by.begin() + from + half));
    e.uniform = uniform_slope(e.slope, opt.slope_tolerance, low_frequency);
    rep.pass = rep.pass && e.uniform;
    rep.entries.push_back(e);
  }
  return rep;
}

KernelTransfer oscillatory_kernel_transfer(double a, double b, int n) {
  if (!(a > 0.0)) throw Error("kernel exponent a must be positive");
  if (a == 1.0) throw Error("a = 1 is the Bochner-Riesz regime and is not covered");
  if (n < 1) throw Error("dimension must be positive");
  if (b < n * (1.0 - a / 2.0)) throw Error("kernel decay b must be at least n(1 - a/2)");
  KernelTransfer out;
  out.alpha = a / (a - 1.0);
  out.beta = (n * a / 2.0 - n + b) / (a - 1.0);
  out.admissible = out.alpha * out.beta > 0.0;
  if (!out.admissible) {
    std::ostringstream os;
    os << "alpha*beta = " << out.alpha * out.beta << " is not positive (alpha = " << out.alpha
       << ", beta = " << out.beta << ")";
    out.diagnostic = os.str();
  }
  return out;
}

EnvelopeReport kernel_envelope_check(double a, double b, const EnvelopeOptions& opt) {
  const KernelTransfer tr = oscillatory_kernel_transfer(a, b, 1);
  if (opt.band_hi <= opt.band_lo) throw Error("empty envelope band");
  const Lattice lat(1, opt.length, opt.samples);
  const double L = opt.length;
  const double half = L / 2.0;
  if (a * std::pow(half, a - 1.0) >= lat.nyquist() && a > 1.0) throw Error("kernel phase is under-resolved");
  const GridFunction K = GridFunction::sample(lat, [&](double x) {
    const double d = std::min(x, L - x);
    const double cut = (1.0 - smooth_cutoff(d)) * smooth_cutoff(4.0 * d / L);
    if (cut == 0.0) return Complex(0.0);
    return cut * std::exp(Complex(0.0, std::pow(d, a))) / std::pow(1.0 + d, b);
  });
  const GridFunction Kh = dft(K);
  EnvelopeReport rep;
  rep.alpha = tr.alpha;
  rep.beta = tr.beta;
  std::vector<double> bands(std::size_t(opt.band_hi - opt.band_lo), 0.0);
  for (int k = 0; k < lat.samples(); ++k) {
    const double xi = std::abs(lat.frequency(k));
    if (xi < std::exp2(opt.band_lo) || xi >= std::exp2(opt.band_hi)) continue;
    const double v = std::abs(Kh[k]) * std::pow(xi, tr.beta);
    if (!std::isfinite(v)) throw NumericalError("non-finite kernel transform");
    const int band = std::clamp(int(std::floor(std::log2(xi))) - opt.band_lo, 0, int(bands.size()) - 1);
    bands[std::size_t(band)] = std::max(bands[std::size_t(band)], v);
    rep.constant = std::max(rep.constant, v);
  }
  std::vector<double> bx, by;
  for (std::size_t i = 0; i < bands.size(); ++i) {
    bx.push_back(double(i));
    by.push_back(std::log2(std::max(bands[i], 1e-300)));
  }
  rep.band_constants = bands;
  rep.slope = ols_slope(bx, by);
  rep.pass = std::isfinite(rep.constant) && rep.constant > 0.0 && rep.slope <= opt.slope_tolerance;
  return rep;
}

std::vector<double> low_frequency_piece_norms(const Symbol& m, const std::vector<int>& js, const Lattice& lattice) {
  std::vector<double> out;
  for (int j : js) {
    double best = 0.0;
    for (int k = 0; k < lattice.samples(); ++k) {
      const double xi = lattice.frequency(k);
      const double c = smooth_annulus(std::exp2(-j) * std::abs(xi));
      if (c > 0.0) best = std::max(best, std::abs(m(0.0, xi)) * c);
    }
    out.push_back(best);
  }
  return out;
}

namespace {

GridFunction spectral(const GridFunction& f, const std::function<Complex(double)>& mult) {
  GridFunction fh = dft(f);
  const Lattice& lat = f.lattice();
  for (int k = 0; k < lat.samples(); ++k) fh[k] *= mult(lat.frequency(k));
  return inverse_dft(fh);
}

}  // namespace

GridFunction propagate(double alpha, double t, const GridFunction& f) {
  if (!(alpha > 0.0)) throw Error("propagator needs alpha > 0");
  if (!(t >= 0.0)) throw Error("propagator needs t >= 0");
  if (f.lattice().dim() != 1) throw Error("propagator is implemented for n = 1");
  return spectral(f, [&](double xi) { return std::exp(Complex(0.0, t * std::pow(std::abs(xi), alpha))); });
}

GridFunction sobolev_smooth(double alpha, double t, double beta, const GridFunction& f) {
  const double c = std::pow(t, 2.0 / alpha);
  return spectral(f, [&](double xi) { return Complex(std::pow(1.0 + c * xi * xi, beta / 2.0)); });
}

PropagatorReport propagator_sparse_report(int alpha, double t, double beta, const GridFunction& f,
                                          const GridFunction& g, const ExponentPair& pt,
                                          const PropagatorOptions& opt) {
  if (alpha < 1) throw Error("propagator needs a positive integer alpha");
  if (!(t > 0.0)) throw Error("propagator needs t > 0");
  if (!(f.lattice() == g.lattice())) throw Error("f and g live on different lattices");
  const Lattice& lat = f.lattice();
  const double log_scale = std::log2(t) / alpha;
  const int shift = int(std::lround(log_scale));
  if (std::abs(log_scale - shift) > 1e-9) throw Error("rescaled cubes are not dyadic: t^(1/alpha) must be a power of two");
  const int p = lat.length_log2();
  const int k_min = lat.cell_scale() + int(std::ceil(std::log2(double(std::max(opt.min_cells, 1)))));
  if (k_min > p) throw Error("scale underflow: lattice too coarse for the rescaled cubes");

  PropagatorReport rep;
  rep.scale_shift = shift;
  const GridFunction u = propagate(alpha, t, f);
  const double fn = lp_norm(f, 2.0);
  rep.mass_error = fn > 0.0 ? std::abs(lp_norm(u, 2.0) - fn) / fn : 0.0;
  rep.pairing = std::abs(inner_product(u, g));

  // Frequencies in t = 1 units are t^(1/alpha) xi.
  int j_max = int(std::floor(std::log2(lat.nyquist()) + shift)) - 1;
  if (opt.j_max > 0) j_max = std::min(j_max, opt.j_max);
  const ClassParams cls = multiplier_class(alpha, beta);
  const double e = level_exponent(cls, pt, opt.epsilon);
  std::vector<ScaleLevel> levels;
  for (int j = 0; j <= std::max(j_max, 0); ++j) {
    const int k = std::clamp(int(std::floor(j * (alpha - 1.0))) + shift, k_min, p);
    levels.push_back({j, std::nullopt, tiling(lat, GridShift::zero(1), k), std::exp2(j * e)});
  }
  SparseFromDecayingOptions so;
  so.allow_nondecaying = true;
  const GridFunction fs = sobolev_smooth(alpha, t, beta, f);
  const auto res = sparse_from_decaying(levels, fs, g, pt.r, pt.s_prime, so);
  rep.collection = res.collection;
  rep.form = res.form_value;
  rep.ratio = rep.form > 0.0 ? rep.pairing / rep.form : 0.0;
  return rep;
}

}  // namespace sparsepdo
