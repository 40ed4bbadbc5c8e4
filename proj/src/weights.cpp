#include "sparsepdo/weights.hpp"

#include <algorithm>
#include <cmath>

#include "sparsepdo/config.hpp"
#include "sparsepdo/pdo.hpp"
#include "sparsepdo/sparse.hpp"

namespace sparsepdo {

namespace {

double dual(double p) {
  if (p == 1.0) return kInf;
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

GridFunction pow_weight(const Weight& w, double e) {
  GridFunction out(w.lattice());
  for (Index i = 0; i < w.size(); ++i) {
    const double v = w[i].real();
    out[i] = v > 0.0 ? std::pow(v, e) : 0.0;
  }
  return out;
}

}  // namespace

void validate_weight(const Weight& w) {
  bool positive = false;
  for (Index i = 0; i < w.size(); ++i) {
    const Complex v = w[i];
    if (v.imag() != 0.0 || !(v.real() >= 0.0) || !std::isfinite(v.real()))
      throw Error("weights must be finite, real and nonnegative");
    positive = positive || v.real() > 0.0;
  }
  if (!positive) throw Error("weight vanishes identically");
}

Weight power_weight(const Lattice& lattice, double a) {
  const double L = lattice.length();
  const double c = L / 2.0 + lattice.spacing() / 2.0;
  return GridFunction::sample(lattice, [&](double x) {
    double d = std::abs(x - c);
    d = std::min(d, L - d);
    return Complex(std::pow(d, a));
  });
}

Weight checkerboard_weight(const Lattice& lattice, double lambda) {
  if (!(lambda > 0.0)) throw Error("checkerboard weight needs lambda > 0");
  Weight w(lattice);
  for (Index i = 0; i < w.size(); ++i) w[i] = (i % 2 == 0) ? lambda : 1.0;
  return w;
}

Weight spike_weight(const Lattice& lattice, double width) {
  if (!(width > 0.0)) throw Error("spike width must be positive");
  const double c = lattice.length() / 2.0;
  Weight w = GridFunction::sample(lattice, [&](double x) {
    return Complex(x - c >= -width / 2.0 && x - c < width / 2.0 ? 1.0 / width : 0.0);
  });
  validate_weight(w);
  return w;
}

Weight constant_weight(const Lattice& lattice, double c) {
  if (!(c > 0.0)) throw Error("constant weight must be positive");
  Weight w(lattice);
  w.values().setConstant(c);
  return w;
}

double ap_characteristic(const Weight& w, double p) {
  validate_weight(w);
  if (!(p >= 1.0)) throw Error("A_p needs p >= 1");
  const Lattice& lat = w.lattice();
  if (p == 1.0) {
    const GridFunction Mw = maximal(w, MaximalKind::hl());
    double best = 1.0;
    for (Index i = 0; i < w.size(); ++i) {
      const double v = w[i].real(), m = Mw[i].real();
      if (v == 0.0) {
        if (m > 0.0) return kInf;
        continue;
      }
      best = std::max(best, m / v);
    }
    return best;
  }
  const Index n = lat.samples();
  std::vector<Index> zeros(std::size_t(2 * n + 1), 0);
  for (Index i = 0; i < 2 * n; ++i) zeros[std::size_t(i + 1)] = zeros[std::size_t(i)] + (w[i % n].real() == 0.0);
  const PowerSums mean_w(w, 1.0);
  if (std::isinf(p)) throw Error("A_inf is not supported as a p value");
  const PowerSums mean_dual(pow_weight(w, 1.0 - dual(p)), 1.0);
  double best = 0.0;
  for (const auto& q : scan_cubes(lat)) {
    if (zeros[std::size_t(q.first + q.count)] - zeros[std::size_t(q.first)] > 0) return kInf;
    best = std::max(best, mean_w.average(q.first, q.count) * std::pow(mean_dual.average(q.first, q.count), p - 1.0));
  }
  return best;
}

double rh_characteristic(const Weight& w, double q) {
  validate_weight(w);
  if (!(q >= 1.0)) throw Error("RH_q needs q >= 1");
  if (q == 1.0) return 1.0;
  const PowerSums mean_w(w, 1.0), mean_q(w, q);
  double best = 1.0;
  for (const auto& c : scan_cubes(w.lattice())) {
    const double m = mean_w.average(c.first, c.count);
    if (m > 0.0) best = std::max(best, mean_q.average(c.first, c.count) / m);
  }
  return best;
}

WeightCharacteristics characteristics(const Weight& w, double p, const std::vector<double>& rh_exponents) {
  WeightCharacteristics out;
  out.p = p;
  out.ap = ap_characteristic(w, p);
  for (double q : rh_exponents) out.rh[q] = rh_characteristic(w, q);
  return out;
}

double weighted_norm(const GridFunction& f, const Weight& w, double p) {
  if (!(f.lattice() == w.lattice())) throw Error("function and weight live on different lattices");
  if (!(p >= 1.0) || std::isinf(p)) throw Error("weighted norms need 1 <= p < inf");
  double s = 0.0;
  for (Index i = 0; i < f.size(); ++i) s += std::pow(std::abs(f[i]), p) * w[i].real();
  return std::pow(s * f.lattice().cell_measure(), 1.0 / p);
}

Weight dual_weight(const Weight& w, double p) {
  if (!(p > 1.0)) throw Error("dual weight needs p > 1");
  return pow_weight(w, 1.0 - dual(p));
}

bool finite_by_scaling(double coarse, double fine, double growth_tol) {
  return std::isfinite(coarse) && std::isfinite(fine) && fine <= coarse * (1.0 + growth_tol);
}

EquivalenceReport ap_rh_equivalence_check(const std::function<Weight(const Lattice&)>& make_weight,
                                          const Lattice& lattice, double p, double r, double s,
                                          double growth_tol) {
  if (!(r >= 1.0 && r < p && p < s)) throw Error("equivalence needs 1 <= r < p < s");
  EquivalenceReport rep;
  rep.p = p;
  rep.r = r;
  rep.s = s;
  rep.lhs_ap_exponent = p / r;
  rep.lhs_rh_exponent = std::isinf(s) ? 1.0 : s / (s - p);
  rep.rhs_power = rep.lhs_rh_exponent;
  rep.rhs_ap_exponent = rep.rhs_power * (p / r - 1.0) + 1.0;
  const Lattice fine(lattice.dim(), lattice.length(), 2 * lattice.samples());
  const Lattice* lats[2] = {&lattice, &fine};
  for (int i = 0; i < 2; ++i) {
    const Weight w = make_weight(*lats[i]);
    rep.lhs_ap[i] = ap_characteristic(w, rep.lhs_ap_exponent);
    rep.lhs_rh[i] = rh_characteristic(w, rep.lhs_rh_exponent);
    rep.rhs_ap[i] = ap_characteristic(pow_weight(w, rep.rhs_power), rep.rhs_ap_exponent);
  }
  // [w^q]_A is comparable to ([w]_A [w]_RH)^q, so the right side is judged
  // after a q-th root to put both growth rates on one scale.
  rep.lhs_holds = finite_by_scaling(rep.lhs_ap[0] * rep.lhs_rh[0], rep.lhs_ap[1] * rep.lhs_rh[1], growth_tol);
  rep.rhs_holds = finite_by_scaling(std::pow(rep.rhs_ap[0], 1.0 / rep.rhs_power),
                                    std::pow(rep.rhs_ap[1], 1.0 / rep.rhs_power), growth_tol);
  rep.agree = rep.lhs_holds == rep.rhs_holds;
  return rep;
}

double weighted_alpha(double r, double s, double p) {
  if (!(r < p && p < s)) throw Error("alpha needs r < p < s");
  const double b = std::isinf(s) ? 1.0 : (s - 1.0) / (s - p);
  return std::max(1.0 / (p - r), b);
}

WeightedBoundResult weighted_sparse_bound_check(const SparseCollection& S, const GridFunction& f,
                                                const GridFunction& g, const Weight& w, double r, double s,
                                                double p) {
  if (!(1.0 <= r && r < p && p < s)) throw Error("weighted bound needs 1 <= r < p < s");
  WeightedBoundResult out;
  out.alpha = weighted_alpha(r, s, p);
  out.ap = ap_characteristic(w, p / r);
  out.rh = rh_characteristic(w, std::isinf(s) ? 1.0 : s / (s - p));
  if (!std::isfinite(out.ap) || !std::isfinite(out.rh)) throw Error("infinite characteristic");
  out.lhs = sparse_form(S, f, g, r, dual(s)).value;
  out.rhs = std::pow(out.ap * out.rh, out.alpha) * weighted_norm(f, w, p) * weighted_norm(g, dual_weight(w, p), dual(p));
  out.ratio = out.rhs > 0.0 ? out.lhs / out.rhs : 0.0;
  return out;
}

CorollaryEndpoints corollary_endpoints(double m, double rho, int n) {
  const double c0 = n * (1.0 - rho);
  if (!(c0 > 0.0)) throw Error("endpoints need rho < 1");
  if (!(m < 0.0) || m < -c0) throw Error("endpoints need -n(1-rho) <= m < 0");
  CorollaryEndpoints out;
  if (m == -c0) {
    out.case_index = 1;
    out.r_e = 1.0;
  } else if (m <= -c0 / 2.0) {
    out.case_index = 2;
    out.r_e = -c0 / m;
  } else {
    out.case_index = 3;
    out.s_e = 2.0 * c0 / (c0 + 2.0 * m);
  }
  return out;
}

double fefferman_stein_check(const Symbol& a, const GridFunction& f, const Weight& w, double p,
                             const MaximalKind& control) {
  validate_weight(w);
  const GridFunction Tf = apply_T(a, f);
  const GridFunction Mw = maximal(w, control);
  const double lhs = std::pow(weighted_norm(Tf, w, p), p);
  const double rhs = std::pow(weighted_norm(f, Mw, p), p);
  if (rhs == 0.0) return lhs == 0.0 ? 0.0 : kInf;
  return lhs / rhs;
}

double coifman_fefferman_check(const Symbol& a, const GridFunction& f, const Weight& w, double p) {
  validate_weight(w);
  const GridFunction Tf = apply_T(a, f);
  const GridFunction Mf = maximal(f, MaximalKind::hl());
  const double den = weighted_norm(Mf, w, p);
  if (den == 0.0) return 0.0;
  return weighted_norm(Tf, w, p) / den;
}

Weight weight_from_preset(const std::string& spec, const Lattice& lattice) {
  const Preset p = parse_preset(spec);
  if (p.name == "const") {
    p.only({"c"});
    return constant_weight(lattice, p.get("c", 1.0));
  }
  if (p.name == "power") {
    p.only({"a"});
    return power_weight(lattice, p.require("a"));
  }
  if (p.name == "checkerboard") {
    p.only({"lambda"});
    return checkerboard_weight(lattice, p.require("lambda"));
  }
  if (p.name == "spike") {
    p.only({"width"});
    return spike_weight(lattice, p.require("width"));
  }
  throw ConfigError("unknown weight preset '" + p.name + "'");
}

}  // namespace sparsepdo
