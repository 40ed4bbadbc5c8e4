#pragma once

// Muckenhoupt and reverse-Hoelder characteristics on the lattice, weighted
// norms, and the weighted consequences of sparse bounds. Suprema run over all
// dyadic cubes of the three shifted grids in place of all balls.

#include <functional>
#include <map>
#include <optional>
#include <string>

#include "sparsepdo/dyadic.hpp"
#include "sparsepdo/func.hpp"
#include "sparsepdo/maximal.hpp"
#include "sparsepdo/symbol.hpp"

namespace sparsepdo {

using Weight = GridFunction;

// Throws unless w is real, nonnegative and not identically zero.
void validate_weight(const Weight& w);

// |x - c|^a with c = L/2 + dx/2 (never a sample point), minimal image.
Weight power_weight(const Lattice& lattice, double a);
// lambda on even cells, 1 on odd cells.
Weight checkerboard_weight(const Lattice& lattice, double lambda);
// 1/width on [L/2 - width/2, L/2 + width/2), zero elsewhere.
Weight spike_weight(const Lattice& lattice, double width);
Weight constant_weight(const Lattice& lattice, double c = 1.0);

struct WeightCharacteristics {
  double p = 2.0;
  double ap = 1.0;
  std::map<double, double> rh;
};

// sup_Q <w>_Q <w^(1-p')>_Q^(p-1); p = 1 gives max Mw / w. Returns +inf when
// a cube meets a zero of w (the <w^(1-p')> = inf convention).
double ap_characteristic(const Weight& w, double p);
// sup_Q <w>_{q,Q} / <w>_Q; exactly 1 for q = 1.
double rh_characteristic(const Weight& w, double q);

WeightCharacteristics characteristics(const Weight& w, double p, const std::vector<double>& rh_exponents);

// (int |f|^p w)^(1/p).
double weighted_norm(const GridFunction& f, const Weight& w, double p);
// w^(1-p').
Weight dual_weight(const Weight& w, double p);

// A value counts as finite when it grows by less than growth_tol (relative)
// between a lattice and its refinement.
bool finite_by_scaling(double coarse, double fine, double growth_tol = 0.1);

struct EquivalenceReport {
  double p = 0.0, r = 0.0, s = 0.0;
  // Exponents of the two sides.
  double lhs_ap_exponent = 0.0;   // p/r
  double lhs_rh_exponent = 0.0;   // (s/p)'
  double rhs_power = 0.0;         // (s/p)'
  double rhs_ap_exponent = 0.0;   // (s/p)'(p/r - 1) + 1
  // Characteristics on the coarse and refined lattices.
  std::array<double, 2> lhs_ap{}, lhs_rh{}, rhs_ap{};
  bool lhs_holds = false;
  bool rhs_holds = false;
  bool agree = false;
};

// w in A_{p/r} cap RH_{(s/p)'}  <=>  w^{(s/p)'} in A_{(s/p)'(p/r-1)+1}, each
// side judged by finite_by_scaling between lattice and its refinement: the
// left through [w]_A [w]_RH, the right through [w^q]_A^(1/q), q = (s/p)'.
EquivalenceReport ap_rh_equivalence_check(const std::function<Weight(const Lattice&)>& make_weight,
                                          const Lattice& lattice, double p, double r, double s,
                                          double growth_tol = 0.05);

struct WeightedBoundResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  double alpha = 0.0;
  double ap = 0.0;
  double rh = 0.0;
};

// alpha = max(1/(p-r), (s-1)/(s-p)).
double weighted_alpha(double r, double s, double p);

// Lambda_{S,r,s'}(f, g) against ([w]_{A_{p/r}} [w]_{RH_{(s/p)'}})^alpha
// ||f||_{L^p(w)} ||g||_{L^{p'}(w^{1-p'})}.
WeightedBoundResult weighted_sparse_bound_check(const SparseCollection& S, const GridFunction& f,
                                                const GridFunction& g, const Weight& w, double r, double s,
                                                double p);

struct CorollaryEndpoints {
  int case_index = 0;  // 1: m = -n(1-rho); 2: r_e branch; 3: s_e branch
  std::optional<double> r_e;
  std::optional<double> s_e;
};

CorollaryEndpoints corollary_endpoints(double m, double rho, int n = 1);

// int |T f|^p w  /  int |f|^p (M w), with the controlling maximal operator given.
double fefferman_stein_check(const Symbol& a, const GridFunction& f, const Weight& w, double p,
                             const MaximalKind& control);
// ||T f||_{L^p(w)} / ||M f||_{L^p(w)}.
double coifman_fefferman_check(const Symbol& a, const GridFunction& f, const Weight& w, double p);

// Weight presets: "const", "power:a=..", "checkerboard:lambda=..", "spike:width=..".
Weight weight_from_preset(const std::string& spec, const Lattice& lattice);

}  // namespace sparsepdo
