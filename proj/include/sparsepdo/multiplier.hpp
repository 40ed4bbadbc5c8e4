#pragma once

// Oscillatory Fourier multipliers |xi|^-beta e^{i|xi|^alpha}: symbol-type
// condition checks, the kernel-to-multiplier exponent transfer, and the
// dispersive propagator e^{it(-Laplacian)^(alpha/2)} with rescaled sparse forms.

#include <string>
#include <vector>

#include "sparsepdo/dyadic.hpp"
#include "sparsepdo/func.hpp"
#include "sparsepdo/sparse.hpp"
#include "sparsepdo/symbol.hpp"

namespace sparsepdo {

// Declared class of m_{alpha,beta}: order -beta, rho = 1 - alpha.
ClassParams multiplier_class(double alpha, double beta);

// |xi|^-beta e^{i|xi|^alpha} on {|xi|^alpha >= 1}; for alpha < 0 that is
// {0 < |xi| <= 1}. The value at xi = 0 is 0.
Symbol model_multiplier(double alpha, double beta);

// Region obtained by reading |beta| as -m and |alpha| as 1 - rho.
Region multiplier_region(double alpha, double beta, int n = 1);

// Default sweep ranges: [2, 2^10] for alpha > 0, [2^-8, 2^-1/4] for alpha < 0.
std::pair<double, double> multiplier_frequency_range(double alpha);

// |D^gamma m(xi)| <= C |xi|^(-beta + gamma (alpha - 1)), gamma <= max_order.
SeminormReport miyachi_check(const Symbol& m, double alpha, double beta, int max_order,
                             const SeminormOptions& options = {});

struct SubdyadicEntry {
  int order = 0;
  double constant = 0.0;
  std::vector<double> band_constants;
  double slope = 0.0;
  bool uniform = true;
};

struct SubdyadicReport {
  std::vector<SubdyadicEntry> entries;
  bool pass = true;
  int balls = 0;
};

struct SubdyadicOptions {
  int samples_per_ball = 16;
  int max_balls_per_band = 256;
  double slope_tolerance = 0.1;
};

// sup_B dist(B,0)^(beta + (1-alpha) gamma) (|B|^-1 int_B |D^gamma m|^2)^(1/2)
// over balls of radius dist^(1-alpha) (capped at dist/2) tiling each dyadic
// annulus of the sweep range, both signs of xi.
SubdyadicReport subdyadic_check(const Symbol& m, double alpha, double beta, int max_order,
                                const SubdyadicOptions& options = {});

struct KernelTransfer {
  double alpha = 0.0;
  double beta = 0.0;
  bool admissible = false;  // alpha * beta > 0
  std::string diagnostic;
};

// e^{i|x|^a} (1+|x|)^-b  ->  alpha = a/(a-1), beta = (na/2 - n + b)/(a-1).
KernelTransfer oscillatory_kernel_transfer(double a, double b, int n = 1);

struct EnvelopeOptions {
  double length = 512.0;
  int samples = 1 << 17;
  int band_lo = 3;  // |xi| in [2^band_lo, 2^band_hi]
  int band_hi = 7;
  double slope_tolerance = 0.15;
};

struct EnvelopeReport {
  double alpha = 0.0;
  double beta = 0.0;
  double constant = 0.0;               // max |K^inf^(xi)| |xi|^beta over the band
  std::vector<double> band_constants;  // per octave
  double slope = 0.0;
  bool pass = false;
};

// Transforms K^inf = (1 - psi(|x|)) K_{a,b}, tapered by psi(4|x|/L) against the
// periodic boundary, and checks |K^inf^| <~ |xi|^-beta across the band.
EnvelopeReport kernel_envelope_check(double a, double b, const EnvelopeOptions& options = {});

// 2->2 norms of the pieces m(xi) psi~(2^-j xi) for j < 0 (exact, max over lattice frequencies).
std::vector<double> low_frequency_piece_norms(const Symbol& m, const std::vector<int>& js, const Lattice& lattice);

// u(., t) = inverse_dft(e^{it|xi|^alpha} fhat).
GridFunction propagate(double alpha, double t, const GridFunction& f);
// inverse_dft((1 + t^(2/alpha) |xi|^2)^(beta/2) fhat).
GridFunction sobolev_smooth(double alpha, double t, double beta, const GridFunction& f);

struct PropagatorOptions {
  int min_cells = 8;
  double epsilon = 0.1;
  int j_max = 0;  // <= 0: largest j below Nyquist at t = 1 units
};

struct PropagatorReport {
  double pairing = 0.0;  // |<u(t), g>|
  double form = 0.0;     // rescaled sparse form with the smoothed f
  double ratio = 0.0;
  int scale_shift = 0;   // log2 t^(1/alpha)
  double mass_error = 0.0;
  SparseCollection collection;
};

// Requires t^(1/alpha) to be a power of two so rescaled cubes stay dyadic.
PropagatorReport propagator_sparse_report(int alpha, double t, double beta, const GridFunction& f,
                                          const GridFunction& g, const ExponentPair& pt,
                                          const PropagatorOptions& options = {});

}  // namespace sparsepdo
