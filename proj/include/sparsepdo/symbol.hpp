#pragma once

// Symbols a(x, xi) of class S^m_{rho,delta} in one space dimension, model
// symbols, and a finite-difference check of the class inequalities
//   |d_x^nu d_xi^sigma a(x, xi)| <= C (1+|xi|)^(m - rho sigma + delta nu).

#include <functional>
#include <string>
#include <vector>

#include "sparsepdo/func.hpp"

namespace sparsepdo {

struct ClassParams {
  double m = 0.0;
  double rho = 1.0;
  double delta = 0.0;
};

struct Symbol {
  ClassParams params;
  std::function<Complex(double x, double xi)> eval;
  std::string label;
  bool x_independent = true;
  // Period in x for x-dependent symbols (0 when x-independent).
  double x_period = 0.0;

  Complex operator()(double x, double xi) const { return eval(x, xi); }
};

// Smooth step: 0 for t <= 1, 1 for t >= 1 + width; a sharp indicator of t >= 1 when width = 0.
double support_ramp(double t, double width);

// e^{i|xi|^(1-rho)} (1+|xi|)^m on {|xi|^(1-rho) >= 1}; params (m, rho, 0).
Symbol model_oscillatory(double m, double rho, double support_width = 0.0);
// (1+|xi|^2)^(m/2); params (m, 1, 0).
Symbol model_bessel(double m);
// (2 + sin(2 pi x/period)) * model_oscillatory(m, rho); params (m, rho, 0).
Symbol model_x_dependent(double m, double rho, double period, double support_width = 0.0);
Symbol constant_symbol(Complex c, ClassParams params = {0.0, 1.0, 0.0});
// Same evaluator, different declared class.
Symbol relabel(const Symbol& a, ClassParams params);

// Central-difference approximation of d_x^nu d_xi^sigma a at (x, xi) with steps hx, hxi.
Complex finite_difference(const Symbol& a, double x, double xi, int nu, int sigma, double hx, double hxi);

struct SeminormOptions {
  int points_per_octave = 12;
  int x_samples = 5;
  // Steps are scale * eps^(1/(order+2)), the roundoff/truncation balance point.
  double x_scale = 1.0;
  // Slope of log2(band constant) per band above which growth is flagged.
  double slope_tolerance = 0.1;
  // Frequency weight: (1+|xi|) by default, |xi| for multiplier-type checks.
  bool homogeneous_weight = false;
  // xi-step scale at frequency xi; default (1+|xi|)^rho.
  std::function<double(double)> xi_scale;
};

struct SeminormEntry {
  int nu = 0;
  int sigma = 0;
  double constant = 0.0;              // sup over the sample set
  std::vector<double> band_constants; // one per dyadic band of |xi|
  double slope = 0.0;                 // least-squares slope of log2 band constants
  bool uniform = true;
};

struct SeminormReport {
  std::vector<SeminormEntry> entries;
  bool pass = true;
};

// Sweeps all (nu, sigma) with nu + sigma <= max_order (nu = 0 only for
// x-independent symbols) over |xi| in [xi_min, xi_max] (both signs).
SeminormReport seminorm_check(const Symbol& a, int max_order, double xi_min, double xi_max,
                              const SeminormOptions& options = {});

}  // namespace sparsepdo
