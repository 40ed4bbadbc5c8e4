#pragma once

// Periodic grid functions on [0, L)^n, the discrete Fourier transform and
// Lebesgue-type quadratures.
//
// Transform normalization (used by every module):
//   fhat(xi_k) = dx^n * sum_i f(x_i) exp(-i xi_k . x_i),   xi_k = 2*pi*k / L
//   f(x_i)     = L^-n * sum_k fhat(xi_k) exp(i xi_k . x_i)
// so that L^-n * sum_k |fhat|^2 = dx^n * sum_i |f|^2 (Parseval). Factors of
// 2*pi are absorbed into the frequency measure 1/L^n.
//
// Samples sit at x_i = i*dx and cell i is [x_i - dx/2, x_i + dx/2), so Riemann
// sums are midpoint rules and a cube "contains" cell i iff it contains x_i.

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Core>

namespace sparsepdo {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when NaN/Inf shows up in a computed quantity.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class DyadicCube;

class Lattice {
 public:
  Lattice() = default;
  Lattice(int dim, double length, int samples);

  int dim() const { return dim_; }
  double length() const { return length_; }
  int samples() const { return samples_; }
  Index size() const;
  double spacing() const { return length_ / samples_; }
  double cell_measure() const;
  double measure() const;
  double frequency_spacing() const { return 2.0 * kPi / length_; }
  double nyquist() const { return kPi * samples_ / length_; }

  // Integer mode in (-N/2, N/2] for FFT index k in [0, N).
  int mode(int k) const { return k <= samples_ / 2 ? k : k - samples_; }
  double frequency(int k) const { return frequency_spacing() * mode(k); }
  double position(int i) const { return spacing() * i; }

  // Exponents when L and N are powers of two (required by dyadic code).
  bool dyadic_length() const;
  int length_log2() const;
  int cell_scale() const;  // log2(dx)

  bool operator==(const Lattice&) const = default;

 private:
  int dim_ = 1;
  double length_ = 1.0;
  int samples_ = 8;
};

class GridFunction {
 public:
  GridFunction() = default;
  explicit GridFunction(const Lattice& lattice);
  GridFunction(const Lattice& lattice, ComplexVector values);

  template <typename F>
  static GridFunction sample(const Lattice& lattice, F&& fn) {
    GridFunction g(lattice);
    const int n = lattice.samples();
    if constexpr (std::is_invocable_v<F, double>) {
      if (lattice.dim() != 1) throw Error("one-argument sampler on a 2-D lattice");
      for (int i = 0; i < n; ++i) g.values_[i] = fn(lattice.position(i));
    } else {
      if (lattice.dim() != 2) throw Error("two-argument sampler on a 1-D lattice");
      for (int i0 = 0; i0 < n; ++i0)
        for (int i1 = 0; i1 < n; ++i1)
          g.values_[Index(i0) * n + i1] = fn(lattice.position(i0), lattice.position(i1));
    }
    return g;
  }

  const Lattice& lattice() const { return lattice_; }
  const ComplexVector& values() const { return values_; }
  ComplexVector& values() { return values_; }
  Complex operator[](Index i) const { return values_[i]; }
  Complex& operator[](Index i) { return values_[i]; }
  Index size() const { return values_.size(); }

  bool all_finite() const;

 private:
  Lattice lattice_;
  ComplexVector values_;
};

// Smooth radial cutoff psi: 1 on [0,1], 0 on [2,inf), built from
// h(t) = exp(-1/t) as h(2-t) / (h(2-t) + h(t-1)); and psi(t) - psi(2t).
double smooth_cutoff(double t);
double smooth_annulus(double t);

GridFunction dft(const GridFunction& f);
GridFunction inverse_dft(const GridFunction& fhat);

// Plain 1-D transforms of raw sample vectors using the same normalization.
ComplexVector dft(const ComplexVector& values, double dx);
ComplexVector inverse_dft(const ComplexVector& values, double length);

// Norm of dft(f) measured by lp_norm(., 2) divided by ||f||_2.
double parseval_constant(const Lattice& lattice);

double lp_norm(const GridFunction& f, double p);
double lp_norm(const ComplexVector& values, double cell_measure, double p);

// <f>_{p,Q} = (|Q|^-1 int_Q |f|^p)^(1/p); p = inf gives the max over Q.
double local_average(const GridFunction& f, const DyadicCube& cube, double p);

// <u, v> = sum u * conj(v) dx^n
Complex inner_product(const GridFunction& u, const GridFunction& v);

struct BernsteinReport {
  double worst_ratio = 0.0;
  GridFunction argmax;
};

// Max over trial functions with frequency support in {|xi| <= 2^j} of
// ||f||_s / (2^{jn(1/r-1/s)} ||f||_r). Trial 0 is a smooth band-limited bump,
// trial 1 the Dirichlet kernel; the rest have random coefficients.
BernsteinReport bernstein_check(const Lattice& lattice, int j, double r, double s, int trials,
                                std::mt19937_64& rng);

// Text: "n L N" header then one "re im" pair per line.
void write_text(std::ostream& os, const GridFunction& f);
GridFunction read_text(std::istream& is);
// Binary: the same ASCII header line, then little-endian float64 (re, im) pairs.
void write_binary(std::ostream& os, const GridFunction& f);
GridFunction read_binary(std::istream& is);

// Bump-modulated Gaussian A exp(-(x-c)^2/(2 sigma^2)) exp(i omega x), zeroed
// where the Gaussian falls below 1e-12. Parameters are physical, so the same
// draw can be sampled on any lattice.
struct Bump {
  double center = 0.0;
  double width = 1.0;
  double omega = 0.0;
  Complex amplitude{1.0, 0.0};

  Complex operator()(double x) const;
  double support_radius() const;
  GridFunction on(const Lattice& lattice) const;
};

Bump random_bump(std::mt19937_64& rng, double length, double min_width, double max_width,
                 double max_omega);

}  // namespace sparsepdo
