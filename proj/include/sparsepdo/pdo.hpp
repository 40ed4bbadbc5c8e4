#pragma once

// Discretized operators T_a on a 1-D periodic lattice, Littlewood-Paley
// frequency pieces T_a^j, spatial pieces T_a^{j,l}, and L^r -> L^s norms.
//
// Matrices act on sample vectors: (T f)(x_i) = sum_i' A(i, i') f(x_i') with
//   A(i, i') = dx * K_i(x_i - x_i'),   K_i = inverse_dft(a(x_i, .) * cutoff).
// x-independent symbols give circulant matrices stored by their first column.

#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "sparsepdo/func.hpp"
#include "sparsepdo/symbol.hpp"

namespace sparsepdo {

struct DecompParams {
  double epsilon = 0.1;
  int j_max = 0;
  // Optional restriction of the spatial index l; defaults to all representable scales.
  std::optional<std::pair<int, int>> l_range;
};

class OperatorMatrix {
 public:
  enum class Kind { Dense, Circulant };

  OperatorMatrix() = default;
  static OperatorMatrix dense(const Lattice& lattice, Eigen::MatrixXcd m, std::string tag);
  static OperatorMatrix circulant(const Lattice& lattice, ComplexVector column, std::string tag);

  Kind kind() const { return kind_; }
  const Lattice& lattice() const { return lattice_; }
  const std::string& tag() const { return tag_; }
  Index rows() const { return Index(lattice_.samples()); }
  const Eigen::MatrixXcd& dense_matrix() const { return dense_; }
  const ComplexVector& column() const { return column_; }

  Complex entry(Index i, Index k) const;
  Eigen::MatrixXcd to_dense() const;
  ComplexVector apply(const ComplexVector& f) const;
  ComplexVector apply_adjoint(const ComplexVector& g) const;
  GridFunction apply(const GridFunction& f) const;

  // Entry-wise product with a convolution window w(x_i - x_i') (minimal image).
  OperatorMatrix windowed(const std::function<double(double)>& window, std::string tag) const;

 private:
  Kind kind_ = Kind::Circulant;
  Lattice lattice_;
  Eigen::MatrixXcd dense_;
  ComplexVector column_;
  std::string tag_;
};

// psi(|xi|) for j = 0, psi~(2^-j |xi|) for j > 0.
double band_cutoff(int j, double xi);

GridFunction apply_T(const Symbol& a, const GridFunction& f);
// Whole operator as a matrix (no frequency cutoff).
OperatorMatrix operator_matrix(const Symbol& a, const Lattice& lattice);

// T_a^j. Requires 2^(j+1) below the lattice Nyquist frequency.
OperatorMatrix frequency_piece(const Symbol& a, int j, const Lattice& lattice);

// Representable spatial indices: 2 dx <= 2^(l - j rho) <= L/2.
std::pair<int, int> spatial_range(const Symbol& a, int j, const Lattice& lattice);
double spatial_window(const Symbol& a, int j, int l, int l_min, double z);

// T_a^{j,l}; the piece l = l_min also carries the core psi(2^(-l_min + j rho) z).
OperatorMatrix spatial_piece(const Symbol& a, int j, int l, const Lattice& lattice);
// sum over representable l <= l_upper, i.e. the window psi(2^(-l_upper + j rho) z).
OperatorMatrix spatial_sum(const Symbol& a, int j, int l_upper, const Lattice& lattice);
// 2->2 norm of T_a^j minus the sum of all representable spatial pieces.
double spatial_tail_norm(const Symbol& a, int j, const Lattice& lattice);
// Sum over l <= j*epsilon (the "local" part in the decomposition).
OperatorMatrix local_part(const Symbol& a, int j, double epsilon, const Lattice& lattice);

// sup_x sum_z |K_j(x, z)| dz.
double kernel_l1(const Symbol& a, int j, const Lattice& lattice);

enum class BoundKind { Exact, Lower, Estimate };
std::string to_string(BoundKind k);

struct NormResult {
  double estimate = 0.0;
  double lower = 0.0;
  BoundKind kind = BoundKind::Exact;
};

struct OpnormOptions {
  int restarts = 8;
  int max_iterations = 300;
  double tolerance = 1e-12;
  std::uint64_t seed = 0x5eed;
};

// ||A||_{L^r -> L^s} with the lattice quadrature weights; exact for
// (2,2), (1,s) and (r,inf) (which include (1,1), (1,inf), (inf,inf)),
// otherwise nonlinear power iteration from several starts.
NormResult opnorm(const OperatorMatrix& A, double r, double s, const OpnormOptions& options = {});

// Iterate of the power method for a single start; exposed for tests.
double power_iteration_ratio(const OperatorMatrix& A, double r, double s, ComplexVector start,
                             const OpnormOptions& options, ComplexVector* maximizer = nullptr);

struct DecayFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // root mean square of the log2 residuals
};

DecayFit decay_fit(const std::vector<int>& js, const std::vector<double>& norms);

// Largest j whose frequency piece fits below the Nyquist frequency.
int max_frequency_index(const Lattice& lattice);

}  // namespace sparsepdo
