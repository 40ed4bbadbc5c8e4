#pragma once

// Dyadic maximal operators over all three shifted grids, the grand maximal
// function of an operator, and pointwise sparse domination by a stopping-time
// construction. One-dimensional lattices only.

#include <optional>
#include <random>
#include <vector>

#include "sparsepdo/dyadic.hpp"
#include "sparsepdo/func.hpp"
#include "sparsepdo/pdo.hpp"
#include "sparsepdo/symbol.hpp"

namespace sparsepdo {

// A cube together with its cells first, first+1, ..., first+count-1 (mod N).
struct CubeRange {
  DyadicCube cube;
  Index first = 0;
  Index count = 0;
};

CubeRange cube_range(const DyadicCube& q, const Lattice& lattice);
// Every cube of every shift from one cell up to the root, optionally only
// those with sidelength strictly above min_side.
std::vector<CubeRange> scan_cubes(const Lattice& lattice, double min_side = 0.0);
// Cube and all its descendants down to single cells, in the cube's grid.
std::vector<CubeRange> descendants(const DyadicCube& q, const Lattice& lattice);

// Prefix sums of |f|^p for O(1) averages over wrapped cell ranges.
class PowerSums {
 public:
  PowerSums(const GridFunction& f, double p);
  // <f>_{p} over cells [first, first + count) mod N; p = inf gives the max.
  double average(Index first, Index count) const;

 private:
  double p_;
  std::vector<double> prefix_;
  std::vector<double> values_;
};

struct MaximalKind {
  enum class Tag { HL, Lp, PowerGamma, Iterated, Grand };
  Tag tag = Tag::HL;
  double param = 1.0;  // p for Lp, gamma for PowerGamma, k for Iterated
  const OperatorMatrix* op = nullptr;

  static MaximalKind hl() { return {}; }
  static MaximalKind lp(double p) { return {Tag::Lp, p, nullptr}; }
  static MaximalKind power_gamma(double gamma) { return {Tag::PowerGamma, gamma, nullptr}; }
  static MaximalKind iterated(int k) { return {Tag::Iterated, double(k), nullptr}; }
  static MaximalKind grand(const OperatorMatrix& op) { return {Tag::Grand, 1.0, &op}; }
};

// Real nonnegative output.
GridFunction maximal(const GridFunction& f, const MaximalKind& kind);

struct GrandOptions {
  // Only cubes with sidelength above this contribute.
  double min_side = 0.0;
};

// sup_{Q containing x} max_{z in Q} |T(f 1_{outside 3Q})(z)|, with 3Q the
// concentric tripled cube clipped to the torus.
GridFunction grand_maximal(const OperatorMatrix& T, const GridFunction& f, const GrandOptions& options = {});

// sup_lambda lambda |{|g| > lambda}|^(1/r) / norm.
double weak_type_ratio(const GridFunction& g, double norm, double r);

struct PointwiseOptions {
  double kappa = 4.0;  // initial stopping threshold; doubled per cube as needed
  int max_depth = 48;
};

struct PointwiseResult {
  SparseCollection collection;
  double ratio = 0.0;       // max_x |T f(x)| / A_{r,S} f(x)
  double max_kappa = 0.0;   // largest threshold any cube needed
  int depth = 0;
  bool partial = false;     // depth cap reached
  GridFunction Tf;
  GridFunction Af;          // sum_Q <f>_{r,3Q} 1_Q
};

// Stopping-time construction: inside each selected Q the exceptional set of
// the localized grand maximal function and of the local M_r is covered by
// maximal subcubes P with |P cap E| > |P|/8; the threshold doubles until those
// subcubes fill less than half of Q.
PointwiseResult pointwise_dominate(const Symbol& a, const GridFunction& f, double r,
                                   const PointwiseOptions& options = {});

struct GrandWeakReport {
  double weak_constant = 0.0;      // max over trials of the weak-(r,r) ratio of M_T
  double majorant_constant = 0.0;  // max_x M_T f / (Mf + M_p f + M_s(Tf) + ||T||_s M_s f)
  double large_cube_constant = 0.0;  // cubes above the large-cube side, against Mf alone
  std::vector<double> majorant_per_trial;
  double p = 0.0;
  double s = 2.0;
};

struct GrandWeakOptions {
  int trials = 20;
  // Default p = 1 + (1 - rho)/4.
  std::optional<double> p;
  double s = 2.0;
  // Default L/16.
  std::optional<double> large_side;
};

GrandWeakReport grand_maximal_weak_type(const Symbol& a, const Lattice& lattice, double r, std::mt19937_64& rng,
                                        const GrandWeakOptions& options = {});

// Random test input: a few modulated bumps, one of them narrow.
GridFunction random_test_function(const Lattice& lattice, std::mt19937_64& rng);

}  // namespace sparsepdo
