#pragma once

// Exponent regions, bilinear sparse forms, sparse operators, the checkerboard
// construction of sparse collections from geometrically decaying scale
// families, and the domination / sharpness experiments.
//
// Exponent points are stored as (r, s') and drawn in the plane as
// (x, y) = (1/r, 1/s'). The sparse bound region is the union of
//   A: 1 <= r <= s <= 2            with m < -n(1-rho)(1/r - 1/2)
//   B: 1 <= r <= 2 <= s <= r'      with m < -n(1-rho)(1/r - 1/s)
// and their mirror images under (x, y) -> (y, x).

#include <array>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sparsepdo/dyadic.hpp"
#include "sparsepdo/func.hpp"
#include "sparsepdo/pdo.hpp"
#include "sparsepdo/symbol.hpp"

namespace sparsepdo {

struct ExponentPair {
  double r = 2.0;
  double s_prime = 2.0;

  static ExponentPair from_point(double x, double y) { return {1.0 / x, 1.0 / y}; }
  double x() const { return 1.0 / r; }
  double y() const { return 1.0 / s_prime; }
  // Dual exponent of s'.
  double s() const;
};

struct Region {
  double m = 0.0;
  double rho = 0.0;
  int n = 1;
  int vertex_case = 1;  // 1 when m <= -n(1-rho)/2
  std::array<std::array<double, 2>, 4> vertices{};
  // -m / (n (1 - rho)), the extent of the region past the centre line.
  double c() const;
};

// m < 0 and rho < 1 (negative rho is allowed for the multiplier translation).
Region region_vertices(double m, double rho, int n);

// Signed distance (in the (x, y) plane) to the strict constraint of the best
// admissible system containing pt; nullopt when pt lies in none of them.
std::optional<double> region_slack(const ExponentPair& pt, const Region& R);
// Strictly inside with slack >= margin (margin = 0 means plain strict inequality).
bool in_region(const ExponentPair& pt, const Region& R, double margin = 0.02);
// Inside the closed region.
bool in_closed_region(const ExponentPair& pt, const Region& R);

// Random sparse family on the unshifted grid: draws cubes with scales in
// [k_lo, k_hi] and keeps each one that leaves the family certifiable at eta.
CubeFamily random_sparse_family(const Lattice& lattice, std::mt19937_64& rng, int k_lo, int k_hi,
                                int max_cubes = 12, double eta = 0.5, int attempts = 40);

struct SparseTerm {
  DyadicCube cube;
  double measure = 0.0;
  double avg_f = 0.0;
  double avg_g = 0.0;
  double value = 0.0;
};

struct SparseFormResult {
  double value = 0.0;
  SparseCollection collection;
  std::vector<SparseTerm> terms;
};

// sum_Q |Q| <f>_{r,Q} <g>_{s',Q}
SparseFormResult sparse_form(const SparseCollection& S, const GridFunction& f, const GridFunction& g, double r,
                             double s_prime);
// sum_Q <f>_{r,Q} chi_Q
GridFunction sparse_operator(const SparseCollection& S, const GridFunction& f, double r);

// One scale level of a decaying decomposition: a tiling family with weight.
// Main levels come from l <= j*eps pieces; tail levels carry the l index.
struct ScaleLevel {
  int j = 0;
  std::optional<int> l;
  CubeFamily family;
  double weight = 0.0;
};

struct SparseFromDecayingOptions {
  // Accept non-decaying weights (used for exterior points in sharpness studies).
  bool allow_nondecaying = false;
};

struct DecayingSparseResult {
  SparseCollection collection;
  // sum_levels W * sum_{Q in level} |Q| <f><g>  <=  C * Lambda_S(f, g)
  double certificate_constant = 0.0;
  double weighted_sum = 0.0;
  double form_value = 0.0;
  double carleson = 0.0;
  // Residue classes needed so that the per-class decay beats 4^n.
  int residue_classes = 1;
  std::vector<int> level_scales;  // coarse to fine after merging
};

// Merges levels of equal scale (weights add), orders them coarse to fine and,
// for level i, keeps inside every ancestor at scale min(k_i + i, root) the
// single cube maximizing <f>_r <g>_{s'} (ties: lowest index).
DecayingSparseResult sparse_from_decaying(const std::vector<ScaleLevel>& levels, const GridFunction& f,
                                          const GridFunction& g, double r, double s_prime,
                                          const SparseFromDecayingOptions& options = {});

// Weight exponent e with ||sum_{l<=j eps} T^{j,l}||_{r->s} |Q_j|^{1/r-1/s} <~ 2^{j e}.
double level_exponent(const ClassParams& p, const ExponentPair& pt, double epsilon, int n = 1);

struct DominateOptions {
  DecompParams decomposition;  // j_max <= 0 means: largest j allowed by Nyquist
  int scale_offset = 0;
  int min_cells = 8;
  bool include_tails = true;
};

struct DominateResult {
  double pairing = 0.0;
  double sparse_value = 0.0;
  double ratio = 0.0;
  DecayingSparseResult construction;
  std::string warning;
};

// |<T_a f, g>| against the sparse form of the constructed collection.
DominateResult dominate(const Symbol& a, const GridFunction& f, const GridFunction& g, const ExponentPair& pt,
                        const DominateOptions& options = {});

struct SharpnessRow {
  int j = 0;
  int l = 0;
  double pairing = 0.0;
  double form = 0.0;
  double ratio = 0.0;
};

struct SharpnessOptions {
  double length = 64.0;
  int samples = 1 << 14;
  double epsilon = 0.1;
  int l_window = 2;
  int refine_iterations = 6;
};

// Best single-cube form |Q| <f>_r <g>_{s'} over all cubes (every shift and
// scale) containing both supports.
double best_single_cube_form(const GridFunction& f, const GridFunction& g, double r, double s_prime);

std::vector<SharpnessRow> sharpness_probe(double m, double rho, int n, const ExponentPair& pt,
                                          const std::vector<int>& j_list, const SharpnessOptions& options = {});

}  // namespace sparsepdo
