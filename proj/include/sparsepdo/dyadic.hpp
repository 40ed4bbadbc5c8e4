#pragma once

// Shifted dyadic grids D_v, v in {0,1,2}^n, n in {1,2}.
//
// A cube of scale k (sidelength 2^k) and index m in grid v is
//   prod_i 2^k [m_i + s_k v_i/3, m_i + 1 + s_k v_i/3),   s_k = (-1)^k.
// The alternating sign s_k makes every D_v a nested dyadic system: the children
// of (k, m) are (k-1, 2m + s_k v + b), b in {0,1}^n. Endpoints are stored
// exactly as num * 2^k / 3 with integer num.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sparsepdo/func.hpp"

namespace sparsepdo {

// Exact value num * 2^exp / 3.
struct ThirdDyadic {
  std::int64_t num = 0;
  int exp = 0;

  long double value() const;
};

int compare(const ThirdDyadic& a, const ThirdDyadic& b);
// Exact comparison of a against a double.
int compare(const ThirdDyadic& a, double x);

struct GridShift {
  int dim = 1;
  std::array<int, 2> v{0, 0};

  GridShift() = default;
  GridShift(int dim, std::array<int, 2> v);
  static GridShift zero(int dim) { return GridShift(dim, {0, 0}); }
  static std::vector<GridShift> all(int dim);

  auto operator<=>(const GridShift&) const = default;
};

class DyadicCube {
 public:
  DyadicCube() = default;
  DyadicCube(GridShift shift, int scale, std::array<std::int64_t, 2> index);

  const GridShift& shift() const { return shift_; }
  int dim() const { return shift_.dim; }
  int scale() const { return scale_; }
  const std::array<std::int64_t, 2>& index() const { return index_; }

  double sidelength() const;
  double measure() const;
  ThirdDyadic left(int axis) const;
  ThirdDyadic right(int axis) const;
  double center(int axis) const;

  bool contains_point(std::array<double, 2> x) const;

  // Geometric containment / intersection on R^n (exact).
  bool contains(const DyadicCube& other) const;
  bool intersects(const DyadicCube& other) const;

  DyadicCube parent() const;

  // Representative with the left endpoint in [0, period) on each axis.
  DyadicCube canonical(int period_log2) const;

  auto operator<=>(const DyadicCube&) const = default;

 private:
  GridShift shift_;
  int scale_ = 0;
  std::array<std::int64_t, 2> index_{0, 0};
};

std::vector<DyadicCube> children(const DyadicCube& q);

// Cube [0, 2^p)^n of the unshifted grid.
DyadicCube root_cube(int dim, int period_log2);

// Smallest cube over all 3^n shifts containing the closed ball B(center, radius).
// The one-third lemma guarantees sidelength(Q) <= 6 * diam(B) = 12 * radius;
// if a domain of length 2^p is given and the ball covers it, the root is returned.
inline constexpr double kOneThirdCoverConstant = 12.0;
DyadicCube one_third_trick_cover(std::array<double, 2> center, double radius, int dim,
                                 std::optional<int> domain_log2 = std::nullopt);

// Periodic containment on the torus [0, 2^p)^n.
bool contains_periodic(const DyadicCube& outer, const DyadicCube& inner, int period_log2);

class CubeFamily {
 public:
  CubeFamily() = default;
  explicit CubeFamily(std::vector<DyadicCube> cubes, std::optional<int> period_log2 = std::nullopt);

  const std::vector<DyadicCube>& cubes() const { return cubes_; }
  std::optional<int> period_log2() const { return period_log2_; }
  bool empty() const { return cubes_.empty(); }
  std::size_t size() const { return cubes_.size(); }
  bool contains(const DyadicCube& q) const;

  // Inserts if absent; throws if the shift differs from the family's.
  void insert(const DyadicCube& q);

  bool nested_in(const DyadicCube& outer, const DyadicCube& inner) const;

 private:
  std::vector<DyadicCube> cubes_;  // sorted, unique
  std::optional<int> period_log2_;
};

// All cubes of one scale tiling the torus of the lattice.
CubeFamily tiling(const Lattice& lattice, const GridShift& shift, int scale);

// Lattice samples of a cube (periodic wrap), flattened indices in ascending order.
std::vector<Index> cube_cells(const DyadicCube& q, const Lattice& lattice);
// Start sample of the cube along one axis (unwrapped) and the count per axis.
std::int64_t cube_first_sample(const DyadicCube& q, int axis, const Lattice& lattice);
std::int64_t cube_samples_per_axis(const DyadicCube& q, const Lattice& lattice);

// sup_{Q in F} sum_{Q' in F, Q' subset Q} |Q'| / |Q|
double carleson_constant(const CubeFamily& family);

struct SparseCollection {
  CubeFamily family;
  double eta = 0.0;
  // witness[i] are the cells E_Q of family.cubes()[i].
  std::optional<std::vector<std::vector<Index>>> witness;
};

struct SparseCertificate {
  bool success = false;
  SparseCollection collection;
  // On failure: the cube whose demand could not be met, followed by the family
  // members it contains.
  std::vector<DyadicCube> violating_chain;
};

// Cell-measure witnesses with |E_Q| > eta |Q|. Assignment runs smallest cubes
// first (ties: lexicographic); each cube takes the minimal number of free cells,
// then leftover cells go to the smallest member containing them. For families
// from one grid (laminar) this finds a witness whenever one exists.
SparseCertificate certify_sparse(const CubeFamily& family, double eta, const Lattice& lattice);

// Checks witness disjointness, containment and the density bound.
bool verify_witness(const SparseCollection& s, const Lattice& lattice);

// Density certifiable from a Carleson bound Lambda when every cube holds at
// least min_cells lattice cells: eta = 1/Lambda - 1/min_cells (each cube may
// need one cell beyond eta|Q|). Returns 0 when that is not positive.
double sparse_eta_from_carleson(double lambda, std::int64_t min_cells);

// Serialization: one cube per line, "shift k m1 [m2]" where shift is the digit
// string of v (e.g. "1" or "12").
void write_family(std::ostream& os, const CubeFamily& family);
CubeFamily read_family(std::istream& is, std::optional<int> period_log2 = std::nullopt);
// Certificates: "shift k m1 [m2] -> a-b,c-d" with inclusive cell ranges.
void write_certificate(std::ostream& os, const SparseCollection& s);

std::string to_string(const DyadicCube& q);

}  // namespace sparsepdo
