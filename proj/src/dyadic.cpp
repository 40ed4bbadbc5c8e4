#include "sparsepdo/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace sparsepdo {

namespace {

using Int128 = __int128;

int sign_of_scale(int k) { return (k % 2 == 0) ? 1 : -1; }

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

Int128 ceil_div(Int128 a, Int128 b) {
  // b > 0
  Int128 q = a / b;
  if (a % b != 0 && a > 0) ++q;
  return q;
}

Int128 shifted(std::int64_t num, int shift) {
  if (shift < 0 || shift > 62) throw Error("dyadic scale difference out of range");
  return Int128(num) << shift;
}

}  // namespace

long double ThirdDyadic::value() const { return std::ldexp(static_cast<long double>(num), exp) / 3.0L; }

int compare(const ThirdDyadic& a, const ThirdDyadic& b) {
  const int e = std::min(a.exp, b.exp);
  const Int128 x = shifted(a.num, a.exp - e);
  const Int128 y = shifted(b.num, b.exp - e);
  return (x > y) - (x < y);
}

int compare(const ThirdDyadic& a, double x) {
  const long double lhs = std::ldexp(static_cast<long double>(a.num), a.exp);
  const long double rhs = 3.0L * static_cast<long double>(x);
  return (lhs > rhs) - (lhs < rhs);
}

GridShift::GridShift(int dim, std::array<int, 2> v) : dim(dim), v(v) {
  if (dim != 1 && dim != 2) throw Error("grid shift dimension must be 1 or 2");
  for (int i = 0; i < dim; ++i)
    if (v[i] < 0 || v[i] > 2) throw Error("grid shift coordinates must lie in {0,1,2}");
  if (dim == 1) this->v[1] = 0;
}

std::vector<GridShift> GridShift::all(int dim) {
  std::vector<GridShift> out;
  if (dim == 1) {
    for (int a = 0; a < 3; ++a) out.emplace_back(1, std::array<int, 2>{a, 0});
  } else {
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) out.emplace_back(2, std::array<int, 2>{a, b});
  }
  return out;
}

DyadicCube::DyadicCube(GridShift shift, int scale, std::array<std::int64_t, 2> index)
    : shift_(shift), scale_(scale), index_(index) {
  if (shift_.dim == 1) index_[1] = 0;
}

double DyadicCube::sidelength() const { return std::ldexp(1.0, scale_); }
double DyadicCube::measure() const { return std::ldexp(1.0, scale_ * dim()); }

ThirdDyadic DyadicCube::left(int axis) const {
  return {3 * index_[axis] + sign_of_scale(scale_) * shift_.v[axis], scale_};
}

ThirdDyadic DyadicCube::right(int axis) const {
  auto l = left(axis);
  l.num += 3;
  return l;
}

double DyadicCube::center(int axis) const {
  return double((left(axis).value() + right(axis).value()) / 2.0L);
}

bool DyadicCube::contains_point(std::array<double, 2> x) const {
  for (int a = 0; a < dim(); ++a)
    if (compare(left(a), x[a]) > 0 || compare(right(a), x[a]) <= 0) return false;
  return true;
}

bool DyadicCube::contains(const DyadicCube& other) const {
  if (other.dim() != dim()) return false;
  for (int a = 0; a < dim(); ++a) {
    if (compare(left(a), other.left(a)) > 0) return false;
    if (compare(other.right(a), right(a)) > 0) return false;
  }
  return true;
}

bool DyadicCube::intersects(const DyadicCube& other) const {
  if (other.dim() != dim()) return false;
  for (int a = 0; a < dim(); ++a) {
    if (compare(left(a), other.right(a)) >= 0) return false;
    if (compare(other.left(a), right(a)) >= 0) return false;
  }
  return true;
}

DyadicCube DyadicCube::parent() const {
  const int s = sign_of_scale(scale_ + 1);
  std::array<std::int64_t, 2> idx{0, 0};
  for (int a = 0; a < dim(); ++a) idx[a] = floor_div(index_[a] - s * shift_.v[a], 2);
  return DyadicCube(shift_, scale_ + 1, idx);
}

DyadicCube DyadicCube::canonical(int period_log2) const {
  if (scale_ > period_log2) throw Error("cube larger than the periodic domain");
  const std::int64_t period = std::int64_t(1) << (period_log2 - scale_);
  const int s = sign_of_scale(scale_);
  std::array<std::int64_t, 2> idx = index_;
  for (int a = 0; a < dim(); ++a) {
    std::int64_t m = ((idx[a] % period) + period) % period;
    if (3 * m + s * shift_.v[a] < 0) m += period;
    idx[a] = m;
  }
  return DyadicCube(shift_, scale_, idx);
}

std::vector<DyadicCube> children(const DyadicCube& q) {
  const int s = sign_of_scale(q.scale());
  std::vector<DyadicCube> out;
  std::array<std::int64_t, 2> base{0, 0};
  for (int a = 0; a < q.dim(); ++a) base[a] = 2 * q.index()[a] + s * q.shift().v[a];
  if (q.dim() == 1) {
    for (int b = 0; b < 2; ++b) out.emplace_back(q.shift(), q.scale() - 1, std::array<std::int64_t, 2>{base[0] + b, 0});
  } else {
    for (int b0 = 0; b0 < 2; ++b0)
      for (int b1 = 0; b1 < 2; ++b1)
        out.emplace_back(q.shift(), q.scale() - 1, std::array<std::int64_t, 2>{base[0] + b0, base[1] + b1});
  }
  return out;
}

DyadicCube root_cube(int dim, int period_log2) {
  return DyadicCube(GridShift::zero(dim), period_log2, {0, 0});
}

DyadicCube one_third_trick_cover(std::array<double, 2> center, double radius, int dim,
                                 std::optional<int> domain_log2) {
  if (!(radius > 0.0)) throw Error("ball radius must be positive");
  if (domain_log2 && 2.0 * radius >= std::ldexp(1.0, *domain_log2)) return root_cube(dim, *domain_log2);

  std::array<double, 2> lo{}, hi{};
  for (int a = 0; a < dim; ++a) {
    lo[a] = std::nextafter(center[a] - radius, -kInf);
    hi[a] = std::nextafter(center[a] + radius, kInf);
  }
  const int k0 = int(std::floor(std::log2(2.0 * radius)));
  for (int k = k0;; ++k) {
    for (const auto& shift : GridShift::all(dim)) {
      const int s = sign_of_scale(k);
      std::array<std::int64_t, 2> idx{0, 0};
      for (int a = 0; a < dim; ++a)
        idx[a] = std::int64_t(std::floor(std::ldexp(center[a], -k) - s * shift.v[a] / 3.0));
      // Floating floor may be off by one near an endpoint; test neighbours exactly.
      for (int d0 = -1; d0 <= 1; ++d0) {
        for (int d1 = (dim == 2 ? -1 : 0); d1 <= (dim == 2 ? 1 : 0); ++d1) {
          DyadicCube q(shift, k, {idx[0] + d0, idx[1] + d1});
          bool ok = true;
          for (int a = 0; a < dim && ok; ++a)
            ok = compare(q.left(a), lo[a]) <= 0 && compare(q.right(a), hi[a]) > 0;
          if (ok) return q;
        }
      }
    }
    if (domain_log2 && k >= *domain_log2) return root_cube(dim, *domain_log2);
  }
}

bool contains_periodic(const DyadicCube& outer, const DyadicCube& inner, int period_log2) {
  if (inner.scale() > outer.scale()) return false;
  const DyadicCube o = outer.canonical(period_log2);
  const DyadicCube c = inner.canonical(period_log2);
  const std::int64_t step = std::int64_t(1) << (period_log2 - c.scale());
  const int span = (c.dim() == 2) ? 1 : 0;
  for (int t0 = -1; t0 <= 1; ++t0)
    for (int t1 = -span; t1 <= span; ++t1) {
      DyadicCube moved(c.shift(), c.scale(), {c.index()[0] + t0 * step, c.index()[1] + t1 * step});
      if (o.contains(moved)) return true;
    }
  return false;
}

CubeFamily::CubeFamily(std::vector<DyadicCube> cubes, std::optional<int> period_log2)
    : cubes_(std::move(cubes)), period_log2_(period_log2) {
  if (period_log2_)
    for (auto& q : cubes_) q = q.canonical(*period_log2_);
  std::sort(cubes_.begin(), cubes_.end());
  cubes_.erase(std::unique(cubes_.begin(), cubes_.end()), cubes_.end());
  for (const auto& q : cubes_)
    if (q.shift() != cubes_.front().shift()) throw Error("cube family mixes grid shifts");
}

bool CubeFamily::contains(const DyadicCube& q) const {
  const DyadicCube c = period_log2_ ? q.canonical(*period_log2_) : q;
  return std::binary_search(cubes_.begin(), cubes_.end(), c);
}

void CubeFamily::insert(const DyadicCube& q) {
  const DyadicCube c = period_log2_ ? q.canonical(*period_log2_) : q;
  if (!cubes_.empty() && c.shift() != cubes_.front().shift()) throw Error("cube family mixes grid shifts");
  auto it = std::lower_bound(cubes_.begin(), cubes_.end(), c);
  if (it == cubes_.end() || *it != c) cubes_.insert(it, c);
}

bool CubeFamily::nested_in(const DyadicCube& outer, const DyadicCube& inner) const {
  if (period_log2_) return contains_periodic(outer, inner, *period_log2_);
  return outer.contains(inner);
}

CubeFamily tiling(const Lattice& lattice, const GridShift& shift, int scale) {
  const int p = lattice.length_log2();
  if (scale > p) throw Error("tiling scale exceeds the domain");
  if (scale < lattice.cell_scale()) throw Error("tiling scale below the lattice cell");
  const std::int64_t count = std::int64_t(1) << (p - scale);
  std::vector<DyadicCube> cubes;
  if (lattice.dim() == 1) {
    for (std::int64_t m = 0; m < count; ++m) cubes.emplace_back(shift, scale, std::array<std::int64_t, 2>{m, 0});
  } else {
    for (std::int64_t m0 = 0; m0 < count; ++m0)
      for (std::int64_t m1 = 0; m1 < count; ++m1)
        cubes.emplace_back(shift, scale, std::array<std::int64_t, 2>{m0, m1});
  }
  return CubeFamily(std::move(cubes), p);
}

namespace {

// Samples i with left <= i*dx < right, as the half-open integer range [first, last).
std::pair<std::int64_t, std::int64_t> sample_range(const DyadicCube& q, int axis, const Lattice& lat) {
  const int rel = q.scale() - lat.cell_scale();
  auto ceil_pos = [&](std::int64_t num) -> std::int64_t {
    // ceil(num * 2^rel / 3)
    if (rel >= 0) return std::int64_t(ceil_div(shifted(num, rel), 3));
    return std::int64_t(ceil_div(Int128(num), Int128(3) << (-rel)));
  };
  return {ceil_pos(q.left(axis).num), ceil_pos(q.right(axis).num)};
}

}  // namespace

std::int64_t cube_first_sample(const DyadicCube& q, int axis, const Lattice& lattice) {
  return sample_range(q, axis, lattice).first;
}

std::int64_t cube_samples_per_axis(const DyadicCube& q, const Lattice& lattice) {
  auto [a, b] = sample_range(q, 0, lattice);
  return b - a;
}

std::vector<Index> cube_cells(const DyadicCube& q, const Lattice& lattice) {
  if (q.dim() != lattice.dim()) throw Error("cube dimension does not match lattice");
  const std::int64_t n = lattice.samples();
  std::array<std::vector<std::int64_t>, 2> axes;
  for (int a = 0; a < q.dim(); ++a) {
    auto [first, last] = sample_range(q, a, lattice);
    last = std::min(last, first + n);
    for (std::int64_t i = first; i < last; ++i) axes[a].push_back(((i % n) + n) % n);
  }
  std::vector<Index> cells;
  if (q.dim() == 1) {
    cells.assign(axes[0].begin(), axes[0].end());
  } else {
    for (auto i0 : axes[0])
      for (auto i1 : axes[1]) cells.push_back(Index(i0 * n + i1));
  }
  std::sort(cells.begin(), cells.end());
  return cells;
}

double carleson_constant(const CubeFamily& family) {
  if (family.empty()) throw Error("empty family");
  const auto& cubes = family.cubes();
  double worst = 0.0;
  for (const auto& q : cubes) {
    double total = 0.0;
    for (const auto& c : cubes)
      if (c.scale() <= q.scale() && family.nested_in(q, c)) total += c.measure();
    worst = std::max(worst, total / q.measure());
  }
  return worst;
}

SparseCertificate certify_sparse(const CubeFamily& family, double eta, const Lattice& lattice) {
  if (!(eta > 0.0 && eta < 1.0)) throw Error("certify_sparse requires 0 < eta < 1");
  SparseCertificate cert;
  const auto& cubes = family.cubes();  // ascending scale, then index
  std::vector<std::vector<Index>> cells(cubes.size());
  for (std::size_t i = 0; i < cubes.size(); ++i) cells[i] = cube_cells(cubes[i], lattice);

  std::vector<int> owner(std::size_t(lattice.size()), -1);
  std::vector<std::vector<Index>> witness(cubes.size());
  for (std::size_t i = 0; i < cubes.size(); ++i) {
    const auto demand = std::size_t(std::floor(eta * double(cells[i].size()))) + 1;
    for (Index c : cells[i]) {
      if (witness[i].size() == demand) break;
      if (owner[c] < 0) {
        owner[c] = int(i);
        witness[i].push_back(c);
      }
    }
    if (witness[i].size() < demand) {
      cert.violating_chain.push_back(cubes[i]);
      for (const auto& c : cubes)
        if (c != cubes[i] && family.nested_in(cubes[i], c)) cert.violating_chain.push_back(c);
      cert.collection.family = family;
      cert.collection.eta = eta;
      return cert;
    }
  }
  for (std::size_t i = 0; i < cubes.size(); ++i)
    for (Index c : cells[i])
      if (owner[c] < 0) {
        owner[c] = int(i);
        witness[i].push_back(c);
      }
  for (auto& w : witness) std::sort(w.begin(), w.end());
  cert.success = true;
  cert.collection = SparseCollection{family, eta, std::move(witness)};
  return cert;
}

double sparse_eta_from_carleson(double lambda, std::int64_t min_cells) {
  if (!(lambda >= 1.0) || min_cells < 1) throw Error("invalid Carleson data");
  return std::max(0.0, 1.0 / lambda - 1.0 / double(min_cells));
}

bool verify_witness(const SparseCollection& s, const Lattice& lattice) {
  if (!s.witness) return false;
  const auto& cubes = s.family.cubes();
  const auto& w = *s.witness;
  if (w.size() != cubes.size()) return false;
  std::vector<char> used(std::size_t(lattice.size()), 0);
  for (std::size_t i = 0; i < cubes.size(); ++i) {
    const auto cells = cube_cells(cubes[i], lattice);
    if (!(double(w[i].size()) > s.eta * double(cells.size()))) return false;
    for (Index c : w[i]) {
      if (used[c]) return false;
      used[c] = 1;
      if (!std::binary_search(cells.begin(), cells.end(), c)) return false;
    }
  }
  return true;
}

std::string to_string(const DyadicCube& q) {
  std::ostringstream os;
  for (int a = 0; a < q.dim(); ++a) os << q.shift().v[a];
  os << ' ' << q.scale();
  for (int a = 0; a < q.dim(); ++a) os << ' ' << q.index()[a];
  return os.str();
}

void write_family(std::ostream& os, const CubeFamily& family) {
  for (const auto& q : family.cubes()) os << to_string(q) << '\n';
}

CubeFamily read_family(std::istream& is, std::optional<int> period_log2) {
  std::vector<DyadicCube> cubes;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string shift;
    int scale = 0;
    std::vector<std::int64_t> idx;
    if (!(ls >> shift >> scale)) throw Error("malformed cube line: " + line);
    std::int64_t m = 0;
    while (ls >> m) idx.push_back(m);
    const int dim = int(shift.size());
    if ((dim != 1 && dim != 2) || int(idx.size()) != dim) throw Error("malformed cube line: " + line);
    std::array<int, 2> v{0, 0};
    for (int a = 0; a < dim; ++a) v[a] = shift[a] - '0';
    cubes.emplace_back(GridShift(dim, v), scale, std::array<std::int64_t, 2>{idx[0], dim == 2 ? idx[1] : 0});
  }
  return CubeFamily(std::move(cubes), period_log2);
}

void write_certificate(std::ostream& os, const SparseCollection& s) {
  const auto& cubes = s.family.cubes();
  for (std::size_t i = 0; i < cubes.size(); ++i) {
    os << to_string(cubes[i]) << " ->";
    if (s.witness) {
      const auto& w = (*s.witness)[i];
      char sep = ' ';
      for (std::size_t a = 0; a < w.size();) {
        std::size_t b = a;
        while (b + 1 < w.size() && w[b + 1] == w[b] + 1) ++b;
        os << sep << w[a] << '-' << w[b];
        sep = ',';
        a = b + 1;
      }
    }
    os << '\n';
  }
}

}  // namespace sparsepdo
