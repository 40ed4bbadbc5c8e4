#include "oracles.hpp"

#include <algorithm>
#include <cmath>

namespace sparsepdo::oracle {

GridFunction direct_T(const Symbol& a, const GridFunction& f) {
  const Lattice& lat = f.lattice();
  const int n = lat.samples();
  std::vector<Complex> fhat(std::size_t(n), 0.0);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      fhat[std::size_t(k)] += lat.spacing() * f[i] * std::exp(Complex(0, -lat.frequency(k) * lat.position(i)));
  GridFunction out(lat);
  for (int i = 0; i < n; ++i) {
    Complex acc = 0.0;
    for (int k = 0; k < n; ++k)
      acc += std::exp(Complex(0, lat.frequency(k) * lat.position(i))) * a(lat.position(i), lat.frequency(k)) *
             fhat[std::size_t(k)];
    out[i] = acc / lat.length();
  }
  return out;
}

std::vector<BruteCube> brute_cubes(const Lattice& lat) {
  const int p = lat.length_log2();
  const double L = lat.length();
  std::vector<BruteCube> out;
  for (const auto& shift : GridShift::all(1)) {
    for (int k = lat.cell_scale(); k <= p; ++k) {
      const std::int64_t count = std::int64_t(1) << (p - k);
      for (std::int64_t m = -count; m < 2 * count; ++m) {
        DyadicCube q(shift, k, {m, 0});
        const double left = double(q.left(0).value());
        if (left < 0.0 || left >= L) continue;
        BruteCube b{left, std::exp2(k), {}};
        for (int i = 0; i < lat.samples(); ++i) {
          const double x = lat.position(i);
          if (q.contains_point({x, 0}) || q.contains_point({x + L, 0})) b.cells.push_back(i);
        }
        if (!b.cells.empty()) out.push_back(b);
      }
    }
  }
  return out;
}

bool in_tripled(const BruteCube& q, double x, double L) {
  if (3.0 * q.side >= L) return true;
  for (double shift : {-L, 0.0, L}) {
    const double y = x + shift;
    if (y >= q.left - q.side && y < q.left + 2.0 * q.side) return true;
  }
  return false;
}

std::vector<double> brute_maximal(const GridFunction& f, double p) {
  std::vector<double> ref(std::size_t(f.size()), 0.0);
  for (const auto& q : brute_cubes(f.lattice())) {
    double s = 0.0;
    for (Index c : q.cells) s += std::pow(std::abs(f[c]), p);
    const double avg = std::pow(s / double(q.cells.size()), 1.0 / p);
    for (Index c : q.cells) ref[std::size_t(c)] = std::max(ref[std::size_t(c)], avg);
  }
  return ref;
}

std::vector<double> brute_grand_maximal(const OperatorMatrix& T, const GridFunction& f) {
  const Lattice& lat = f.lattice();
  std::vector<double> ref(std::size_t(f.size()), 0.0);
  for (const auto& q : brute_cubes(lat)) {
    GridFunction h = f;
    for (int i = 0; i < lat.samples(); ++i)
      if (in_tripled(q, lat.position(i), lat.length())) h[i] = 0.0;
    const GridFunction Th = T.apply(h);
    double best = 0.0;
    for (Index c : q.cells) best = std::max(best, std::abs(Th[c]));
    for (Index c : q.cells) ref[std::size_t(c)] = std::max(ref[std::size_t(c)], best);
  }
  return ref;
}

double brute_single_cube(const GridFunction& f, const GridFunction& g, double r, double s_prime) {
  const Lattice& lat = f.lattice();
  std::vector<Index> support;
  for (Index i = 0; i < f.size(); ++i)
    if (std::abs(f[i]) > 0.0 || std::abs(g[i]) > 0.0) support.push_back(i);
  double best = 0.0;
  for (const auto& q : brute_cubes(lat)) {
    const bool all = std::all_of(support.begin(), support.end(), [&](Index i) {
      return std::find(q.cells.begin(), q.cells.end(), i) != q.cells.end();
    });
    if (!all) continue;
    double sf = 0.0, sg = 0.0;
    for (Index c : q.cells) {
      sf += std::pow(std::abs(f[c]), r);
      sg += std::pow(std::abs(g[c]), s_prime);
    }
    const double n = double(q.cells.size());
    best = std::max(best, q.side * std::pow(sf / n, 1.0 / r) * std::pow(sg / n, 1.0 / s_prime));
  }
  return best;
}

}  // namespace sparsepdo::oracle
