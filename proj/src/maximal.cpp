#include "sparsepdo/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "sparsepdo/parallel.hpp"

namespace sparsepdo {

namespace {

void require_1d(const Lattice& lat) {
  if (lat.dim() != 1) throw Error("maximal operators are implemented for n = 1");
}

Index wrap(Index i, Index n) { return ((i % n) + n) % n; }

// Entry accessor that avoids the per-call dispatch of OperatorMatrix::entry.
std::function<Complex(Index, Index)> entry_fn(const OperatorMatrix& A) {
  const Index n = A.rows();
  if (A.kind() == OperatorMatrix::Kind::Circulant) {
    const ComplexVector* col = &A.column();
    return [col, n](Index i, Index k) { return (*col)[wrap(i - k, n)]; };
  }
  const Eigen::MatrixXcd* m = &A.dense_matrix();
  return [m](Index i, Index k) { return (*m)(i, k); };
}

// The tripled window [first - count, first + 2 count) or nullopt when it covers the torus.
std::optional<std::pair<Index, Index>> tripled(const CubeRange& q, Index n) {
  if (3 * q.count >= n) return std::nullopt;
  return std::make_pair(q.first - q.count, 3 * q.count);
}

// max_{z in P} |g(z) - sum_{y in 3P} A(z, y) h(y)| where g = T h.
double truncated_max(const std::function<Complex(Index, Index)>& A, const ComplexVector& h,
                     const std::vector<char>& nonzero, const std::function<Complex(Index)>& Th, const CubeRange& P,
                     Index n) {
  const auto win = tripled(P, n);
  if (!win) return 0.0;
  std::vector<Index> ys;
  for (Index t = 0; t < win->second; ++t) {
    const Index y = wrap(win->first + t, n);
    if (nonzero[std::size_t(y)]) ys.push_back(y);
  }
  double best = 0.0;
  for (Index t = 0; t < P.count; ++t) {
    const Index z = wrap(P.first + t, n);
    Complex acc = Th(z);
    for (Index y : ys) acc -= A(z, y) * h[y];
    best = std::max(best, std::abs(acc));
  }
  return best;
}

GridFunction from_real(const Lattice& lat, const std::vector<double>& v) {
  GridFunction out(lat);
  for (std::size_t i = 0; i < v.size(); ++i) out[Index(i)] = v[i];
  return out;
}

}  // namespace

CubeRange cube_range(const DyadicCube& q, const Lattice& lattice) {
  require_1d(lattice);
  const Index n = lattice.samples();
  CubeRange out;
  out.cube = q;
  out.first = wrap(cube_first_sample(q, 0, lattice), n);
  out.count = std::min<Index>(cube_samples_per_axis(q, lattice), n);
  return out;
}

std::vector<CubeRange> scan_cubes(const Lattice& lattice, double min_side) {
  require_1d(lattice);
  std::vector<CubeRange> out;
  for (const auto& shift : GridShift::all(1)) {
    for (int k = lattice.cell_scale(); k <= lattice.length_log2(); ++k) {
      if (!(std::exp2(k) > min_side) && min_side > 0.0) continue;
      const CubeFamily tiles = tiling(lattice, shift, k);
      for (const auto& q : tiles.cubes()) {
        auto r = cube_range(q, lattice);
        if (r.count > 0) out.push_back(r);
      }
    }
  }
  return out;
}

std::vector<CubeRange> descendants(const DyadicCube& q, const Lattice& lattice) {
  std::vector<CubeRange> out;
  std::vector<DyadicCube> stack{q};
  while (!stack.empty()) {
    DyadicCube c = stack.back();
    stack.pop_back();
    auto r = cube_range(c, lattice);
    if (r.count == 0) continue;
    out.push_back(r);
    if (r.count > 1)
      for (const auto& ch : children(c)) stack.push_back(ch);
  }
  return out;
}

PowerSums::PowerSums(const GridFunction& f, double p) : p_(p) {
  if (!(p > 0.0)) throw Error("average exponent must be positive");
  const Index n = f.size();
  values_.resize(std::size_t(n));
  for (Index i = 0; i < n; ++i) values_[std::size_t(i)] = std::abs(f[i]);
  if (std::isinf(p)) return;
  prefix_.assign(std::size_t(2 * n + 1), 0.0);
  for (Index i = 0; i < 2 * n; ++i)
    prefix_[std::size_t(i + 1)] = prefix_[std::size_t(i)] + std::pow(values_[std::size_t(i % n)], p);
}

double PowerSums::average(Index first, Index count) const {
  const Index n = Index(values_.size());
  if (count <= 0) throw Error("empty cell range");
  first = wrap(first, n);
  count = std::min(count, n);
  if (std::isinf(p_)) {
    double m = 0.0;
    for (Index t = 0; t < count; ++t) m = std::max(m, values_[std::size_t((first + t) % n)]);
    return m;
  }
  const double s = std::max(0.0, prefix_[std::size_t(first + count)] - prefix_[std::size_t(first)]);
  return std::pow(s / double(count), 1.0 / p_);
}

GridFunction maximal(const GridFunction& f, const MaximalKind& kind) {
  const Lattice& lat = f.lattice();
  require_1d(lat);
  switch (kind.tag) {
    case MaximalKind::Tag::Grand:
      if (!kind.op) throw Error("grand maximal function needs an operator");
      return grand_maximal(*kind.op, f);
    case MaximalKind::Tag::Iterated: {
      if (!(kind.param >= 1.0)) throw Error("iteration count must be >= 1");
      GridFunction g = f;
      for (int i = 0; i < int(kind.param); ++i) g = maximal(g, MaximalKind::hl());
      return g;
    }
    default:
      break;
  }
  double p = 1.0;
  if (kind.tag == MaximalKind::Tag::Lp) {
    if (!(kind.param >= 1.0)) throw Error("M_p needs p >= 1");
    p = kind.param;
  } else if (kind.tag == MaximalKind::Tag::PowerGamma) {
    if (!(kind.param > 0.0)) throw Error("M_gamma needs gamma > 0");
    p = kind.param;
  }
  const PowerSums sums(f, p);
  const Index n = lat.samples();
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  for (const auto& q : scan_cubes(lat)) {
    const double avg = sums.average(q.first, q.count);
    for (Index t = 0; t < q.count; ++t) {
      double& o = out[std::size_t((q.first + t) % n)];
      o = std::max(o, avg);
    }
  }
  return from_real(lat, out);
}

GridFunction grand_maximal(const OperatorMatrix& T, const GridFunction& f, const GrandOptions& options) {
  const Lattice& lat = f.lattice();
  require_1d(lat);
  if (!(T.lattice() == lat)) throw Error("operator and function live on different lattices");
  const Index n = lat.samples();
  const GridFunction Tf = T.apply(f);
  std::vector<char> nonzero(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) nonzero[std::size_t(i)] = f[i] != Complex(0.0);
  const auto A = entry_fn(T);
  const auto cubes = scan_cubes(lat, options.min_side);
  const std::function<Complex(Index)> Th = [&](Index z) { return Tf[z]; };
  const auto vals = parallel_map<double>(cubes.size(), [&](std::size_t c) {
    return truncated_max(A, f.values(), nonzero, Th, cubes[c], n);
  });
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  for (std::size_t c = 0; c < cubes.size(); ++c)
    for (Index t = 0; t < cubes[c].count; ++t) {
      double& o = out[std::size_t((cubes[c].first + t) % n)];
      o = std::max(o, vals[c]);
    }
  return from_real(lat, out);
}

double weak_type_ratio(const GridFunction& g, double norm, double r) {
  if (!(norm > 0.0)) return 0.0;
  std::vector<double> v(std::size_t(g.size()));
  for (Index i = 0; i < g.size(); ++i) v[std::size_t(i)] = std::abs(g[i]);
  std::sort(v.begin(), v.end(), std::greater<>());
  const double cell = g.lattice().cell_measure();
  double best = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) best = std::max(best, v[k] * std::pow(double(k + 1) * cell, 1.0 / r));
  return best / norm;
}

PointwiseResult pointwise_dominate(const Symbol& a, const GridFunction& f, double r, const PointwiseOptions& opt) {
  if (!(r >= 1.0)) throw Error("r must be >= 1");
  if (!(opt.kappa > 0.0)) throw Error("kappa must be positive");
  const Lattice& lat = f.lattice();
  require_1d(lat);
  const Index n = lat.samples();
  const int p = lat.length_log2();
  const OperatorMatrix T = operator_matrix(a, lat);
  PointwiseResult out;
  out.Tf = T.apply(f);
  out.Af = GridFunction(lat);

  bool any = false;
  for (Index i = 0; i < n; ++i) any = any || f[i] != Complex(0.0);
  if (!any) {
    out.collection.family = CubeFamily({}, p);
    return out;
  }

  const PowerSums fr(f, r);
  const auto A = entry_fn(T);
  std::vector<char> nonzero(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) nonzero[std::size_t(i)] = f[i] != Complex(0.0);

  std::vector<DyadicCube> selected;
  std::vector<std::pair<DyadicCube, int>> queue{{root_cube(1, p), 0}};
  while (!queue.empty()) {
    const auto [Q, depth] = queue.back();
    queue.pop_back();
    const CubeRange R = cube_range(Q, lat);
    const auto win = tripled(R, n);
    const double avg3 = win ? fr.average(win->first, win->second) : fr.average(0, n);
    selected.push_back(Q);
    out.depth = std::max(out.depth, depth);
    for (Index t = 0; t < R.count; ++t) out.Af[wrap(R.first + t, n)] += avg3;
    if (R.count <= 1 || avg3 == 0.0) continue;

    // h = f on 3Q; T h evaluated on Q only.
    std::vector<char> in3(std::size_t(n), win ? 0 : 1);
    if (win)
      for (Index t = 0; t < win->second; ++t) in3[std::size_t(wrap(win->first + t, n))] = 1;
    ComplexVector h = f.values();
    std::vector<char> hnz = nonzero;
    for (Index i = 0; i < n; ++i)
      if (!in3[std::size_t(i)]) {
        h[i] = 0.0;
        hnz[std::size_t(i)] = 0;
      }
    std::vector<Index> hs;
    for (Index i = 0; i < n; ++i)
      if (hnz[std::size_t(i)]) hs.push_back(i);
    std::vector<Complex> ThQ(std::size_t(R.count));
    for (Index t = 0; t < R.count; ++t) {
      const Index z = wrap(R.first + t, n);
      if (!win) {
        ThQ[std::size_t(t)] = out.Tf[z];
        continue;
      }
      Complex acc = 0.0;
      for (Index y : hs) acc += A(z, y) * h[y];
      ThQ[std::size_t(t)] = acc;
    }
    const std::function<Complex(Index)> Th = [&](Index z) { return ThQ[std::size_t(wrap(z - R.first, n))]; };

    // Localized grand maximal function and local M_r over proper subcubes.
    auto subs = descendants(Q, lat);
    subs.erase(subs.begin());
    const auto tvals = parallel_map<double>(subs.size(), [&](std::size_t c) {
      return truncated_max(A, h, hnz, Th, subs[c], n);
    });
    std::vector<double> MT(std::size_t(R.count), 0.0), Mr(std::size_t(R.count), 0.0);
    for (std::size_t c = 0; c < subs.size(); ++c) {
      const double av = fr.average(subs[c].first, subs[c].count);
      for (Index t = 0; t < subs[c].count; ++t) {
        const std::size_t local = std::size_t(wrap(subs[c].first + t - R.first, n));
        MT[local] = std::max(MT[local], tvals[c]);
        Mr[local] = std::max(Mr[local], av);
      }
    }

    std::vector<DyadicCube> picks;
    for (double kappa = opt.kappa;; kappa *= 2.0) {
      const double thr = kappa * avg3;
      std::vector<Index> prefix(std::size_t(R.count) + 1, 0);
      for (Index t = 0; t < R.count; ++t)
        prefix[std::size_t(t + 1)] = prefix[std::size_t(t)] + ((MT[std::size_t(t)] > thr || Mr[std::size_t(t)] > thr) ? 1 : 0);
      picks.clear();
      Index covered = 0;
      std::vector<DyadicCube> stack = children(Q);
      while (!stack.empty()) {
        const DyadicCube P = stack.back();
        stack.pop_back();
        const CubeRange PR = cube_range(P, lat);
        if (PR.count == 0) continue;
        const Index off = wrap(PR.first - R.first, n);
        const Index hits = prefix[std::size_t(off + PR.count)] - prefix[std::size_t(off)];
        if (8 * hits > PR.count) {
          picks.push_back(P);
          covered += PR.count;
        } else if (hits > 0 && PR.count > 1) {
          for (const auto& ch : children(P)) stack.push_back(ch);
        }
      }
      if (2 * covered < R.count) {
        out.max_kappa = std::max(out.max_kappa, kappa);
        break;
      }
    }
    for (const auto& P : picks) {
      if (depth + 1 > opt.max_depth) {
        out.partial = true;
        continue;
      }
      queue.push_back({P, depth + 1});
    }
  }

  CubeFamily family(selected, p);
  auto cert = certify_sparse(family, 0.5, lat);
  out.collection = cert.success ? cert.collection : SparseCollection{family, 0.0, std::nullopt};

  double peak = 0.0;
  for (Index i = 0; i < n; ++i) peak = std::max(peak, std::abs(out.Tf[i]));
  for (Index i = 0; i < n; ++i) {
    const double den = out.Af[i].real();
    const double num = std::abs(out.Tf[i]);
    if (den > 0.0 && num > 1e-13 * peak) out.ratio = std::max(out.ratio, num / den);
  }
  return out;
}

GridFunction random_test_function(const Lattice& lattice, std::mt19937_64& rng) {
  const double dx = lattice.spacing();
  GridFunction f(lattice);
  for (int b = 0; b < 4; ++b) {
    const double wmin = b == 0 ? 2.0 * dx : 4.0 * dx;
    const double wmax = b == 0 ? 4.0 * dx : lattice.length() / 8.0;
    const Bump bump = random_bump(rng, lattice.length(), wmin, std::max(wmin, wmax), lattice.nyquist() / 4.0);
    f.values() += bump.on(lattice).values();
  }
  return f;
}

GrandWeakReport grand_maximal_weak_type(const Symbol& a, const Lattice& lattice, double r, std::mt19937_64& rng,
                                        const GrandWeakOptions& opt) {
  if (!(r > 1.0)) throw Error("weak type exponent must exceed 1");
  if (opt.trials < 1) throw Error("at least one trial is required");
  GrandWeakReport rep;
  rep.p = opt.p.value_or(1.0 + (1.0 - a.params.rho) / 4.0);
  rep.s = opt.s;
  const double large = opt.large_side.value_or(lattice.length() / 16.0);
  const OperatorMatrix T = operator_matrix(a, lattice);
  const double Ts = opnorm(T, rep.s, rep.s).estimate;
  for (int trial = 0; trial < opt.trials; ++trial) {
    const GridFunction f = random_test_function(lattice, rng);
    const GridFunction MT = grand_maximal(T, f);
    rep.weak_constant = std::max(rep.weak_constant, weak_type_ratio(MT, lp_norm(f, r), r));
    const GridFunction M1 = maximal(f, MaximalKind::hl());
    const GridFunction Mp = maximal(f, MaximalKind::lp(rep.p));
    const GridFunction MsT = maximal(T.apply(f), MaximalKind::lp(rep.s));
    const GridFunction Ms = maximal(f, MaximalKind::lp(rep.s));
    const GridFunction big = grand_maximal(T, f, GrandOptions{large});
    double worst = 0.0;
    for (Index i = 0; i < f.size(); ++i) {
      const double maj = M1[i].real() + Mp[i].real() + MsT[i].real() + Ts * Ms[i].real();
      if (maj > 0.0) worst = std::max(worst, MT[i].real() / maj);
      if (M1[i].real() > 0.0) rep.large_cube_constant = std::max(rep.large_cube_constant, big[i].real() / M1[i].real());
    }
    rep.majorant_per_trial.push_back(worst);
    rep.majorant_constant = std::max(rep.majorant_constant, worst);
  }
  return rep;
}

}  // namespace sparsepdo
