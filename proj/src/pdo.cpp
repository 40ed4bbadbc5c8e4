#include "sparsepdo/pdo.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

namespace sparsepdo {

namespace {

void require_1d(const Lattice& lat) {
  if (lat.dim() != 1) throw Error("operators are one-dimensional");
}

// Minimal-image displacement of index difference d.
double displacement(const Lattice& lat, Index d) {
  const Index n = lat.samples();
  d = ((d % n) + n) % n;
  if (d > n / 2) d -= n;
  return double(d) * lat.spacing();
}

ComplexVector raw_fft(const ComplexVector& v) { return dft(v, 1.0); }
ComplexVector raw_ifft(const ComplexVector& v) { return inverse_dft(v, double(v.size())); }

double pnorm(const Eigen::Ref<const ComplexVector>& v, double p) {
  return lp_norm(ComplexVector(v), 1.0, p);
}

double conjugate_exponent(double p) {
  if (p == 1.0) return kInf;
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

}  // namespace

OperatorMatrix OperatorMatrix::dense(const Lattice& lattice, Eigen::MatrixXcd m, std::string tag) {
  if (m.rows() != lattice.samples() || m.cols() != lattice.samples()) throw Error("matrix size does not match lattice");
  if (!m.allFinite()) throw NumericalError("non-finite operator entries");
  OperatorMatrix A;
  A.kind_ = Kind::Dense;
  A.lattice_ = lattice;
  A.dense_ = std::move(m);
  A.tag_ = std::move(tag);
  return A;
}

OperatorMatrix OperatorMatrix::circulant(const Lattice& lattice, ComplexVector column, std::string tag) {
  if (column.size() != lattice.samples()) throw Error("column size does not match lattice");
  if (!column.allFinite()) throw NumericalError("non-finite operator entries");
  OperatorMatrix A;
  A.kind_ = Kind::Circulant;
  A.lattice_ = lattice;
  A.column_ = std::move(column);
  A.tag_ = std::move(tag);
  return A;
}

Complex OperatorMatrix::entry(Index i, Index k) const {
  if (kind_ == Kind::Dense) return dense_(i, k);
  const Index n = rows();
  return column_[((i - k) % n + n) % n];
}

Eigen::MatrixXcd OperatorMatrix::to_dense() const {
  if (kind_ == Kind::Dense) return dense_;
  const Index n = rows();
  Eigen::MatrixXcd m(n, n);
  for (Index k = 0; k < n; ++k)
    for (Index i = 0; i < n; ++i) m(i, k) = column_[(i - k + n) % n];
  return m;
}

ComplexVector OperatorMatrix::apply(const ComplexVector& f) const {
  if (f.size() != rows()) throw Error("vector size does not match operator");
  if (kind_ == Kind::Dense) return dense_ * f;
  return raw_ifft(raw_fft(column_).cwiseProduct(raw_fft(f)));
}

ComplexVector OperatorMatrix::apply_adjoint(const ComplexVector& g) const {
  if (g.size() != rows()) throw Error("vector size does not match operator");
  if (kind_ == Kind::Dense) return dense_.adjoint() * g;
  return raw_ifft(raw_fft(column_).conjugate().cwiseProduct(raw_fft(g)));
}

GridFunction OperatorMatrix::apply(const GridFunction& f) const {
  if (!(f.lattice() == lattice_)) throw Error("function lattice does not match operator");
  return GridFunction(lattice_, apply(f.values()));
}

OperatorMatrix OperatorMatrix::windowed(const std::function<double(double)>& window, std::string tag) const {
  const Index n = rows();
  std::vector<double> w(std::size_t(n), 0.0);
  for (Index d = 0; d < n; ++d) w[std::size_t(d)] = window(std::abs(displacement(lattice_, d)));
  if (kind_ == Kind::Circulant) {
    ComplexVector c = column_;
    for (Index d = 0; d < n; ++d) c[d] *= w[std::size_t(d)];
    return circulant(lattice_, std::move(c), std::move(tag));
  }
  Eigen::MatrixXcd m = dense_;
  for (Index k = 0; k < n; ++k)
    for (Index i = 0; i < n; ++i) m(i, k) *= w[std::size_t(((i - k) % n + n) % n)];
  return dense(lattice_, std::move(m), std::move(tag));
}

double band_cutoff(int j, double xi) {
  const double t = std::abs(xi);
  if (j == 0) return smooth_cutoff(t);
  return smooth_annulus(std::ldexp(t, -j));
}

GridFunction apply_T(const Symbol& a, const GridFunction& f) {
  const Lattice& lat = f.lattice();
  require_1d(lat);
  const GridFunction fhat = dft(f);
  const int n = lat.samples();
  if (a.x_independent) {
    GridFunction g = fhat;
    for (int k = 0; k < n; ++k) g[k] *= a(0.0, lat.frequency(k));
    return inverse_dft(g);
  }
  std::vector<Complex> roots(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) roots[std::size_t(t)] = std::polar(1.0, 2.0 * kPi * t / n);
  GridFunction out(lat);
  for (int i = 0; i < n; ++i) {
    const double x = lat.position(i);
    Complex acc = 0.0;
    for (int k = 0; k < n; ++k) {
      const std::int64_t phase = (std::int64_t(i) * lat.mode(k)) % n;
      acc += roots[std::size_t((phase + n) % n)] * a(x, lat.frequency(k)) * fhat[k];
    }
    out[i] = acc / lat.length();
  }
  return out;
}

namespace {

OperatorMatrix assemble(const Symbol& a, const Lattice& lat, const std::function<double(double)>& cutoff,
                        std::string tag) {
  require_1d(lat);
  const int n = lat.samples();
  const double dx = lat.spacing();
  if (a.x_independent) {
    ComplexVector m(n);
    for (int k = 0; k < n; ++k) {
      const double xi = lat.frequency(k);
      const double c = cutoff(xi);
      m[k] = c == 0.0 ? Complex(0.0) : c * a(0.0, xi);
    }
    return OperatorMatrix::circulant(lat, dx * inverse_dft(m, lat.length()), std::move(tag));
  }
  if (n > 4096) throw Error("dense operators are limited to N <= 4096");
  Eigen::MatrixXcd A(n, n);
  ComplexVector m(n);
  for (int i = 0; i < n; ++i) {
    const double x = lat.position(i);
    for (int k = 0; k < n; ++k) {
      const double xi = lat.frequency(k);
      const double c = cutoff(xi);
      m[k] = c == 0.0 ? Complex(0.0) : c * a(x, xi);
    }
    const ComplexVector K = inverse_dft(m, lat.length());
    for (int k = 0; k < n; ++k) A(i, k) = dx * K[((i - k) % n + n) % n];
  }
  return OperatorMatrix::dense(lat, std::move(A), std::move(tag));
}

void check_band(int j, const Lattice& lat) {
  if (j < 0) throw Error("frequency index must be nonnegative");
  if (std::ldexp(1.0, j + 1) >= lat.nyquist()) throw Error("frequency piece exceeds Nyquist");
}

}  // namespace

OperatorMatrix operator_matrix(const Symbol& a, const Lattice& lattice) {
  return assemble(a, lattice, [](double) { return 1.0; }, "T");
}

int max_frequency_index(const Lattice& lattice) {
  int j = -1;
  while (std::ldexp(1.0, j + 2) < lattice.nyquist()) ++j;
  return j;
}

OperatorMatrix frequency_piece(const Symbol& a, int j, const Lattice& lattice) {
  check_band(j, lattice);
  return assemble(a, lattice, [j](double xi) { return band_cutoff(j, xi); }, "T^" + std::to_string(j));
}

std::pair<int, int> spatial_range(const Symbol& a, int j, const Lattice& lattice) {
  const double jr = j * a.params.rho;
  const int lo = int(std::ceil(jr + std::log2(2.0 * lattice.spacing()) - 1e-12));
  const int hi = int(std::floor(jr + std::log2(0.5 * lattice.length()) + 1e-12));
  if (lo > hi) throw Error("unrepresentable spatial scale");
  return {lo, hi};
}

double spatial_window(const Symbol& a, int j, int l, int l_min, double z) {
  const double t = std::exp2(-l + j * a.params.rho) * std::abs(z);
  return l == l_min ? smooth_cutoff(t) : smooth_annulus(t);
}

OperatorMatrix spatial_piece(const Symbol& a, int j, int l, const Lattice& lattice) {
  const auto [lo, hi] = spatial_range(a, j, lattice);
  if (l < lo || l > hi) throw Error("unrepresentable spatial scale");
  return frequency_piece(a, j, lattice)
      .windowed([&, lo = lo](double z) { return spatial_window(a, j, l, lo, z); },
                "T^" + std::to_string(j) + "," + std::to_string(l));
}

OperatorMatrix spatial_sum(const Symbol& a, int j, int l_upper, const Lattice& lattice) {
  const double scale = std::exp2(-l_upper + j * a.params.rho);
  return frequency_piece(a, j, lattice)
      .windowed([scale](double z) { return smooth_cutoff(scale * z); },
                "T^" + std::to_string(j) + ",<=" + std::to_string(l_upper));
}

double spatial_tail_norm(const Symbol& a, int j, const Lattice& lattice) {
  const int hi = spatial_range(a, j, lattice).second;
  const double scale = std::exp2(-hi + j * a.params.rho);
  const auto tail = frequency_piece(a, j, lattice).windowed([scale](double z) { return 1.0 - smooth_cutoff(scale * z); }, "tail");
  return opnorm(tail, 2, 2).estimate;
}

OperatorMatrix local_part(const Symbol& a, int j, double epsilon, const Lattice& lattice) {
  return spatial_sum(a, j, int(std::floor(j * epsilon + 1e-12)), lattice);
}

double kernel_l1(const Symbol& a, int j, const Lattice& lattice) {
  return opnorm(frequency_piece(a, j, lattice), kInf, kInf).estimate;
}

std::string to_string(BoundKind k) {
  switch (k) {
    case BoundKind::Exact: return "exact";
    case BoundKind::Lower: return "lower";
    case BoundKind::Estimate: return "estimate";
  }
  return "?";
}

namespace {

// Max over columns (or rows) of the l^p norm.
double max_line_norm(const OperatorMatrix& A, double p, bool columns) {
  if (A.kind() == OperatorMatrix::Kind::Circulant) return pnorm(A.column(), p);
  const auto& m = A.dense_matrix();
  double best = 0.0;
  for (Index i = 0; i < m.rows(); ++i)
    best = std::max(best, columns ? pnorm(m.col(i), p) : pnorm(m.row(i).transpose(), p));
  return best;
}

// x -> |x|^(p-1) sgn(x), the l^p duality map (up to normalization).
ComplexVector duality_map(const ComplexVector& v, double p) {
  ComplexVector out(v.size());
  if (std::isinf(p)) {
    Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    out.setZero();
    out[arg] = v[arg] / std::abs(v[arg]);
    return out;
  }
  const double peak = v.cwiseAbs().maxCoeff();
  for (Index i = 0; i < v.size(); ++i) {
    const double m = std::abs(v[i]);
    out[i] = m == 0.0 ? Complex(0.0) : (v[i] / m) * std::pow(m / peak, p - 1.0);
  }
  return out;
}

}  // namespace

double power_iteration_ratio(const OperatorMatrix& A, double r, double s, ComplexVector x,
                             const OpnormOptions& opt, ComplexVector* maximizer) {
  const double rp = conjugate_exponent(r);
  double best = 0.0;
  ComplexVector best_x = x;
  for (int it = 0; it < opt.max_iterations; ++it) {
    const double xn = pnorm(x, r);
    if (xn == 0.0) break;
    x /= xn;
    const ComplexVector y = A.apply(x);
    const double ratio = pnorm(y, s);
    if (!std::isfinite(ratio)) throw NumericalError("non-finite norm in power iteration");
    const double previous = best;
    if (ratio > best) {
      best = ratio;
      best_x = x;
    }
    if (ratio == 0.0) break;
    const ComplexVector w = A.apply_adjoint(duality_map(y, s));
    if (w.cwiseAbs().maxCoeff() == 0.0) break;
    x = duality_map(w, rp);
    if (it > 0 && best - previous <= opt.tolerance * best) break;
  }
  if (maximizer) *maximizer = best_x;
  return best;
}

NormResult opnorm(const OperatorMatrix& A, double r, double s, const OpnormOptions& opt) {
  if (!(r >= 1.0) || !(s >= 1.0)) throw Error("opnorm requires 1 <= r, s <= inf");
  const double dx = A.lattice().spacing();
  const double inv_r = std::isinf(r) ? 0.0 : 1.0 / r;
  const double inv_s = std::isinf(s) ? 0.0 : 1.0 / s;
  const double weight = std::pow(dx, inv_s - inv_r);
  NormResult out;
  out.kind = BoundKind::Exact;
  if (r == 2.0 && s == 2.0) {
    if (A.kind() == OperatorMatrix::Kind::Circulant) {
      out.estimate = raw_fft(A.column()).cwiseAbs().maxCoeff();
    } else {
      Eigen::BDCSVD<Eigen::MatrixXcd> svd(A.dense_matrix());
      out.estimate = svd.singularValues()(0);
    }
  } else if (r == 1.0) {
    out.estimate = weight * max_line_norm(A, s, true);
  } else if (std::isinf(s)) {
    out.estimate = weight * max_line_norm(A, conjugate_exponent(r), false);
  } else {
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> nd;
    const Index n = A.rows();
    double best = 0.0;
    for (int t = 0; t < std::max(opt.restarts, 8); ++t) {
      ComplexVector x(n);
      if (t == 0) {
        x.setOnes();
      } else if (t == 1) {
        x.setZero();
        x[0] = 1.0;  // column norms are the (1, s) extremals
      } else {
        for (Index i = 0; i < n; ++i) x[i] = Complex(nd(rng), nd(rng));
      }
      best = std::max(best, power_iteration_ratio(A, r, s, x, opt));
    }
    out.estimate = weight * best;
    out.lower = out.estimate;
    out.kind = BoundKind::Lower;
    return out;
  }
  if (!std::isfinite(out.estimate)) throw NumericalError("non-finite operator norm");
  out.lower = out.estimate;
  return out;
}

DecayFit decay_fit(const std::vector<int>& js, const std::vector<double>& norms) {
  if (js.size() != norms.size()) throw Error("decay_fit needs matching j and norm lists");
  if (js.size() < 4) throw Error("decay_fit needs at least 4 points");
  if (std::all_of(js.begin(), js.end(), [&](int j) { return j == js.front(); })) throw Error("degenerate j set");
  const double n = double(js.size());
  double mx = 0, my = 0;
  std::vector<double> y;
  for (std::size_t i = 0; i < js.size(); ++i) {
    if (!(norms[i] > 0.0) || !std::isfinite(norms[i])) throw NumericalError("decay_fit needs positive finite norms");
    y.push_back(std::log2(norms[i]));
    mx += js[i];
    my += y.back();
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < js.size(); ++i) {
    sxx += (js[i] - mx) * (js[i] - mx);
    sxy += (js[i] - mx) * (y[i] - my);
  }
  DecayFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < js.size(); ++i) {
    const double e = y[i] - (fit.intercept + fit.slope * js[i]);
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

}  // namespace sparsepdo
