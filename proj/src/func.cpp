#include "sparsepdo/func.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

#include <unsupported/Eigen/FFT>

#include "sparsepdo/dyadic.hpp"

namespace sparsepdo {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

int exact_log2(double x) {
  int e = 0;
  const double frac = std::frexp(x, &e);
  if (frac != 0.5) return std::numeric_limits<int>::min();
  return e - 1;
}

Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> engine;
  return engine;
}

// In-place along one axis of an N x N row-major block, or the whole vector in 1-D.
void transform(ComplexVector& v, int n_axis, int dim, bool forward) {
  auto& fft = fft_engine();
  ComplexVector in(n_axis), out(n_axis);
  auto run = [&](auto get, auto put, Index lines) {
    for (Index line = 0; line < lines; ++line) {
      for (int i = 0; i < n_axis; ++i) in[i] = get(line, i);
      if (forward)
        fft.fwd(out, in);
      else
        fft.inv(out, in);
      for (int i = 0; i < n_axis; ++i) put(line, i, out[i]);
    }
  };
  if (dim == 1) {
    run([&](Index, int i) { return v[i]; }, [&](Index, int i, Complex c) { v[i] = c; }, 1);
    return;
  }
  const Index n = n_axis;
  run([&](Index row, int i) { return v[row * n + i]; },
      [&](Index row, int i, Complex c) { v[row * n + i] = c; }, n);
  run([&](Index col, int i) { return v[Index(i) * n + col]; },
      [&](Index col, int i, Complex c) { v[Index(i) * n + col] = c; }, n);
}

}  // namespace

Lattice::Lattice(int dim, double length, int samples)
    : dim_(dim), length_(length), samples_(samples) {
  if (dim != 1 && dim != 2) throw Error("lattice dimension must be 1 or 2");
  if (!(length > 0.0) || !std::isfinite(length)) throw Error("lattice length must be positive");
  if (samples < 8 || !is_power_of_two(samples))
    throw Error("lattice samples must be a power of two >= 8");
}

Index Lattice::size() const { return dim_ == 1 ? Index(samples_) : Index(samples_) * samples_; }
double Lattice::cell_measure() const { return std::pow(spacing(), dim_); }
double Lattice::measure() const { return std::pow(length_, dim_); }
bool Lattice::dyadic_length() const { return exact_log2(length_) != std::numeric_limits<int>::min(); }

int Lattice::length_log2() const {
  const int e = exact_log2(length_);
  if (e == std::numeric_limits<int>::min())
    throw Error("dyadic operations need a power-of-two domain length");
  return e;
}

int Lattice::cell_scale() const { return length_log2() - std::countr_zero(unsigned(samples_)); }

GridFunction::GridFunction(const Lattice& lattice)
    : lattice_(lattice), values_(ComplexVector::Zero(lattice.size())) {}

GridFunction::GridFunction(const Lattice& lattice, ComplexVector values)
    : lattice_(lattice), values_(std::move(values)) {
  if (values_.size() != lattice.size()) throw Error("grid function size does not match lattice");
}

bool GridFunction::all_finite() const { return values_.allFinite(); }

double smooth_cutoff(double t) {
  t = std::abs(t);
  if (t <= 1.0) return 1.0;
  if (t >= 2.0) return 0.0;
  const double a = std::exp(-1.0 / (2.0 - t));
  const double b = std::exp(-1.0 / (t - 1.0));
  return a / (a + b);
}

double smooth_annulus(double t) { return smooth_cutoff(t) - smooth_cutoff(2.0 * t); }

GridFunction dft(const GridFunction& f) {
  const Lattice& lat = f.lattice();
  ComplexVector v = f.values();
  transform(v, lat.samples(), lat.dim(), true);
  v *= lat.cell_measure();
  return GridFunction(lat, std::move(v));
}

GridFunction inverse_dft(const GridFunction& fhat) {
  const Lattice& lat = fhat.lattice();
  ComplexVector v = fhat.values();
  transform(v, lat.samples(), lat.dim(), false);
  // inv() already divides by N per axis.
  v /= lat.cell_measure();
  return GridFunction(lat, std::move(v));
}

ComplexVector dft(const ComplexVector& values, double dx) {
  ComplexVector out(values.size());
  fft_engine().fwd(out, values);
  return out * dx;
}

ComplexVector inverse_dft(const ComplexVector& values, double length) {
  ComplexVector out(values.size());
  fft_engine().inv(out, values);
  return out * (double(values.size()) / length);
}

double parseval_constant(const Lattice& lattice) {
  return lattice.measure() / std::pow(double(lattice.samples()), 0.5 * lattice.dim());
}

double lp_norm(const ComplexVector& values, double cell_measure, double p) {
  if (!(p >= 1.0)) throw Error("lp_norm requires p >= 1");
  if (values.size() == 0) return 0.0;
  const double peak = values.cwiseAbs().maxCoeff();
  if (std::isinf(p)) return peak;
  if (peak == 0.0) return 0.0;
  double acc = 0.0;
  for (Index i = 0; i < values.size(); ++i) acc += std::pow(std::abs(values[i]) / peak, p);
  return peak * std::pow(acc * cell_measure, 1.0 / p);
}

double lp_norm(const GridFunction& f, double p) {
  return lp_norm(f.values(), f.lattice().cell_measure(), p);
}

double local_average(const GridFunction& f, const DyadicCube& cube, double p) {
  if (!(p >= 1.0)) throw Error("local_average requires p >= 1");
  const Lattice& lat = f.lattice();
  if (cube.dim() != lat.dim()) throw Error("cube dimension does not match lattice");
  if (cube.scale() > lat.length_log2()) throw Error("cube exceeds the periodic domain");
  const auto cells = cube_cells(cube, lat);
  if (cells.empty()) throw Error("cube is disjoint from the domain samples");
  if (std::isinf(p)) {
    double m = 0.0;
    for (Index c : cells) m = std::max(m, std::abs(f[c]));
    return m;
  }
  double acc = 0.0;
  for (Index c : cells) acc += std::pow(std::abs(f[c]), p);
  return std::pow(acc / double(cells.size()), 1.0 / p);
}

Complex inner_product(const GridFunction& u, const GridFunction& v) {
  if (!(u.lattice() == v.lattice())) throw Error("inner product across different lattices");
  return u.values().dot(v.values()) * u.lattice().cell_measure();
}

namespace {

double radial_frequency(const Lattice& lat, Index flat) {
  if (lat.dim() == 1) return std::abs(lat.frequency(int(flat)));
  const int n = lat.samples();
  return std::hypot(lat.frequency(int(flat / n)), lat.frequency(int(flat % n)));
}

}  // namespace

BernsteinReport bernstein_check(const Lattice& lattice, int j, double r, double s, int trials,
                                std::mt19937_64& rng) {
  if (!(r >= 1.0 && s >= r)) throw Error("bernstein_check requires 1 <= r <= s");
  const double band = std::ldexp(1.0, j);
  if (band >= lattice.nyquist()) throw Error("frequency support exceeds lattice");
  if (trials < 1) throw Error("bernstein_check needs at least one trial");

  const int n = lattice.dim();
  const double inv_r = 1.0 / r;
  const double inv_s = std::isinf(s) ? 0.0 : 1.0 / s;
  const double scale = std::pow(band, n * (inv_r - inv_s));

  std::normal_distribution<double> normal;
  BernsteinReport report;
  report.worst_ratio = -1.0;
  for (int t = 0; t < trials; ++t) {
    GridFunction fhat(lattice);
    for (Index k = 0; k < fhat.size(); ++k) {
      const double xi = radial_frequency(lattice, k);
      if (xi > band) continue;
      if (t == 0)
        fhat[k] = smooth_cutoff(2.0 * xi / band);
      else if (t == 1)
        fhat[k] = 1.0;
      else
        fhat[k] = Complex(normal(rng), normal(rng));
    }
    GridFunction f = inverse_dft(fhat);
    const double denom = scale * lp_norm(f, r);
    if (denom == 0.0) continue;
    const double ratio = lp_norm(f, s) / denom;
    if (ratio > report.worst_ratio) {
      report.worst_ratio = ratio;
      report.argmax = std::move(f);
    }
  }
  return report;
}

void write_text(std::ostream& os, const GridFunction& f) {
  const Lattice& lat = f.lattice();
  std::ostringstream header;
  header.precision(17);
  header << lat.dim() << ' ' << lat.length() << ' ' << lat.samples() << '\n';
  os << header.str();
  char buf[64];
  for (Index i = 0; i < f.size(); ++i) {
    auto put = [&](double x) {
      auto res = std::to_chars(buf, buf + sizeof buf, x);
      os.write(buf, res.ptr - buf);
    };
    put(f[i].real());
    os << ' ';
    put(f[i].imag());
    os << '\n';
  }
}

namespace {

Lattice read_header(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error("missing grid function header");
  std::istringstream hs(line);
  int dim = 0, samples = 0;
  double length = 0.0;
  if (!(hs >> dim >> length >> samples)) throw Error("malformed grid function header");
  return Lattice(dim, length, samples);
}

}  // namespace

GridFunction read_text(std::istream& is) {
  const Lattice lat = read_header(is);
  GridFunction f(lat);
  for (Index i = 0; i < f.size(); ++i) {
    double re = 0.0, im = 0.0;
    if (!(is >> re >> im)) throw Error("truncated grid function data");
    f[i] = Complex(re, im);
  }
  return f;
}

void write_binary(std::ostream& os, const GridFunction& f) {
  static_assert(std::endian::native == std::endian::little, "binary format assumes little-endian host");
  const Lattice& lat = f.lattice();
  std::ostringstream header;
  header.precision(17);
  header << lat.dim() << ' ' << lat.length() << ' ' << lat.samples() << '\n';
  os << header.str();
  for (Index i = 0; i < f.size(); ++i) {
    const double pair[2] = {f[i].real(), f[i].imag()};
    os.write(reinterpret_cast<const char*>(pair), sizeof pair);
  }
}

GridFunction read_binary(std::istream& is) {
  const Lattice lat = read_header(is);
  GridFunction f(lat);
  for (Index i = 0; i < f.size(); ++i) {
    double pair[2];
    if (!is.read(reinterpret_cast<char*>(pair), sizeof pair)) throw Error("truncated grid function data");
    f[i] = Complex(pair[0], pair[1]);
  }
  return f;
}

Complex Bump::operator()(double x) const {
  const double d = (x - center) / width;
  const double g = std::exp(-0.5 * d * d);
  if (g < 1e-12) return 0.0;
  return amplitude * g * std::polar(1.0, omega * x);
}

double Bump::support_radius() const { return width * std::sqrt(2.0 * std::log(1e12)); }

GridFunction Bump::on(const Lattice& lattice) const {
  if (lattice.dim() != 1) throw Error("bumps are one-dimensional");
  return GridFunction::sample(lattice, [this](double x) { return (*this)(x); });
}

Bump random_bump(std::mt19937_64& rng, double length, double min_width, double max_width,
                 double max_omega) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Bump b;
  b.width = min_width + (max_width - min_width) * unit(rng);
  const double margin = b.support_radius();
  const double lo = std::min(margin, 0.5 * length);
  const double hi = std::max(length - margin, 0.5 * length);
  b.center = lo + (hi - lo) * unit(rng);
  b.omega = max_omega * (2.0 * unit(rng) - 1.0);
  b.amplitude = std::polar(0.5 + unit(rng), 2.0 * kPi * unit(rng));
  return b;
}

}  // namespace sparsepdo
