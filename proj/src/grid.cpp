#include "fchoq/grid.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace fchoq {

GridSpec make_grid(int dim, double half_length, int points_per_axis) {
  if (dim != 1 && dim != 2)
    throw std::invalid_argument("make_grid: unsupported dim (must be 1 or 2)");
  if (!(half_length > 0.0) || !std::isfinite(half_length))
    throw std::invalid_argument("make_grid: half_length must be positive");
  if (points_per_axis < 8 || points_per_axis % 2 != 0)
    throw std::invalid_argument(
        "make_grid: points_per_axis must be even and >= 8");
  return GridSpec{dim, half_length, points_per_axis};
}

Point GridSpec::point(Eigen::Index flat) const {
  Point p(dim);
  if (dim == 1) {
    p[0] = coord(static_cast<int>(flat));
  } else {
    p[0] = coord(static_cast<int>(flat / n));
    p[1] = coord(static_cast<int>(flat % n));
  }
  return p;
}

Array GridSpec::axis_freqs() const {
  Array k(n);
  const double base = M_PI / half_length;
  for (int p = 0; p < n; ++p) {
    const int m = p < n / 2 ? p : p - n;
    k[p] = base * m;
  }
  return k;
}

Field make_field(const GridSpec& g, Array values) {
  if (values.size() != g.size())
    throw std::invalid_argument("make_field: value count does not match grid");
  if (!values.allFinite())
    throw std::invalid_argument("make_field: non-finite values");
  return Field{g, std::move(values)};
}

Field zero_field(const GridSpec& g) { return Field{g, Array::Zero(g.size())}; }

namespace detail {

void fftn(CArray& data, int n, int dim, bool forward) {
  thread_local Eigen::FFT<double> fft;
  std::vector<std::complex<double>> buf(n), out(n);
  if (dim == 1) {
    for (int j = 0; j < n; ++j) buf[j] = data[j];
    if (forward)
      fft.fwd(out, buf);
    else
      fft.inv(out, buf);
    for (int j = 0; j < n; ++j) data[j] = out[j];
    return;
  }
  // rows (contiguous), then columns
  for (int r = 0; r < n; ++r) {
    for (int j = 0; j < n; ++j) buf[j] = data[Eigen::Index(r) * n + j];
    if (forward)
      fft.fwd(out, buf);
    else
      fft.inv(out, buf);
    for (int j = 0; j < n; ++j) data[Eigen::Index(r) * n + j] = out[j];
  }
  for (int c = 0; c < n; ++c) {
    for (int j = 0; j < n; ++j) buf[j] = data[Eigen::Index(j) * n + c];
    if (forward)
      fft.fwd(out, buf);
    else
      fft.inv(out, buf);
    for (int j = 0; j < n; ++j) data[Eigen::Index(j) * n + c] = out[j];
  }
}

// parity of the sum of per-axis FFT indices; equals (-1)^(sum of m) for even n
inline double mode_sign(Eigen::Index flat, int n, int dim) {
  int s = 0;
  if (dim == 1) {
    s = static_cast<int>(flat) & 1;
  } else {
    s = (static_cast<int>(flat / n) + static_cast<int>(flat % n)) & 1;
  }
  return s ? -1.0 : 1.0;
}

}  // namespace detail

CArray spectral_forward(const Field& u) {
  const GridSpec& g = u.grid;
  CArray data = u.values.cast<std::complex<double>>();
  detail::fftn(data, g.n, g.dim, true);
  const double scale =
      std::pow(2.0 * g.half_length, 0.5 * g.dim) / std::pow(double(g.n), g.dim);
  for (Eigen::Index i = 0; i < data.size(); ++i)
    data[i] *= scale * detail::mode_sign(i, g.n, g.dim);
  return data;
}

Field spectral_inverse(const GridSpec& g, const CArray& coeffs) {
  if (coeffs.size() != g.size())
    throw std::invalid_argument("spectral_inverse: coefficient shape mismatch");
  CArray data(coeffs.size());
  const double scale =
      std::pow(double(g.n), g.dim) / std::pow(2.0 * g.half_length, 0.5 * g.dim);
  for (Eigen::Index i = 0; i < data.size(); ++i)
    data[i] = coeffs[i] * scale * detail::mode_sign(i, g.n, g.dim);
  detail::fftn(data, g.n, g.dim, false);
  return Field{g, data.real()};
}

Array freq_sq(const GridSpec& g) {
  const Array k = g.axis_freqs();
  if (g.dim == 1) return k.square();
  Array k2(g.size());
  for (int a = 0; a < g.n; ++a)
    for (int b = 0; b < g.n; ++b)
      k2[Eigen::Index(a) * g.n + b] = k[a] * k[a] + k[b] * k[b];
  return k2;
}

double integrate(const Field& u) {
  return std::pow(u.grid.spacing(), u.grid.dim) * u.values.sum();
}

double inner(const Field& u, const Field& v) {
  if (!(u.grid == v.grid)) throw std::invalid_argument("inner: grid mismatch");
  return std::pow(u.grid.spacing(), u.grid.dim) * (u.values * v.values).sum();
}

double l2_norm(const Field& u) { return std::sqrt(inner(u, u)); }

double linf_norm(const Field& u) { return u.values.abs().maxCoeff(); }

ArgmaxResult argmax_point(const Field& u) {
  Eigen::Index best = 0;
  double bv = u.values[0];
  for (Eigen::Index i = 1; i < u.values.size(); ++i) {
    if (u.values[i] > bv) {
      bv = u.values[i];
      best = i;
    }
  }
  return ArgmaxResult{u.grid.point(best), bv, best};
}

double boundary_mass_rel(const Field& u, int ring_cells) {
  const GridSpec& g = u.grid;
  const double h = g.spacing();
  const double cut = ring_cells * h;
  double band = 0.0, total = 0.0;
  for (Eigen::Index i = 0; i < u.values.size(); ++i) {
    const Point p = g.point(i);
    double dist = g.half_length - std::abs(p[0]);
    for (int a = 1; a < g.dim; ++a)
      dist = std::min(dist, g.half_length - std::abs(p[a]));
    const double m = u.values[i] * u.values[i];
    total += m;
    if (dist < cut) band += m;
  }
  return total > 0.0 ? band / total : 0.0;
}

Array interpolate_trig(const Field& u, const Eigen::MatrixXd& pts) {
  const GridSpec& g = u.grid;
  if (pts.cols() != g.dim)
    throw std::invalid_argument("interpolate_trig: point dim mismatch");
  const CArray coeffs = spectral_forward(u);
  const Array k = g.axis_freqs();
  const double scale = std::pow(2.0 * g.half_length, -0.5 * g.dim);
  Array out(pts.rows());
  if (g.dim == 1) {
    for (Eigen::Index r = 0; r < pts.rows(); ++r) {
      const double x = pts(r, 0);
      std::complex<double> acc = 0.0;
      for (int p = 0; p < g.n; ++p)
        acc += coeffs[p] * std::polar(1.0, k[p] * x);
      out[r] = scale * acc.real();
    }
    return out;
  }
  for (Eigen::Index r = 0; r < pts.rows(); ++r) {
    const double x0 = pts(r, 0), x1 = pts(r, 1);
    std::complex<double> acc = 0.0;
    for (int a = 0; a < g.n; ++a) {
      const std::complex<double> ph0 = std::polar(1.0, k[a] * x0);
      std::complex<double> row = 0.0;
      for (int b = 0; b < g.n; ++b)
        row += coeffs[Eigen::Index(a) * g.n + b] * std::polar(1.0, k[b] * x1);
      acc += ph0 * row;
    }
    out[r] = scale * acc.real();
  }
  return out;
}

Field circular_shift(const Field& u, const Eigen::VectorXi& cells) {
  const GridSpec& g = u.grid;
  Array out(u.values.size());
  auto wrap = [&](int j, int s) { return ((j - s) % g.n + g.n) % g.n; };
  if (g.dim == 1) {
    for (int j = 0; j < g.n; ++j) out[j] = u.values[wrap(j, cells[0])];
  } else {
    for (int a = 0; a < g.n; ++a)
      for (int b = 0; b < g.n; ++b)
        out[Eigen::Index(a) * g.n + b] =
            u.values[Eigen::Index(wrap(a, cells[0])) * g.n + wrap(b, cells[1])];
  }
  return Field{g, std::move(out)};
}

}  // namespace fchoq
