#pragma once

#include <Eigen/Dense>
#include <complex>

// Uniform periodic-box grids on [-L,L]^N (N = 1 or 2), real-valued fields,
// and the spectral machinery built on them.
//
// Normalization (fixed once, used everywhere): the forward transform returns
//
//   u_hat(m) = (2L)^{N/2} / n^N * sum_j u(x_j) exp(-i k_m . x_j),
//
// with x_j = -L + j h, h = 2L/n, and k_m = pi m / L for m in [-n/2, n/2).
// This is the unitary convention against the physical measure:
// integrate(u * v) == sum_m u_hat(m) conj(v_hat(m)) (Plancherel), a constant
// field c has all its mass on the zero mode with value c (2L)^{N/2}, and
// forward followed by inverse is the identity.

namespace fchoq {

using Array = Eigen::ArrayXd;
using CArray = Eigen::ArrayXcd;
using Point = Eigen::VectorXd;

struct GridSpec {
  int dim = 1;
  double half_length = 0.0;
  int n = 0;  // points per axis, even

  double spacing() const { return 2.0 * half_length / n; }
  Eigen::Index size() const {
    return dim == 1 ? Eigen::Index(n) : Eigen::Index(n) * n;
  }
  // coordinate of sample j along one axis
  double coord(int j) const { return -half_length + j * spacing(); }
  // physical location of a flat (row-major) index
  Point point(Eigen::Index flat) const;
  // per-axis wavenumbers pi*m/L in FFT index order (m = p for p < n/2, p-n after)
  Array axis_freqs() const;

  bool operator==(const GridSpec& o) const {
    return dim == o.dim && half_length == o.half_length && n == o.n;
  }
};

GridSpec make_grid(int dim, double half_length, int points_per_axis);

struct Field {
  GridSpec grid;
  Array values;
};

Field make_field(const GridSpec& g, Array values);
Field zero_field(const GridSpec& g);

// sample f(x) at every grid point; F is callable on a Point
template <class F>
Field sample_field(const GridSpec& g, F&& f) {
  Array v(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) v[i] = f(g.point(i));
  return Field{g, std::move(v)};
}

CArray spectral_forward(const Field& u);
Field spectral_inverse(const GridSpec& g, const CArray& coeffs);

// |k|^2 at each flat spectral index
Array freq_sq(const GridSpec& g);

double integrate(const Field& u);
double inner(const Field& u, const Field& v);  // h^N sum(u v)
double l2_norm(const Field& u);
double linf_norm(const Field& u);

struct ArgmaxResult {
  Point point;
  double value = 0.0;
  Eigen::Index flat_index = 0;
};
// grid point attaining the maximum; ties broken by lowest flat index
ArgmaxResult argmax_point(const Field& u);

// fraction of the L2 mass within ring_cells*h of the box boundary
double boundary_mass_rel(const Field& u, int ring_cells = 4);

// band-limited (trigonometric) evaluation of u at arbitrary physical points,
// one point per row of pts; exact for fields without Nyquist content
Array interpolate_trig(const Field& u, const Eigen::MatrixXd& pts);

// circular shift by whole grid cells per axis (used to recenter fields)
Field circular_shift(const Field& u, const Eigen::VectorXi& cells);

namespace detail {
// plain DFT on a row-major complex array over a dim-dimensional cube of side
// n; forward is unnormalized, inverse carries the 1/n^dim factor
void fftn(CArray& data, int n, int dim, bool forward);
}  // namespace detail

}  // namespace fchoq
