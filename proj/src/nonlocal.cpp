#include "fchoq/nonlocal.hpp"

#include <cmath>
#include <stdexcept>
#include <functional>

namespace fchoq {

namespace {

void check_s(double s) {
  if (!(s > 0.0 && s < 1.0))
    throw std::invalid_argument("fractional order s must lie in (0,1)");
}

// adaptive Simpson on [a,b]
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double fa, double fm, double fb, double whole,
                        double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double tol) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace

Field frac_laplacian(const Field& u, double s, double scale) {
  check_s(s);
  if (!(scale > 0.0))
    throw std::invalid_argument("frac_laplacian: scale must be positive");
  CArray coeffs = spectral_forward(u);
  const Array k2 = freq_sq(u.grid);
  for (Eigen::Index i = 0; i < coeffs.size(); ++i)
    coeffs[i] *= scale * std::pow(k2[i], s);
  return spectral_inverse(u.grid, coeffs);
}

double frac_seminorm_sq(const Field& u, double s) {
  check_s(s);
  const CArray coeffs = spectral_forward(u);
  const Array k2 = freq_sq(u.grid);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < coeffs.size(); ++i)
    acc += std::pow(k2[i], s) * std::norm(coeffs[i]);
  return acc;
}

double riesz_origin_cell_average(int dim, double h, double mu) {
  if (dim == 1) {
    // (1/h) * 2 * int_0^{h/2} x^{-mu} dx
    return 2.0 / (h * (1.0 - mu)) * std::pow(0.5 * h, 1.0 - mu);
  }
  // polar decomposition of the square cell: by symmetry the integral is
  // 8/(2-mu) * (h/2)^{2-mu} * int_0^{pi/4} cos(theta)^{mu-2} dtheta
  const double ang = integrate_adaptive(
      [mu](double t) { return std::pow(std::cos(t), mu - 2.0); }, 0.0,
      0.25 * M_PI, 1e-14);
  return 8.0 / (2.0 - mu) * std::pow(0.5 * h, 2.0 - mu) * ang / (h * h);
}

RieszKernel build_riesz_kernel(const GridSpec& grid, double mu) {
  if (!(mu > 0.0) || !(mu < grid.dim))
    throw std::invalid_argument(
        "build_riesz_kernel: mu must lie in (0, N) for a locally integrable "
        "kernel");
  const int n2 = 2 * grid.n;
  const double h = grid.spacing();
  const Eigen::Index total =
      grid.dim == 1 ? Eigen::Index(n2) : Eigen::Index(n2) * n2;
  Array samples(total);
  const double origin = riesz_origin_cell_average(grid.dim, h, mu);
  auto disp = [n2](int p) { return p <= n2 / 2 ? p : p - n2; };
  if (grid.dim == 1) {
    for (int p = 0; p < n2; ++p) {
      const int d = disp(p);
      samples[p] = d == 0 ? origin : std::pow(std::abs(d) * h, -mu);
    }
  } else {
    for (int pa = 0; pa < n2; ++pa) {
      for (int pb = 0; pb < n2; ++pb) {
        const int da = disp(pa), db = disp(pb);
        const double r = h * std::hypot(double(da), double(db));
        samples[Eigen::Index(pa) * n2 + pb] =
            (da == 0 && db == 0) ? origin : std::pow(r, -mu);
      }
    }
  }
  CArray spectrum = samples.cast<std::complex<double>>();
  detail::fftn(spectrum, n2, grid.dim, true);
  return RieszKernel{grid, mu, origin, std::move(samples), std::move(spectrum)};
}

Field riesz_convolve(const Field& h_field, const RieszKernel& kernel) {
  const GridSpec& g = h_field.grid;
  if (!(g == kernel.grid))
    throw std::invalid_argument("riesz_convolve: grid mismatch");
  const int n = g.n, n2 = 2 * g.n;
  CArray pad = CArray::Zero(kernel.samples.size());
  if (g.dim == 1) {
    for (int j = 0; j < n; ++j) pad[j] = h_field.values[j];
  } else {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        pad[Eigen::Index(a) * n2 + b] = h_field.values[Eigen::Index(a) * n + b];
  }
  detail::fftn(pad, n2, g.dim, true);
  pad *= kernel.spectrum;
  detail::fftn(pad, n2, g.dim, false);
  const double hN = std::pow(g.spacing(), g.dim);
  Array out(g.size());
  if (g.dim == 1) {
    for (int j = 0; j < n; ++j) out[j] = hN * pad[j].real();
  } else {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        out[Eigen::Index(a) * n + b] = hN * pad[Eigen::Index(a) * n2 + b].real();
  }
  return Field{g, std::move(out)};
}

double riesz_energy(const Field& g_field, const Field& h_field,
                    const RieszKernel& kernel) {
  return inner(riesz_convolve(g_field, kernel), h_field);
}

}  // namespace fchoq
