#pragma once

#include "fchoq/grid.hpp"

// The two nonlocal operators of the problem: the fractional Laplacian
// (realized as the Fourier multiplier |k|^{2s} on the box) and the Riesz
// potential convolution |x|^{-mu} * h, computed as a free-space (zero-padded)
// convolution so the interaction does not wrap around the torus.

namespace fchoq {

// scale * (-Laplace)^s u via the multiplier scale*|k|^{2s}; the zero mode is
// annihilated
Field frac_laplacian(const Field& u, double s, double scale);

// sum over modes of |k|^{2s} |u_hat|^2; equals integrate(u * frac_laplacian(u, s, 1))
double frac_seminorm_sq(const Field& u, double s);

struct RieszKernel {
  GridSpec grid;
  double mu = 0.0;
  double cell_average_origin = 0.0;
  Array samples;    // |x|^{-mu} on the doubled grid, wraparound displacement order
  CArray spectrum;  // plain DFT of samples, cached for fast convolution
};

// exact average of |x|^{-mu} over the h-cell centered at the origin
// (closed form in 1D, adaptive polar quadrature in 2D)
double riesz_origin_cell_average(int dim, double h, double mu);

RieszKernel build_riesz_kernel(const GridSpec& grid, double mu);

// free-space convolution h^N sum_y K(x-y) h(y), output on the original grid
Field riesz_convolve(const Field& h_field, const RieszKernel& kernel);

// integrate(riesz_convolve(g_field) * h_field); symmetric in its arguments
double riesz_energy(const Field& g_field, const Field& h_field,
                    const RieszKernel& kernel);

}  // namespace fchoq
