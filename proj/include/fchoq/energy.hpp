#pragma once

#include "fchoq/model.hpp"
#include "fchoq/nonlocal.hpp"

// The penalized energy in original variables,
//
//   J(u) = 1/2 (eps^{2s} [u]_s^2 + int V u^2)
//        - 1/2 eps^{mu-N} int (K * G(.,u)) G(.,u),
//
// its L2 gradient, and the projection onto the Nehari manifold along rays.
// The rescaled functional of the eps-dependent problem equals eps^{-N} J.

namespace fchoq {

struct EnergyBreakdown {
  double quad = 0.0;         // 1/2 quadratic form
  double interaction = 0.0;  // 1/2 eps^{mu-N} riesz_energy(G, G)
  double total = 0.0;        // quad - interaction
  double rescaled_total = 0.0;
};

double quad_form(const Field& u, const ModelConfig& cfg);  // = norm_eps_sq

double sigma_eps(const Field& u, const ModelConfig& cfg,
                 const RieszKernel& kernel);

EnergyBreakdown j_eps(const Field& u, const ModelConfig& cfg,
                      const RieszKernel& kernel);

// L2 representative of dJ: eps^{2s} (-Lap)^s u + V u - eps^{mu-N} (K*G) g
Field grad_j(const Field& u, const ModelConfig& cfg, const RieszKernel& kernel);

// d/dt J(t u) = t Q(u) - eps^{mu-N} int (K*G(tu)) g(tu) u
double nehari_h_prime(double t, const Field& u, const ModelConfig& cfg,
                      const RieszKernel& kernel);

struct NehariProjection {
  double t = 0.0;
  Field projected;
  double residual_rel = 0.0;  // |h'(t)| relative to the quadratic form
};

struct NehariError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// unique t > 0 with d/dt J(t u) = 0, found by geometric bracketing and
// bisection (f is only continuous, so no derivative-based root finding)
NehariProjection nehari_project(const Field& u, const ModelConfig& cfg,
                                const RieszKernel& kernel);

// energy of the constant-potential problem; cfg must be autonomous
EnergyBreakdown j_autonomous(const Field& u, const ModelConfig& cfg,
                             const RieszKernel& kernel);

}  // namespace fchoq
