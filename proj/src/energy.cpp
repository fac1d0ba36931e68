#include "fchoq/energy.hpp"

#include <cmath>

namespace fchoq {

namespace {

double eps_interaction_prefactor(const ModelConfig& cfg) {
  return std::pow(cfg.eps, cfg.mu - cfg.grid.dim);
}

// int (K * G(tu)) g(tu) u for fixed u, as a function of t
double interaction_pairing(double t, const Field& u, const ModelConfig& cfg,
                           const RieszKernel& kernel) {
  Field ut{u.grid, t * u.values};
  Array g, big_g;
  eval_g(ut, cfg, g, big_g);
  const Field big_g_field{u.grid, std::move(big_g)};
  const Field conv = riesz_convolve(big_g_field, kernel);
  const double hN = std::pow(u.grid.spacing(), u.grid.dim);
  return eps_interaction_prefactor(cfg) * hN *
         (conv.values * g * u.values).sum();
}

}  // namespace

double quad_form(const Field& u, const ModelConfig& cfg) {
  return norm_eps_sq(u, cfg);
}

double sigma_eps(const Field& u, const ModelConfig& cfg,
                 const RieszKernel& kernel) {
  Array g, big_g;
  eval_g(u, cfg, g, big_g);
  const Field big_g_field{u.grid, std::move(big_g)};
  return 0.5 * eps_interaction_prefactor(cfg) *
         riesz_energy(big_g_field, big_g_field, kernel);
}

EnergyBreakdown j_eps(const Field& u, const ModelConfig& cfg,
                      const RieszKernel& kernel) {
  EnergyBreakdown e;
  e.quad = 0.5 * quad_form(u, cfg);
  e.interaction = sigma_eps(u, cfg, kernel);
  e.total = e.quad - e.interaction;
  e.rescaled_total = std::pow(cfg.eps, -cfg.grid.dim) * e.total;
  return e;
}

Field grad_j(const Field& u, const ModelConfig& cfg, const RieszKernel& kernel) {
  Field lap = frac_laplacian(u, cfg.s, std::pow(cfg.eps, 2.0 * cfg.s));
  Array g, big_g;
  eval_g(u, cfg, g, big_g);
  const Field big_g_field{u.grid, std::move(big_g)};
  const Field conv = riesz_convolve(big_g_field, kernel);
  Array r = lap.values + cfg.v_samples * u.values -
            eps_interaction_prefactor(cfg) * conv.values * g;
  return Field{u.grid, std::move(r)};
}

double nehari_h_prime(double t, const Field& u, const ModelConfig& cfg,
                      const RieszKernel& kernel) {
  if (!(t > 0.0)) throw std::invalid_argument("nehari_h_prime: t must be > 0");
  return t * quad_form(u, cfg) - interaction_pairing(t, u, cfg, kernel);
}

NehariProjection nehari_project(const Field& u, const ModelConfig& cfg,
                                const RieszKernel& kernel) {
  if (u.values.maxCoeff() <= 0.0)
    throw NehariError("nehari_project: field has no positive part");
  // normalize along the ray so the search is scale free
  const double nrm = l2_norm(u);
  Field v{u.grid, u.values / nrm};
  const double quad = quad_form(v, cfg);
  auto hp = [&](double t) {
    return t * quad - interaction_pairing(t, v, cfg, kernel);
  };

  double lo = 1.0, hi = 1.0;
  double h1 = hp(1.0);
  if (h1 > 0.0) {
    double prev = 1.0;
    bool found = false;
    for (int i = 0; i < 60 && !found; ++i) {
      hi = prev * 4.0;
      if (hp(hi) < 0.0)
        found = true;
      else
        prev = hi;
    }
    if (!found)
      throw NehariError(
          "nehari_project: no sign change while growing the bracket (field too "
          "weak to reach the manifold on this grid)");
    lo = prev;
  } else if (h1 < 0.0) {
    double prev = 1.0;
    bool found = false;
    for (int i = 0; i < 60 && !found; ++i) {
      lo = prev / 4.0;
      if (hp(lo) > 0.0)
        found = true;
      else
        prev = lo;
    }
    if (!found)
      throw NehariError("nehari_project: no sign change while shrinking the "
                        "bracket");
    hi = prev;
  } else {
    lo = hi = 1.0;
  }

  double t = 0.5 * (lo + hi), res = 0.0;
  if (lo == hi) {
    t = lo;
    res = hp(t);
  } else {
    for (int i = 0; i < 80; ++i) {
      t = 0.5 * (lo + hi);
      res = hp(t);
      if (std::abs(res) <= 5e-11 * t * quad) break;
      if (res > 0.0)
        lo = t;
      else
        hi = t;
      if (hi - lo <= 1e-15 * hi) {
        t = 0.5 * (lo + hi);
        res = hp(t);
        break;
      }
    }
  }
  NehariProjection out;
  out.t = t / nrm;
  out.projected = Field{u.grid, t * v.values};
  // residual of the projected field at unit ray parameter, relative to its
  // quadratic form: h'_proj(1) = t h'_v(t), Q(proj) = t^2 Q(v)
  out.residual_rel = std::abs(res) / (t * quad);
  return out;
}

EnergyBreakdown j_autonomous(const Field& u, const ModelConfig& cfg,
                             const RieszKernel& kernel) {
  if (!cfg.autonomous)
    throw std::invalid_argument("j_autonomous: config is not autonomous");
  return j_eps(u, cfg, kernel);
}

}  // namespace fchoq
