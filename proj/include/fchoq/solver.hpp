#pragma once

#include "fchoq/energy.hpp"

#include <optional>
#include <string>
#include <vector>

// Ground-state computation: preconditioned descent on the Nehari-projected
// energy, the autonomous (constant-potential) ground state, concentrating
// seeds built from it, the truncated barycenter, and the multistart
// multiplicity search. Every converged solve carries a recomputable
// certificate set.

namespace fchoq {

struct SolverOptions {
  double tol_grad = 1e-8;      // relative L2 gradient norm
  double tol_nehari = 1e-10;   // relative Nehari residual
  int max_iter = 5000;
  double armijo_c = 1e-4;
  double armijo_shrink = 0.5;
  double step0 = 1.0;
  double cluster_radius = 0.05;  // relative L2 distance for dedup
  int verbose = 0;               // > 0: progress every `verbose` iterations
};

struct Certificates {
  EnergyBreakdown energy;
  double grad_norm_rel = 0.0;
  double nehari_residual_rel = 0.0;
  Point argmax_pt;
  double argmax_value = 0.0;
  double v_at_argmax = 0.0;
  double linf = 0.0;
  double min_value = 0.0;
  double riesz_sup = 0.0;  // eps^{mu-N} ||K * G(u)||_inf
  double sup_outside_lambda = 0.0;
  double boundary_mass = 0.0;
  Point barycenter_pt;
  bool riesz_certificate = false;     // riesz_sup / ell < 1/2
  bool original_certificate = false;  // sup of u outside Lambda < a
  bool positive = false;
  bool nontrivial = false;
  bool boundary_ok = false;  // boundary_mass <= 1e-6
};

struct SolveResult {
  Field u;
  Certificates cert;
  int iterations = 0;
  bool converged = false;
  std::string message;
  int seed_index = -1;
  std::vector<double> energy_history;  // Armijo-accepted energies, decreasing
};

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// constant-coefficient surrogate metric: r_hat / (eps^{2s}|k|^{2s} + V0)
Field precondition(const Field& r, const ModelConfig& cfg);

// full certificate set recomputed from the field alone
Certificates compute_certificates(const Field& u, const ModelConfig& cfg,
                                  const RieszKernel& kernel);

SolveResult minimize_ground_state(const Field& seed, const ModelConfig& cfg,
                                  const RieszKernel& kernel,
                                  const SolverOptions& opts);

struct AutonomousResult {
  Field w;       // ground state, argmax recentered to the origin
  double c_v0 = 0.0;
  SolveResult result;
};

Field gaussian_seed(const GridSpec& grid, const Point& center, double width);

AutonomousResult autonomous_ground_state(double v0, double s, double mu,
                                         double q, const GridSpec& grid,
                                         const SolverOptions& opts,
                                         double seed_width = 1.0);

// eta(|x-y|) w((x-y)/eps) sampled by band-limited interpolation of w,
// then projected onto the Nehari manifold
Field build_concentrating_seed(const Point& y, const Field& w,
                               const ModelConfig& cfg,
                               const RieszKernel& kernel);

// u^2-weighted average of the rho-truncated identity map
Point barycenter(const Field& u, double rho);

struct MultistartResult {
  std::vector<SolveResult> solves;       // one entry per seed, input order
  std::vector<std::string> seed_errors;  // empty string when the solve ran
  std::vector<SolveResult> distinct;     // converged, deduped, energy-sorted
  int expected_count = 0;
};

MultistartResult multistart_search(const ModelConfig& cfg,
                                   const RieszKernel& kernel,
                                   const SolverOptions& opts, const Field& w,
                                   int threads = 1);

Certificates verify_solution(const SolveResult& res, const ModelConfig& cfg,
                             const RieszKernel& kernel);

}  // namespace fchoq
