#include "fchoq/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace fchoq {

Field precondition(const Field& r, const ModelConfig& cfg) {
  CArray coeffs = spectral_forward(r);
  const Array k2 = freq_sq(r.grid);
  const double e2s = std::pow(cfg.eps, 2.0 * cfg.s);
  for (Eigen::Index i = 0; i < coeffs.size(); ++i)
    coeffs[i] /= e2s * std::pow(k2[i], cfg.s) + cfg.v0;
  return spectral_inverse(r.grid, coeffs);
}

Certificates compute_certificates(const Field& u, const ModelConfig& cfg,
                                  const RieszKernel& kernel) {
  Certificates c;
  c.energy = j_eps(u, cfg, kernel);
  const double un = l2_norm(u);
  c.nontrivial = un > 0.0;

  const Field grad = grad_j(u, cfg, kernel);
  c.grad_norm_rel = c.nontrivial ? l2_norm(grad) / un : l2_norm(grad);

  const double quad = quad_form(u, cfg);
  c.nehari_residual_rel =
      quad > 0.0 ? std::abs(nehari_h_prime(1.0, u, cfg, kernel)) / quad : 0.0;

  const ArgmaxResult am = argmax_point(u);
  c.argmax_pt = am.point;
  c.argmax_value = am.value;
  c.v_at_argmax = potential_value(cfg.potential, am.point);

  c.linf = linf_norm(u);
  c.min_value = u.values.minCoeff();
  c.positive = c.min_value >= 0.0;

  Array g, big_g;
  eval_g(u, cfg, g, big_g);
  const Field conv = riesz_convolve(Field{u.grid, std::move(big_g)}, kernel);
  c.riesz_sup =
      std::pow(cfg.eps, cfg.mu - cfg.grid.dim) * conv.values.abs().maxCoeff();
  c.riesz_certificate = c.riesz_sup / cfg.pen.ell < 0.5;

  c.sup_outside_lambda = 0.0;
  if (!cfg.autonomous) {
    for (Eigen::Index i = 0; i < u.values.size(); ++i)
      if (cfg.chi_samples[i] == 0.0)
        c.sup_outside_lambda = std::max(c.sup_outside_lambda, u.values[i]);
  }
  c.original_certificate = c.sup_outside_lambda < cfg.pen.a;

  c.boundary_mass = boundary_mass_rel(u);
  c.boundary_ok = c.boundary_mass <= 1e-6;

  if (c.nontrivial)
    c.barycenter_pt = barycenter(u, cfg.rho);
  else
    c.barycenter_pt = Point::Zero(cfg.grid.dim);
  return c;
}

SolveResult minimize_ground_state(const Field& seed, const ModelConfig& cfg,
                                  const RieszKernel& kernel,
                                  const SolverOptions& opts) {
  if (seed.values.maxCoeff() <= 0.0)
    throw SolverError("minimize_ground_state: dead seed (no positive part)");

  Field u{seed.grid, seed.values.max(0.0)};
  u = nehari_project(u, cfg, kernel).projected;
  double energy = j_eps(u, cfg, kernel).total;

  SolveResult out;
  out.converged = false;

  // Armijo phase state
  double alpha_init = opts.step0;
  Array prev_u, prev_dir;

  // fixed-step phase state: once the certifiable energy decrease falls below
  // the energy's roundoff floor, energy comparisons are noise and the
  // iteration continues as damped projected descent on the gradient norm,
  // reverting to the best-seen iterate whenever it starts to diverge
  bool polish = false;
  double alpha_polish = 0.0;
  Array best_u;
  double best_gn = std::numeric_limits<double>::infinity();
  int plateau = 0;
  int improving = 0;

  int iter = 0;
  int clip_rounds = 0;
  for (; iter < opts.max_iter; ++iter) {
    const Field grad = grad_j(u, cfg, kernel);
    const double gn = l2_norm(grad) / l2_norm(u);
    if (gn <= opts.tol_grad) {
      // negative excursions are energetically dead; drop them before
      // declaring convergence so the reported field is nonnegative. If the
      // discrete critical point carries material negative ringing (coarse
      // grids), clipping keeps knocking the iterate off tolerance; give up
      // honestly instead of cycling.
      if ((u.values < 0.0).any()) {
        if (++clip_rounds > 3) {
          out.message =
              "nonnegativity clip prevents convergence at this resolution";
          break;
        }
        u.values = u.values.max(0.0);
        u = nehari_project(u, cfg, kernel).projected;
        energy = j_eps(u, cfg, kernel).total;
        continue;
      }
      out.converged = true;
      break;
    }

    if (polish) {
      if (gn < best_gn) {
        best_gn = gn;
        best_u = u.values;
        plateau = 0;
        if (++improving >= 8) {
          alpha_polish = std::min(1.4 * alpha_polish, opts.step0);
          improving = 0;
        }
      } else if (gn > 1.5 * best_gn) {
        improving = 0;
        u.values = best_u;
        alpha_polish *= 0.5;
        plateau = 0;
        if (alpha_polish < 1e-6 * opts.step0) {
          out.message = "gradient floor reached";
          break;
        }
        continue;
      } else if (++plateau >= 10) {
        alpha_polish *= 0.5;
        plateau = 0;
        improving = 0;
        if (alpha_polish < 1e-6 * opts.step0) {
          out.message = "gradient floor reached";
          break;
        }
      }
      if (opts.verbose > 0 && iter % opts.verbose == 0)
        std::fprintf(stderr,
                     "    it %5d  gn %.3e  e %.12e  alpha %.3e polish\n", iter,
                     gn, energy, alpha_polish);
      const Field dir = precondition(grad, cfg);
      Array cand = u.values - alpha_polish * dir.values;
      if (cand.maxCoeff() <= 0.0) {
        out.message = "polish step lost positivity";
        break;
      }
      try {
        u = nehari_project(Field{u.grid, std::move(cand)}, cfg, kernel)
                .projected;
      } catch (const NehariError&) {
        out.message = "nehari projection failed during polish";
        break;
      }
      continue;
    }

    const Field dir = precondition(grad, cfg);
    const double slope = inner(grad, dir);
    if (!(slope > 0.0)) {
      out.message = "non-descent direction (gradient at noise floor)";
      break;
    }

    // Barzilai-Borwein proposal for the first trial step; Armijo below keeps
    // the accepted energies monotone
    double alpha = alpha_init;
    if (prev_u.size() == u.values.size()) {
      const Array sdiff = u.values - prev_u;
      const Array ydiff = dir.values - prev_dir;
      const double sy = (sdiff * ydiff).sum();
      if (sy > 0.0) {
        const double bb = sdiff.square().sum() / sy;
        if (std::isfinite(bb) && bb > 0.0)
          alpha = std::clamp(bb, 1e-3 * opts.step0, 1e3 * opts.step0);
      }
    }
    prev_u = u.values;
    prev_dir = dir.values;

    bool accepted = false;
    Field next = u;
    double next_energy = energy;
    while (alpha > 1e-18 * opts.step0) {
      Array cand = u.values - alpha * dir.values;
      if (cand.maxCoeff() > 0.0) {
        bool ok = true;
        NehariProjection p;
        try {
          p = nehari_project(Field{u.grid, std::move(cand)}, cfg, kernel);
        } catch (const NehariError&) {
          ok = false;
        }
        if (ok) {
          const double e_trial = j_eps(p.projected, cfg, kernel).total;
          if (e_trial <= energy - opts.armijo_c * alpha * slope) {
            next = std::move(p.projected);
            next_energy = e_trial;
            accepted = true;
            break;
          }
        }
      }
      alpha *= opts.armijo_shrink;
    }
    if (opts.verbose > 0 && iter % opts.verbose == 0)
      std::fprintf(stderr, "    it %5d  gn %.3e  e %.12e  alpha %.3e%s\n",
                   iter, gn, energy, alpha, accepted ? "" : "  STAGNATED");
    if (!accepted) {
      out.message = "line search stagnated";
      break;
    }
    const double decrease = energy - next_energy;
    u = std::move(next);
    energy = next_energy;
    out.energy_history.push_back(energy);
    alpha_init = std::clamp(2.0 * alpha, 1e-3 * opts.step0, 16.0 * opts.step0);
    if (decrease < 1e-14 * std::max(std::abs(energy), 1.0)) {
      polish = true;
      alpha_polish = std::min(alpha, opts.step0);
      best_gn = std::numeric_limits<double>::infinity();
    }
  }
  if (iter == opts.max_iter) out.message = "max_iter exceeded";

  // an unconverged polish still reports its best iterate
  if (!out.converged && best_u.size() == u.values.size() && best_gn <
      l2_norm(grad_j(u, cfg, kernel)) / l2_norm(u))
    u.values = best_u;

  if (!out.converged && (u.values < 0.0).any()) {
    u.values = u.values.max(0.0);
    u = nehari_project(u, cfg, kernel).projected;
  }

  out.u = std::move(u);
  out.iterations = iter;
  out.cert = compute_certificates(out.u, cfg, kernel);
  if (out.converged)
    out.converged = out.cert.nehari_residual_rel <= opts.tol_nehari;
  return out;
}

Field gaussian_seed(const GridSpec& grid, const Point& center, double width) {
  return sample_field(grid, [&](const Point& x) {
    return std::exp(-(x - center).squaredNorm() / (width * width));
  });
}

AutonomousResult autonomous_ground_state(double v0, double s, double mu,
                                         double q, const GridSpec& grid,
                                         const SolverOptions& opts,
                                         double seed_width) {
  const ModelConfig cfg = make_autonomous_config(v0, s, mu, q, grid);
  const RieszKernel kernel = build_riesz_kernel(grid, mu);
  const Field seed = gaussian_seed(grid, Point::Zero(grid.dim), seed_width);
  SolveResult res = minimize_ground_state(seed, cfg, kernel, opts);

  // break translation invariance deterministically: argmax to the origin
  const ArgmaxResult am = argmax_point(res.u);
  Eigen::VectorXi cells(grid.dim);
  if (grid.dim == 1) {
    cells[0] = grid.n / 2 - static_cast<int>(am.flat_index);
  } else {
    cells[0] = grid.n / 2 - static_cast<int>(am.flat_index / grid.n);
    cells[1] = grid.n / 2 - static_cast<int>(am.flat_index % grid.n);
  }
  res.u = circular_shift(res.u, cells);
  res.cert = compute_certificates(res.u, cfg, kernel);

  AutonomousResult out;
  out.c_v0 = res.cert.energy.total;
  out.w = res.u;
  out.result = std::move(res);
  return out;
}

namespace {

double cutoff_eta(double t, double delta) {
  if (t <= 0.5 * delta) return 1.0;
  if (t >= delta) return 0.0;
  return 0.5 * (1.0 + std::cos(M_PI * (2.0 * t / delta - 1.0)));
}

}  // namespace

Field build_concentrating_seed(const Point& y, const Field& w,
                               const ModelConfig& cfg,
                               const RieszKernel& kernel) {
  if (cfg.autonomous)
    throw std::invalid_argument(
        "build_concentrating_seed: needs a potential with wells");
  double dist = std::numeric_limits<double>::infinity();
  for (const Point& well : cfg.potential.wells)
    dist = std::min(dist, (y - well).norm());
  if (!(dist <= cfg.delta))
    throw ConfigError("build_concentrating_seed: y lies outside M_delta");

  const GridSpec& g = cfg.grid;
  std::vector<Eigen::Index> support;
  std::vector<double> eta;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const double t = (g.point(i) - y).norm();
    if (t < cfg.delta) {
      support.push_back(i);
      eta.push_back(cutoff_eta(t, cfg.delta));
    }
  }
  Eigen::MatrixXd pts(support.size(), g.dim);
  for (size_t r = 0; r < support.size(); ++r) {
    const Point z = (g.point(support[r]) - y) / cfg.eps;
    if (z.cwiseAbs().maxCoeff() > w.grid.half_length)
      throw ConfigError(
          "build_concentrating_seed: autonomous grid too small for delta/eps");
    pts.row(r) = z.transpose();
  }
  const Array wz = interpolate_trig(w, pts);

  Array vals = Array::Zero(g.size());
  for (size_t r = 0; r < support.size(); ++r)
    vals[support[r]] = eta[r] * wz[r];
  return nehari_project(Field{g, std::move(vals)}, cfg, kernel).projected;
}

Point barycenter(const Field& u, double rho) {
  const double total = u.values.square().sum();
  if (!(total > 0.0))
    throw std::invalid_argument("barycenter: field is identically zero");
  Point acc = Point::Zero(u.grid.dim);
  for (Eigen::Index i = 0; i < u.values.size(); ++i) {
    const double m = u.values[i] * u.values[i];
    if (m == 0.0) continue;
    Point x = u.grid.point(i);
    const double r = x.norm();
    if (r > rho) x *= rho / r;
    acc += m * x;
  }
  return acc / total;
}

MultistartResult multistart_search(const ModelConfig& cfg,
                                   const RieszKernel& kernel,
                                   const SolverOptions& opts, const Field& w,
                                   int threads) {
  const int k = static_cast<int>(cfg.potential.wells.size());
  MultistartResult out;
  out.expected_count = cfg.expected_solution_count;
  std::vector<std::optional<SolveResult>> slots(k);
  std::vector<std::string> errors(k);

  auto run_one = [&](int i) {
    try {
      const Field seed =
          build_concentrating_seed(cfg.potential.wells[i], w, cfg, kernel);
      SolveResult res = minimize_ground_state(seed, cfg, kernel, opts);
      res.seed_index = i;
      slots[i] = std::move(res);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  };

  if (threads <= 1 || k <= 1) {
    for (int i = 0; i < k; ++i) run_one(i);
  } else {
    std::atomic<int> counter{0};
    auto worker = [&]() {
      for (int i = counter.fetch_add(1); i < k; i = counter.fetch_add(1))
        run_one(i);
    };
    std::vector<std::thread> pool;
    const int m = std::min(threads, k);
    pool.reserve(m);
    for (int t = 0; t < m; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (int i = 0; i < k; ++i) {
    out.seed_errors.push_back(errors[i]);
    if (slots[i]) out.solves.push_back(std::move(*slots[i]));
  }

  // energy-sorted greedy clustering of the converged results
  std::vector<const SolveResult*> conv;
  for (const SolveResult& r : out.solves)
    if (r.converged) conv.push_back(&r);
  std::sort(conv.begin(), conv.end(), [](const SolveResult* a,
                                         const SolveResult* b) {
    if (a->cert.energy.total != b->cert.energy.total)
      return a->cert.energy.total < b->cert.energy.total;
    return a->seed_index < b->seed_index;
  });
  for (const SolveResult* r : conv) {
    bool fresh = true;
    for (const SolveResult& rep : out.distinct) {
      const Field diff{r->u.grid, r->u.values - rep.u.values};
      const double d =
          l2_norm(diff) / std::max(l2_norm(r->u), l2_norm(rep.u));
      if (d <= opts.cluster_radius) {
        fresh = false;
        break;
      }
    }
    if (fresh) out.distinct.push_back(*r);
  }
  return out;
}

Certificates verify_solution(const SolveResult& res, const ModelConfig& cfg,
                             const RieszKernel& kernel) {
  return compute_certificates(res.u, cfg, kernel);
}

}  // namespace fchoq
