#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fchoq/solver.hpp"
#include "test_helpers.hpp"

#include <cmath>

using namespace fchoq;
using fchoq::testing::smooth_bump;
using fchoq::testing::standard_config;

TEST_CASE("preconditioner: diagonal action and self-adjointness") {
  const ModelConfig cfg = standard_config(64);

  CHECK(precondition(zero_field(cfg.grid), cfg).values.abs().maxCoeff() == 0.0);

  const Field mode = sample_field(
      cfg.grid, [](const Point& x) { return std::cos(M_PI * x[0] / 12.0); });
  const Field out = precondition(mode, cfg);
  const double lam = std::pow(cfg.eps, 2.0 * cfg.s) *
                         std::pow(M_PI / 12.0, 2.0 * cfg.s) +
                     cfg.v0;
  CHECK((out.values - mode.values / lam).abs().maxCoeff() < 1e-12);

  std::mt19937_64 rng(67);
  const Field r = fchoq::testing::random_field(cfg.grid, rng);
  const Field w = fchoq::testing::random_field(cfg.grid, rng);
  const double a = inner(precondition(r, cfg), w);
  const double b = inner(r, precondition(w, cfg));
  CHECK(std::abs(a - b) < 1e-12 * std::max(1.0, std::abs(a)));
}

TEST_CASE("autonomous ground state: convergence, certificates, symmetry") {
  const GridSpec g = make_grid(1, 10.0, 128);
  SolverOptions opts;
  const AutonomousResult aut =
      autonomous_ground_state(1.0, 0.4, 0.5, 3.0, g, opts);

  REQUIRE(aut.result.converged);
  CHECK(aut.result.cert.grad_norm_rel <= opts.tol_grad);
  CHECK(aut.result.cert.nehari_residual_rel <= opts.tol_nehari);
  CHECK(aut.c_v0 > 0.0);

  // argmax recentered to the origin
  CHECK(aut.result.cert.argmax_pt[0] == 0.0);

  // strictly positive on the grid
  CHECK(aut.w.values.minCoeff() > 0.0);

  // evenness of the ground state is expected but not guaranteed for general
  // nonlinearities; keep it at warning level
  Array mirrored(g.size());
  for (int j = 0; j < g.n; ++j) mirrored[j] = aut.w.values[(g.n - j) % g.n];
  const Field diff{g, aut.w.values - mirrored};
  WARN(l2_norm(diff) / l2_norm(aut.w) <= 1e-6);

  // energy identity on the manifold for the pure power
  const ModelConfig cfg = make_autonomous_config(1.0, 0.4, 0.5, 3.0, g);
  const RieszKernel kernel = build_riesz_kernel(g, cfg.mu);
  const double quad = quad_form(aut.w, cfg);
  CHECK(std::abs(aut.c_v0 - (0.5 - 0.5 / cfg.q) * quad) <=
        1e-8 * std::abs(aut.c_v0));

  SUBCASE("seed independence within the cluster radius") {
    const AutonomousResult aut2 =
        autonomous_ground_state(1.0, 0.4, 0.5, 3.0, g, opts, 2.0);
    REQUIRE(aut2.result.converged);
    const Field d{g, aut.w.values - aut2.w.values};
    CHECK(l2_norm(d) / l2_norm(aut.w) <= opts.cluster_radius);
    CHECK(std::abs(aut.c_v0 - aut2.c_v0) <= 1e-6 * std::abs(aut.c_v0));
  }
}

TEST_CASE("dead seeds are rejected") {
  const ModelConfig cfg = standard_config(64);
  const RieszKernel kernel = build_riesz_kernel(cfg.grid, cfg.mu);
  SolverOptions opts;
  const Field dead{cfg.grid, -Array::Ones(cfg.grid.size())};
  CHECK_THROWS_AS(minimize_ground_state(dead, cfg, kernel, opts), SolverError);
  CHECK_THROWS_AS(
      minimize_ground_state(zero_field(cfg.grid), cfg, kernel, opts),
      SolverError);
}

TEST_CASE("penalized solve: descent, certificate closure, scale robustness") {
  const ModelConfig cfg = standard_config(256);
  const RieszKernel kernel = build_riesz_kernel(cfg.grid, cfg.mu);
  SolverOptions opts;
  const Field seed = smooth_bump(cfg.grid, 2.0, 0.4, 1.0);

  const SolveResult res = minimize_ground_state(seed, cfg, kernel, opts);
  REQUIRE(res.converged);
  CHECK(res.cert.grad_norm_rel <= opts.tol_grad);
  CHECK(res.cert.nehari_residual_rel <= opts.tol_nehari);
  CHECK(res.cert.positive);
  CHECK((res.u.values >= 0.0).all());

  SUBCASE("accepted energies decrease strictly") {
    for (size_t i = 1; i < res.energy_history.size(); ++i)
      CHECK(res.energy_history[i] < res.energy_history[i - 1]);
  }
  SUBCASE("stored certificates recompute bit-for-bit") {
    const Certificates again = verify_solution(res, cfg, kernel);
    CHECK(again.energy.total == res.cert.energy.total);
    CHECK(again.energy.rescaled_total == res.cert.energy.rescaled_total);
    CHECK(again.grad_norm_rel == res.cert.grad_norm_rel);
    CHECK(again.nehari_residual_rel == res.cert.nehari_residual_rel);
    CHECK(again.linf == res.cert.linf);
    CHECK(again.riesz_sup == res.cert.riesz_sup);
    CHECK(again.sup_outside_lambda == res.cert.sup_outside_lambda);
    CHECK(again.boundary_mass == res.cert.boundary_mass);
    CHECK(again.riesz_certificate == res.cert.riesz_certificate);
    CHECK(again.original_certificate == res.cert.original_certificate);
    CHECK(again.positive == res.cert.positive);
    CHECK(again.nontrivial == res.cert.nontrivial);
    CHECK(again.argmax_pt == res.cert.argmax_pt);
    CHECK(again.barycenter_pt == res.cert.barycenter_pt);
  }
  SUBCASE("solution energy lower-bounds any single projected seed") {
    const RieszKernel& k = kernel;
    const double seed_level =
        j_eps(nehari_project(seed, cfg, k).projected, cfg, k).total;
    CHECK(res.cert.energy.total <= seed_level + 1e-12);
  }
  SUBCASE("rescaled seeds land on the same solution") {
    for (double c : {0.5, 2.0}) {
      const Field scaled{cfg.grid, c * seed.values};
      const SolveResult r2 = minimize_ground_state(scaled, cfg, kernel, opts);
      REQUIRE(r2.converged);
      const Field d{cfg.grid, r2.u.values - res.u.values};
      CHECK(l2_norm(d) / l2_norm(res.u) <= 1e-9);
    }
  }
}

TEST_CASE("concentrating seed: support, peak location, manifold membership") {
  const ModelConfig cfg = standard_config(256, 0.25);
  const RieszKernel kernel = build_riesz_kernel(cfg.grid, cfg.mu);
  SolverOptions opts;
  const GridSpec agrid = make_grid(1, 12.0, 256);
  const AutonomousResult aut =
      autonomous_ground_state(1.0, 0.4, 0.5, 3.0, agrid, opts);
  REQUIRE(aut.result.converged);

  const Point y = cfg.potential.wells[1];  // +2
  const Field seed = build_concentrating_seed(y, aut.w, cfg, kernel);

  // vanishes at distance >= delta from y
  for (Eigen::Index i = 0; i < cfg.grid.size(); ++i)
    if ((cfg.grid.point(i) - y).norm() >= cfg.delta)
      CHECK(seed.values[i] == 0.0);

  // peak within one cell of the well for eps <= delta/4
  const ArgmaxResult am = argmax_point(seed);
  CHECK(std::abs(am.point[0] - y[0]) <= cfg.grid.spacing());

  // projection already applied
  const double quad = quad_form(seed, cfg);
  CHECK(std::abs(nehari_h_prime(1.0, seed, cfg, kernel)) <= 1e-9 * quad);

  // a site outside M_delta is rejected
  Point bad(1);
  bad[0] = 0.0;
  CHECK_THROWS_AS(build_concentrating_seed(bad, aut.w, cfg, kernel),
                  ConfigError);
}

TEST_CASE("barycenter: symmetry, localization, truncation, zero field") {
  const GridSpec g = make_grid(1, 10.0, 256);

  const Field even = smooth_bump(g, 0.0, 2.0, 1.0);
  CHECK(std::abs(barycenter(even, 3.0)[0]) < 1e-10);

  const Field bump = smooth_bump(g, 1.5, 0.05, 1.0);
  CHECK(std::abs(barycenter(bump, 3.0)[0] - 1.5) <= g.spacing());

  // direct weighted-sum oracle on a handcrafted two-site field
  Array two = Array::Zero(g.size());
  two[100] = 1.0;
  two[140] = 2.0;
  const double x1 = g.coord(100), x2 = g.coord(140);
  const double expect = (x1 * 1.0 + x2 * 4.0) / 5.0;
  CHECK(barycenter(Field{g, two}, 9.0)[0] == doctest::Approx(expect));

  // mass beyond rho is pulled back to the sphere of radius rho
  const Field far = smooth_bump(g, 8.0, 0.1, 1.0);
  CHECK(barycenter(far, 3.0)[0] <= 3.0 + 1e-12);
  CHECK(barycenter(far, 3.0)[0] >= 2.9);

  CHECK_THROWS_AS(barycenter(zero_field(g), 3.0), std::invalid_argument);
}

TEST_CASE("multistart: two wells give two solutions, duplicates collapse") {
  const ModelConfig cfg = standard_config(256, 0.25);
  const RieszKernel kernel = build_riesz_kernel(cfg.grid, cfg.mu);
  SolverOptions opts;
  const GridSpec agrid = make_grid(1, 12.0, 256);
  const AutonomousResult aut =
      autonomous_ground_state(1.0, 0.4, 0.5, 3.0, agrid, opts);

  const MultistartResult multi =
      multistart_search(cfg, kernel, opts, aut.w, 1);
  CHECK(multi.expected_count == 2);
  REQUIRE(multi.distinct.size() == 2);
  for (const std::string& err : multi.seed_errors) CHECK(err.empty());

  // barycenters straddle the two wells
  std::vector<double> bys;
  for (const SolveResult& r : multi.distinct)
    bys.push_back(r.cert.barycenter_pt[0]);
  std::sort(bys.begin(), bys.end());
  CHECK(std::abs(bys[0] + 2.0) <= cfg.delta);
  CHECK(std::abs(bys[1] - 2.0) <= cfg.delta);

  SUBCASE("threaded execution returns the same distinct set") {
    const MultistartResult multi2 =
        multistart_search(cfg, kernel, opts, aut.w, 2);
    REQUIRE(multi2.distinct.size() == 2);
    for (size_t i = 0; i < 2; ++i) {
      const Field d{cfg.grid, multi2.distinct[i].u.values -
                                   multi.distinct[i].u.values};
      CHECK(l2_norm(d) == 0.0);
    }
  }
  SUBCASE("rescaled energies sit above the autonomous level") {
    // matched discretization: same box, comparable resolution in the
    // rescaled variable
    for (const SolveResult& r : multi.distinct)
      CHECK(r.cert.energy.rescaled_total >= 0.95 * aut.c_v0);
  }
  SUBCASE("duplicate wells deduplicate to one representative") {
    ModelConfig dup = standard_config(256, 0.25);
    dup.validated = false;
    dup.potential.wells = {cfg.potential.wells[1], cfg.potential.wells[1]};
    const ModelConfig dcfg = validate_config(std::move(dup));
    const RieszKernel dk = build_riesz_kernel(dcfg.grid, dcfg.mu);
    const MultistartResult m2 = multistart_search(dcfg, dk, opts, aut.w, 1);
    CHECK(m2.expected_count == 2);
    CHECK(m2.distinct.size() == 1);
  }
  SUBCASE("a single well yields exactly one solution") {
    ModelConfig one = standard_config(256, 0.25);
    one.validated = false;
    one.potential.wells = {cfg.potential.wells[1]};
    const ModelConfig ocfg = validate_config(std::move(one));
    const RieszKernel ok = build_riesz_kernel(ocfg.grid, ocfg.mu);
    const MultistartResult m1 = multistart_search(ocfg, ok, opts, aut.w, 1);
    CHECK(m1.expected_count == 1);
    CHECK(m1.distinct.size() == 1);
  }
  SUBCASE("projected seed energies upper-bound the optimized level") {
    const double level = multi.distinct.front().cert.energy.total;
    for (const Point& y : cfg.potential.wells) {
      const Field phi = build_concentrating_seed(y, aut.w, cfg, kernel);
      CHECK(level <= j_eps(phi, cfg, kernel).total + 1e-12);
    }
    const Field wide = smooth_bump(cfg.grid, 2.0, 1.5, 0.7);
    const double wide_level =
        j_eps(nehari_project(wide, cfg, kernel).projected, cfg, kernel).total;
    CHECK(level <= wide_level + 1e-12);
  }
}

TEST_CASE("2D autonomous ground state at desk scale") {
  const GridSpec g = make_grid(2, 6.0, 32);
  SolverOptions opts;
  opts.tol_grad = 1e-6;
  const AutonomousResult aut =
      autonomous_ground_state(1.0, 0.8, 1.0, 3.0, g, opts);
  REQUIRE(aut.result.converged);
  CHECK(aut.c_v0 > 0.0);
  CHECK(aut.w.values.minCoeff() > 0.0);
  CHECK(aut.result.cert.argmax_pt.norm() == 0.0);
  // on-manifold energy identity holds in 2D as well
  const ModelConfig cfg = make_autonomous_config(1.0, 0.8, 1.0, 3.0, g);
  const double quad = quad_form(aut.w, cfg);
  CHECK(std::abs(aut.c_v0 - (0.5 - 0.5 / 3.0) * quad) <= 1e-7 * aut.c_v0);
}

TEST_CASE("verify_solution rejects handcrafted violations") {
  const ModelConfig cfg = standard_config(256, 0.25);
  const RieszKernel kernel = build_riesz_kernel(cfg.grid, cfg.mu);

  SUBCASE("mass above the threshold outside Lambda") {
    const Field bad = smooth_bump(cfg.grid, 6.0, 0.5, 5.0 * cfg.pen.a);
    SolveResult res;
    res.u = bad;
    const Certificates c = verify_solution(res, cfg, kernel);
    CHECK(!c.original_certificate);
    CHECK(c.sup_outside_lambda > cfg.pen.a);
  }
  SUBCASE("zero field is no solution") {
    SolveResult res;
    res.u = zero_field(cfg.grid);
    const Certificates c = verify_solution(res, cfg, kernel);
    CHECK(!c.nontrivial);
  }
}
