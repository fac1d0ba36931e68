// Acceptance suite: end-to-end checks of the solver against its contract, at
// the standard double-well scenario. Prints one PASS/FAIL line per criterion
// and exits with the number of failures. The heavy criteria share one sweep.
//
// Usage: acceptance [path-to-cli-binary]

#include "fchoq/config.hpp"
#include "fchoq/selftest.hpp"
#include "fchoq/sweep.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace fchoq;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
  std::printf("%s  %-24s %s\n", pass ? "PASS" : "FAIL", name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

LoadedConfig standard_loaded() {
  LoadedConfig out;
  ModelConfig m;
  m.grid = make_grid(1, 12.0, 1024);
  m.s = 0.4;
  m.mu = 0.5;
  m.q = 3.0;
  m.eps = 0.125;
  m.potential.family = PotentialFamily::product_well;
  m.potential.base = 1.0;
  m.potential.amplitude = 2.0;
  m.potential.sigma = 1.0;
  Point w1(1), w2(1);
  w1[0] = -2.0;
  w2[0] = 2.0;
  m.potential.wells = {w1, w2};
  m.lambda_region.shape = RegionShape::box;
  m.lambda_region.center = Point::Zero(1);
  m.lambda_region.extents = Point::Constant(1, 4.0);
  out.model = validate_config(std::move(m));
  out.sweep.eps_ladder = {0.5, 0.25, 0.125};
  out.sweep.grid_ladder = {1024, 2048, 4096};
  out.autonomous.half_length = 12.0;
  out.autonomous.points_per_axis = 1024;
  out.autonomous.seed_width = 1.0;
  return out;
}

// criteria 1-4: the oracle suite, split by topic
void run_oracle_criteria() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto results = run_selftest(20240801);
  const double elapsed = seconds_since(t0);

  auto subset_pass = [&](std::initializer_list<const char*> names,
                         std::string& detail) {
    bool pass = true;
    for (const char* want : names) {
      bool found = false;
      for (const auto& r : results) {
        if (r.name == want) {
          found = true;
          if (!r.pass) {
            pass = false;
            detail = r.name + ": " + r.detail;
          }
        }
      }
      if (!found) {
        pass = false;
        detail = std::string("missing check ") + want;
      }
    }
    return pass;
  };

  std::string detail;
  bool pass = subset_pass({"transform_roundtrip", "transform_dense_dft",
                           "plancherel", "transform_linear",
                           "frac_laplacian_dense_oracle",
                           "frac_laplacian_dense_oracle_2d",
                           "frac_laplacian_self_adjoint",
                           "seminorm_consistency",
                           "riesz_origin_cell_average",
                           "riesz_convolve_direct_sum",
                           "riesz_energy_symmetric_psd"},
                          detail) &&
              elapsed < 10.0;
  report("operator_oracles", pass,
         detail.empty() ? "dense DFT + direct sums, " + fmt(elapsed) + "s"
                        : detail);

  detail.clear();
  pass = subset_pass({"gradient_central_difference"}, detail) && elapsed < 10.0;
  report("gradient_check", pass,
         detail.empty() ? "10 random pairs vs central differences" : detail);

  detail.clear();
  pass = subset_pass({"nehari_closed_form"}, detail);
  report("nehari_closed_form", pass,
         detail.empty() ? "t_u, ray invariance, energy identity at 1e-9"
                        : detail);

  detail.clear();
  pass = subset_pass({"penalization_laws"}, detail);
  report("penalization_laws", pass,
         detail.empty() ? "(g3), g<=f, continuity, antiderivative" : detail);
}

AutonomousResult run_autonomous_criterion(const LoadedConfig& loaded) {
  const GridSpec agrid = make_grid(1, loaded.autonomous.half_length,
                                   loaded.autonomous.points_per_axis);
  SolverOptions opts = loaded.solver;
  const auto t0 = std::chrono::steady_clock::now();
  AutonomousResult a1 = autonomous_ground_state(1.0, 0.4, 0.5, 3.0, agrid,
                                                opts, 1.0);
  AutonomousResult a2 = autonomous_ground_state(1.0, 0.4, 0.5, 3.0, agrid,
                                                opts, 2.0);
  const double elapsed = seconds_since(t0);

  bool pass = a1.result.converged && a2.result.converged;
  std::string detail;
  if (!pass) detail = "solve unconverged";

  const Field diff{agrid, a1.w.values - a2.w.values};
  const double seed_dist = l2_norm(diff) / l2_norm(a1.w);
  if (seed_dist > 0.05) {
    pass = false;
    detail = "seed dependence " + fmt(seed_dist);
  }

  if (a1.w.values.minCoeff() <= 0.0) {
    pass = false;
    detail = "not strictly positive";
  }

  const ModelConfig acfg = make_autonomous_config(1.0, 0.4, 0.5, 3.0, agrid);
  const double quad = quad_form(a1.w, acfg);
  const double ident = (0.5 - 0.5 / acfg.q) * quad;
  const double coerc = std::abs(a1.c_v0 - ident) / std::abs(a1.c_v0);
  if (coerc > 1e-8) {
    pass = false;
    detail = "manifold energy identity off by " + fmt(coerc);
  }

  if (pass)
    detail = "c_v0 " + fmt(a1.c_v0) + ", seeds differ " + fmt(seed_dist) +
             ", identity " + fmt(coerc) + ", " + fmt(elapsed) + "s";
  report("autonomous_ground_state", pass, detail);
  return a1;
}

void run_csv_determinism(const std::string& cli) {
  if (cli.empty() || !fs::exists(cli)) {
    report("sweep_determinism", false, "cli binary path not provided");
    return;
  }
  const fs::path dir =
      fs::temp_directory_path() / "fchoq_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string cfg_path = (dir / "reduced.cfg").string();
  {
    std::ofstream cfg(cfg_path);
    cfg << "[grid]\ndim = 1\nhalf_length = 12.0\npoints_per_axis = 256\n"
        << "[model]\ns = 0.4\nmu = 0.5\nq = 3.0\neps = 0.25\n"
        << "[potential]\nwells = -2.0, 2.0\n"
        << "[lambda]\nextents = 4.0\n"
        << "[sweep]\neps_ladder = 0.5, 0.25\ngrid_ladder = 256, 512\n"
        << "[autonomous]\npoints_per_axis = 256\n";
  }
  auto run_once = [&](const std::string& out) {
    const std::string cmd = cli + " sweep --config " + cfg_path + " --out " +
                            out + " --allow-unconverged > /dev/null 2>&1";
    return std::system(cmd.c_str());
  };
  const std::string out1 = (dir / "run1").string();
  const std::string out2 = (dir / "run2").string();
  if (run_once(out1) != 0 || run_once(out2) != 0) {
    report("sweep_determinism", false, "cli sweep run failed");
    return;
  }
  auto read_wo_walltime = [](const std::string& path) {
    std::ifstream in(path);
    std::stringstream out;
    std::string line;
    while (std::getline(in, line)) {
      const size_t cut = line.rfind(',');
      out << line.substr(0, cut) << "\n";
    }
    return out.str();
  };
  const std::string a = read_wo_walltime(out1 + "/sweep.csv");
  const std::string b = read_wo_walltime(out2 + "/sweep.csv");
  const bool pass = !a.empty() && a == b;
  report("sweep_determinism", pass,
         pass ? "two runs byte-identical without wall_time_s"
              : "csv outputs differ");
  fs::remove_all(dir);
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";

  run_oracle_criteria();

  const LoadedConfig loaded = standard_loaded();
  const AutonomousResult aut = run_autonomous_criterion(loaded);

  // one full-scale sweep feeds the concentration, multiplicity and
  // certificate criteria
  const fs::path sweep_dir = fs::temp_directory_path() / "fchoq_acceptance";
  fs::remove_all(sweep_dir);
  const SweepOutcome sweep =
      run_sweep(loaded, sweep_dir.string(), 2, nullptr);

  {
    bool pass = sweep.records.size() == 3;
    std::string detail;
    std::vector<double> gaps;
    for (const SweepRecord& r : sweep.records) gaps.push_back(r.v_gap);
    for (size_t i = 0; pass && i + 1 < gaps.size(); ++i)
      if (!(gaps[i + 1] < gaps[i])) {
        pass = false;
        detail = "v_gap not strictly decreasing";
      }
    if (pass && !(gaps.back() / gaps.front() <= 0.5)) {
      pass = false;
      detail = "v_gap ratio " + fmt(gaps.back() / gaps.front());
    }
    if (pass && !sweep.records.back().original_certificate) {
      pass = false;
      detail = "original-problem certificate false at eps = 0.125";
    }
    if (pass)
      detail = "v_gap " + fmt(gaps[0]) + " -> " + fmt(gaps[1]) + " -> " +
               fmt(gaps[2]) + ", original certificate holds";
    report("concentration", pass, detail);
  }

  {
    bool pass = !sweep.rungs.empty();
    std::string detail = "sweep incomplete";
    if (pass) {
      const MultistartResult& last = sweep.rungs.back();
      pass = static_cast<int>(last.distinct.size()) >= 2;
      if (!pass) {
        detail = "only " + std::to_string(last.distinct.size()) +
                 " distinct solutions";
      } else {
        const double delta = loaded.model.delta;
        std::vector<double> bys;
        for (size_t i = 0; i < 2; ++i)
          bys.push_back(last.distinct[i].cert.barycenter_pt[0]);
        std::sort(bys.begin(), bys.end());
        pass = std::abs(bys[0] + 2.0) <= delta && std::abs(bys[1] - 2.0) <= delta;
        detail = pass ? "2 distinct, barycenters " + fmt(bys[0]) + " / " +
                            fmt(bys[1]) + " near the wells"
                      : "barycenters missed the wells: " + fmt(bys[0]) + ", " +
                            fmt(bys[1]);
      }
    }
    report("multiplicity", pass, detail);
  }

  // concentrating-seed limits, per well across the ladder
  {
    std::vector<std::vector<double>> e_gaps(2), b_gaps(2);
    for (size_t rung = 0; rung < loaded.sweep.eps_ladder.size(); ++rung) {
      const GridSpec grid = make_grid(1, loaded.model.grid.half_length,
                                      loaded.sweep.grid_ladder[rung]);
      const ModelConfig cfg = with_grid_and_eps(
          loaded.model, grid, loaded.sweep.eps_ladder[rung]);
      const RieszKernel kernel = build_riesz_kernel(grid, cfg.mu);
      for (int widx = 0; widx < 2; ++widx) {
        const Point& y = cfg.potential.wells[widx];
        const Field phi = build_concentrating_seed(y, aut.w, cfg, kernel);
        const double resc = j_eps(phi, cfg, kernel).rescaled_total;
        e_gaps[widx].push_back(std::abs(resc - aut.c_v0));
        const Point beta = barycenter(phi, cfg.rho);
        b_gaps[widx].push_back((beta - y).norm());
      }
    }
    bool pass_e = true, pass_b = true;
    std::string det_e, det_b;
    const double delta = loaded.model.delta;
    for (int widx = 0; widx < 2; ++widx) {
      const auto& eg = e_gaps[widx];
      const auto& bg = b_gaps[widx];
      for (size_t i = 0; i + 1 < eg.size(); ++i)
        if (!(eg[i + 1] < eg[i])) pass_e = false;
      if (!(eg.back() / eg.front() <= 0.5)) pass_e = false;
      for (size_t i = 0; i + 1 < bg.size(); ++i)
        if (!(bg[i + 1] < bg[i])) pass_b = false;
      if (!(bg.back() <= 0.5 * delta)) pass_b = false;
    }
    det_e = "gaps " + fmt(e_gaps[0][0]) + " -> " + fmt(e_gaps[0][1]) + " -> " +
            fmt(e_gaps[0][2]) + " (well -2), " + fmt(e_gaps[1][0]) + " -> " +
            fmt(e_gaps[1][1]) + " -> " + fmt(e_gaps[1][2]) + " (well +2)";
    det_b = "gaps " + fmt(b_gaps[0][0]) + " -> " + fmt(b_gaps[0][1]) + " -> " +
            fmt(b_gaps[0][2]) + " (well -2), " + fmt(b_gaps[1][0]) + " -> " +
            fmt(b_gaps[1][1]) + " -> " + fmt(b_gaps[1][2]) + " (well +2)";
    report("seed_energy_limit", pass_e, det_e);
    report("barycenter_limit", pass_b, det_b);
  }

  {
    bool pass = true;
    int count = 0;
    double worst = 0.0;
    for (const MultistartResult& rung : sweep.rungs)
      for (const SolveResult& r : rung.solves)
        if (r.converged) {
          ++count;
          worst = std::max(worst, r.cert.riesz_sup / loaded.model.pen.ell);
          pass = pass && r.cert.riesz_certificate;
        }
    pass = pass && count > 0;
    report("interaction_sup_bound", pass,
           "sup ratio " + fmt(worst) + " < 0.5 over " + std::to_string(count) +
               " solutions");
  }

  run_csv_determinism(cli);

  fs::remove_all(sweep_dir);
  std::printf("%s\n", failures == 0 ? "acceptance: all criteria hold"
                                    : "acceptance: FAILURES present");
  return failures;
}
