#include "fchoq/model.hpp"

#include "fchoq/nonlocal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fchoq {

double potential_value(const PotentialSpec& pot, const Point& x) {
  if (pot.family == PotentialFamily::constant) return pot.base;
  double prod = 1.0;
  for (const Point& y : pot.wells) {
    const double d2 = (x - y).squaredNorm();
    prod *= 1.0 - std::exp(-d2 / (pot.sigma * pot.sigma));
  }
  return pot.base + pot.amplitude * prod;
}

bool RegionSpec::contains(const Point& x) const {
  if (shape == RegionShape::box) {
    for (Eigen::Index a = 0; a < x.size(); ++a)
      if (std::abs(x[a] - center[a]) >= extents[a]) return false;
    return true;
  }
  return (x - center).norm() < extents[0];
}

double RegionSpec::boundary_distance(const Point& x) const {
  if (shape == RegionShape::box) {
    double d = extents[0] - std::abs(x[0] - center[0]);
    for (Eigen::Index a = 1; a < x.size(); ++a)
      d = std::min(d, extents[a] - std::abs(x[a] - center[a]));
    return d;
  }
  return extents[0] - (x - center).norm();
}

std::vector<Point> RegionSpec::boundary_samples(int min_count) const {
  std::vector<Point> pts;
  const int dim = static_cast<int>(center.size());
  if (dim == 1) {
    while (static_cast<int>(pts.size()) < min_count) {
      Point lo(1), hi(1);
      lo[0] = center[0] - extents[0];
      hi[0] = center[0] + extents[0];
      pts.push_back(lo);
      pts.push_back(hi);
    }
    return pts;
  }
  if (shape == RegionShape::ball) {
    const int m = std::max(min_count, 64);
    for (int i = 0; i < m; ++i) {
      const double t = 2.0 * M_PI * i / m;
      Point p(2);
      p[0] = center[0] + extents[0] * std::cos(t);
      p[1] = center[1] + extents[0] * std::sin(t);
      pts.push_back(p);
    }
    return pts;
  }
  const int per_side = std::max((min_count + 3) / 4, 16);
  for (int i = 0; i < per_side; ++i) {
    const double t = -1.0 + 2.0 * i / (per_side - 1);
    for (int sgn : {-1, 1}) {
      Point p(2), r(2);
      p[0] = center[0] + sgn * extents[0];
      p[1] = center[1] + t * extents[1];
      r[0] = center[0] + t * extents[0];
      r[1] = center[1] + sgn * extents[1];
      pts.push_back(p);
      pts.push_back(r);
    }
  }
  return pts;
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += "; ";
    out += parts[i];
  }
  return out;
}

void require_validated(const ModelConfig& cfg) {
  if (!cfg.validated)
    throw std::logic_error("ModelConfig used before validate_config");
}

}  // namespace

ModelConfig validate_config(ModelConfig cfg) {
  std::vector<std::string> bad;
  const int dim = cfg.grid.dim;
  const double N = dim;

  if (cfg.grid.n < 8 || cfg.grid.n % 2 != 0 || !(cfg.grid.half_length > 0))
    bad.push_back("grid: invalid (even n >= 8 and positive half_length required)");
  if (!(cfg.s > 0.0 && cfg.s < 1.0)) bad.push_back("s must lie in (0,1)");
  if (!(N > 2.0 * cfg.s))
    bad.push_back("N > 2s violated (N=" + fmt(N) + ", s=" + fmt(cfg.s) + ")");
  if (!(cfg.mu > 0.0 && cfg.mu < 2.0 * cfg.s))
    bad.push_back("mu window violated (0 < mu < 2s required; mu=" + fmt(cfg.mu) +
                  ", 2s=" + fmt(2.0 * cfg.s) + ")");
  if (N > 2.0 * cfg.s) {
    const double q_hi = 2.0 * (N - cfg.mu) / (N - 2.0 * cfg.s);
    if (!(cfg.q > 2.0 && cfg.q < q_hi))
      bad.push_back("q outside the admissible exponent window (2 < q < " +
                    fmt(q_hi) + "; q=" + fmt(cfg.q) + ")");
  }
  if (!(cfg.eps > 0.0)) bad.push_back("eps must be positive");
  if (!(cfg.pen.ell > 2.0)) bad.push_back("penalization ell must exceed 2");
  if (!(cfg.potential.base > 0.0))
    bad.push_back("(V1) violated: V0 must be positive");

  if (!bad.empty()) throw ConfigError("invalid configuration: " + join(bad));

  // the growth-condition window is only a warning; the admissibility window
  // above is the enforced one
  {
    const double crit = 2.0 * N / (N - 2.0 * cfg.s);
    const double f2_hi = 0.5 * crit * (2.0 - cfg.mu / N);
    if (!(cfg.q < f2_hi))
      cfg.warnings.push_back("q = " + fmt(cfg.q) +
                             " is outside the growth window (2, " + fmt(f2_hi) +
                             ")");
  }

  cfg.v0 = cfg.potential.base;
  cfg.pen.a = std::pow(cfg.v0 / cfg.pen.ell, 1.0 / (cfg.q - 2.0));

  if (cfg.autonomous) {
    cfg.potential.family = PotentialFamily::constant;
    cfg.expected_solution_count = 1;
    cfg.delta = 0.0;
    cfg.rho = cfg.grid.half_length;
    cfg.eps = 1.0;
  } else {
    if (cfg.potential.family != PotentialFamily::product_well)
      bad.push_back("(V2) requires the product_well family (constant V has no "
                    "admissible Lambda)");
    if (cfg.potential.wells.empty())
      bad.push_back("potential: at least one well required");
    for (const Point& y : cfg.potential.wells)
      if (y.size() != dim) bad.push_back("potential: well dimension mismatch");
    if (cfg.lambda_region.center.size() != dim ||
        cfg.lambda_region.extents.size() < 1)
      bad.push_back("(V2) violated: Lambda region missing or of wrong dimension");
    if (!(cfg.potential.amplitude > 0.0))
      bad.push_back("potential amplitude must be positive");
    if (!(cfg.potential.sigma > 0.0))
      bad.push_back("potential sigma must be positive");
    if (!bad.empty()) throw ConfigError("invalid configuration: " + join(bad));

    const auto bpts = cfg.lambda_region.boundary_samples(64);

    bool inside_box = true;
    for (const Point& p : bpts)
      for (Eigen::Index a = 0; a < p.size(); ++a)
        if (std::abs(p[a]) >= cfg.grid.half_length) inside_box = false;
    if (!inside_box)
      bad.push_back("Lambda containment violated: region reaches the "
                    "computational box");

    double vmin_boundary = std::numeric_limits<double>::infinity();
    for (const Point& p : bpts)
      vmin_boundary = std::min(vmin_boundary, potential_value(cfg.potential, p));
    if (!(vmin_boundary > cfg.v0))
      bad.push_back("(V2) violated: min V on boundary of Lambda (" +
                    fmt(vmin_boundary) + ") does not exceed V0 (" + fmt(cfg.v0) +
                    ")");

    double min_dist = std::numeric_limits<double>::infinity();
    for (const Point& y : cfg.potential.wells)
      min_dist = std::min(min_dist, cfg.lambda_region.boundary_distance(y));
    if (!(min_dist > 0.0)) bad.push_back("wells must lie inside Lambda");
    cfg.delta = cfg.delta_request > 0.0 ? cfg.delta_request : 0.5 * min_dist;
    if (!(min_dist >= cfg.delta))
      bad.push_back("M_delta containment violated: a well lies within delta of "
                    "the boundary of Lambda");

    cfg.expected_solution_count = static_cast<int>(cfg.potential.wells.size());
    double max_well = 0.0;
    for (const Point& y : cfg.potential.wells)
      max_well = std::max(max_well, y.norm());
    cfg.rho = max_well + cfg.delta;
  }

  if (!bad.empty()) throw ConfigError("invalid configuration: " + join(bad));

  cfg.v_samples = Array(cfg.grid.size());
  cfg.chi_samples = Array(cfg.grid.size());
  for (Eigen::Index i = 0; i < cfg.grid.size(); ++i) {
    const Point x = cfg.grid.point(i);
    cfg.v_samples[i] = potential_value(cfg.potential, x);
    cfg.chi_samples[i] =
        cfg.autonomous ? 1.0 : (cfg.lambda_region.contains(x) ? 1.0 : 0.0);
  }

  // V0 recomputed as the infimum over the grid joined with the exact well
  // points (wells rarely sit on the grid); the product form attains base there
  double vmin = cfg.v_samples.minCoeff();
  if (!cfg.autonomous)
    for (const Point& y : cfg.potential.wells)
      vmin = std::min(vmin, potential_value(cfg.potential, y));
  if (std::abs(vmin - cfg.potential.base) > 1e-10)
    throw ConfigError("(V1) violated: computed inf V = " + fmt(vmin) +
                      " differs from configured V0 = " + fmt(cfg.potential.base));

  cfg.validated = true;
  return cfg;
}

ModelConfig make_autonomous_config(double v0, double s, double mu, double q,
                                   const GridSpec& grid, double ell) {
  ModelConfig cfg;
  cfg.grid = grid;
  cfg.s = s;
  cfg.mu = mu;
  cfg.q = q;
  cfg.eps = 1.0;
  cfg.potential.family = PotentialFamily::constant;
  cfg.potential.base = v0;
  cfg.pen.ell = ell;
  cfg.autonomous = true;
  return validate_config(std::move(cfg));
}

Field eval_potential(const ModelConfig& cfg) {
  require_validated(cfg);
  return sample_field(cfg.grid, [&](const Point& x) {
    return potential_value(cfg.potential, x);
  });
}

Field indicator_lambda(const ModelConfig& cfg) {
  require_validated(cfg);
  if (cfg.autonomous) return Field{cfg.grid, Array::Ones(cfg.grid.size())};
  return sample_field(cfg.grid, [&](const Point& x) {
    return cfg.lambda_region.contains(x) ? 1.0 : 0.0;
  });
}

void eval_f(double q, const Array& t, Array& f_out, Array& big_f_out) {
  const Array tp = t.max(0.0);
  f_out = tp.pow(q - 1.0);
  big_f_out = tp.pow(q) / q;
}

double f_scalar(double q, double t) {
  return t > 0.0 ? std::pow(t, q - 1.0) : 0.0;
}

double big_f_scalar(double q, double t) {
  return t > 0.0 ? std::pow(t, q) / q : 0.0;
}

double ftilde_scalar(const ModelConfig& cfg, double t) {
  if (t <= 0.0) return 0.0;
  return std::min(f_scalar(cfg.q, t), cfg.v0 / cfg.pen.ell * t);
}

double big_ftilde_scalar(const ModelConfig& cfg, double t) {
  if (t <= 0.0) return 0.0;
  const double a = cfg.pen.a;
  if (t <= a) return big_f_scalar(cfg.q, t);
  return big_f_scalar(cfg.q, a) + 0.5 * cfg.v0 / cfg.pen.ell * (t * t - a * a);
}

void eval_g(const Field& u, const ModelConfig& cfg, Array& g_out,
            Array& big_g_out) {
  require_validated(cfg);
  if (!(u.grid == cfg.grid))
    throw std::invalid_argument("eval_g: field grid does not match config");
  const Array tp = u.values.max(0.0);
  Array f = tp.pow(cfg.q - 1.0);
  Array big_f = tp.pow(cfg.q) / cfg.q;
  if (cfg.autonomous) {
    g_out = std::move(f);
    big_g_out = std::move(big_f);
    return;
  }
  const double a = cfg.pen.a;
  const double slope = cfg.v0 / cfg.pen.ell;
  const double big_f_a = big_f_scalar(cfg.q, a);
  const Array ftilde = f.min(slope * tp);
  const Array big_ftilde =
      (tp <= a).select(big_f, big_f_a + 0.5 * slope * (tp.square() - a * a));
  const Array& chi = cfg.chi_samples;
  g_out = chi * f + (1.0 - chi) * ftilde;
  big_g_out = chi * big_f + (1.0 - chi) * big_ftilde;
}

double norm_eps_sq(const Field& u, const ModelConfig& cfg) {
  require_validated(cfg);
  if (!(u.grid == cfg.grid))
    throw std::invalid_argument("norm_eps_sq: field grid does not match config");
  const double hN = std::pow(cfg.grid.spacing(), cfg.grid.dim);
  const double vterm = hN * (cfg.v_samples * u.values.square()).sum();
  return std::pow(cfg.eps, 2.0 * cfg.s) * frac_seminorm_sq(u, cfg.s) + vterm;
}

}  // namespace fchoq
