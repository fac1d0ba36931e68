#pragma once

#include "fchoq/grid.hpp"

#include <stdexcept>
#include <string>
#include <vector>

// Physical configuration: exponents, the potential V with its minimum set,
// the concentration region Lambda, the power nonlinearity f(t) = t_+^{q-1}
// and its penalized modification outside Lambda. The solver works in original
// variables on a fixed box; rescaled quantities carry explicit eps factors.

namespace fchoq {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class PotentialFamily { constant, product_well };

struct PotentialSpec {
  PotentialFamily family = PotentialFamily::product_well;
  double base = 1.0;       // V0
  double amplitude = 2.0;  // A
  double sigma = 1.0;
  std::vector<Point> wells;
};

double potential_value(const PotentialSpec& pot, const Point& x);

enum class RegionShape { box, ball };

struct RegionSpec {
  RegionShape shape = RegionShape::box;
  Point center;
  Point extents;  // per-axis half extents; for a ball only extents[0] (radius)

  bool contains(const Point& x) const;
  // signed distance to the boundary, positive inside
  double boundary_distance(const Point& x) const;
  std::vector<Point> boundary_samples(int min_count) const;
};

struct PenalizationParams {
  double ell = 10.0;  // > 2
  double a = 0.0;     // derived: (V0/ell)^{1/(q-2)} so f(a)/a = V0/ell
};

struct ModelConfig {
  GridSpec grid;
  double s = 0.4;
  double mu = 0.5;
  double q = 3.0;
  double eps = 0.125;
  PotentialSpec potential;
  RegionSpec lambda_region;
  PenalizationParams pen;

  // derived at validation
  double v0 = 0.0;
  double delta_request = 0.0;  // 0 asks for the default margin
  double delta = 0.0;  // margin of M_delta; defaults to half the closest
                       // well-to-boundary distance
  double rho = 0.0;    // barycenter truncation radius, max |y_i| + delta
  int expected_solution_count = 0;
  bool autonomous = false;  // constant V, chi == 1 (g == f), eps == 1
  bool validated = false;
  std::vector<std::string> warnings;  // non-fatal hypothesis notes

  // grid caches filled by validate_config
  Array v_samples;
  Array chi_samples;

  int dim() const { return grid.dim; }
};

// checks (V1)-(V2), the exponent windows of Theorem 1.1, penalization
// calibration and region containment; fills derived fields and caches.
// Violations are reported together by hypothesis name.
ModelConfig validate_config(ModelConfig cfg);

// constant-potential configuration with the penalization disabled
ModelConfig make_autonomous_config(double v0, double s, double mu, double q,
                                   const GridSpec& grid, double ell = 10.0);

Field eval_potential(const ModelConfig& cfg);
Field indicator_lambda(const ModelConfig& cfg);

// f(t) = max(t,0)^{q-1}, F(t) = max(t,0)^q / q
void eval_f(double q, const Array& t, Array& f_out, Array& big_f_out);
double f_scalar(double q, double t);
double big_f_scalar(double q, double t);

// penalized branch used outside Lambda
double ftilde_scalar(const ModelConfig& cfg, double t);
double big_ftilde_scalar(const ModelConfig& cfg, double t);

// pointwise g(x, u(x)) and its antiderivative G(x, u(x))
void eval_g(const Field& u, const ModelConfig& cfg, Array& g_out,
            Array& big_g_out);

// eps^{2s} [u]_s^2 + int V u^2 (the original-variable quadratic form)
double norm_eps_sq(const Field& u, const ModelConfig& cfg);

}  // namespace fchoq
