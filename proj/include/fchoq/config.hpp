#pragma once

#include "fchoq/model.hpp"
#include "fchoq/solver.hpp"

#include <string>
#include <vector>

// Plain-text configuration: sectioned key = value files. Unknown keys and
// malformed lines are rejected with line numbers; missing entries fall back
// to the documented defaults. See configs/ for annotated examples.

namespace fchoq {

struct SweepPlan {
  std::vector<double> eps_ladder{0.5, 0.25, 0.125};
  std::vector<int> grid_ladder;  // defaults to base n doubled per rung
};

struct AutonomousPlan {
  double half_length = 0.0;  // defaults to the main box
  int points_per_axis = 0;   // defaults to the base grid
  double seed_width = 1.0;
};

struct LoadedConfig {
  ModelConfig model;  // validated at the base grid and eps
  SolverOptions solver;
  SweepPlan sweep;
  AutonomousPlan autonomous;
};

LoadedConfig load_config(const std::string& path);

// same physical problem on another grid / at another eps
ModelConfig with_grid_and_eps(const ModelConfig& cfg, const GridSpec& grid,
                              double eps);

}  // namespace fchoq
