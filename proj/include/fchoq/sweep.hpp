#pragma once

#include "fchoq/config.hpp"
#include "fchoq/io.hpp"

#include <iosfwd>

// eps-ladder driver: one multistart per rung, one record per rung appended to
// sweep.csv and sweep.jsonl in the output directory. Wall time is recorded
// but takes no part in any determinism guarantee.

namespace fchoq {

struct SweepRecord {
  double eps = 0.0;
  int grid_n = 0;
  Point x_eps;
  double v_at_xeps = 0.0;
  double v_gap = 0.0;  // V(x_eps) - V0, nonnegative by construction
  double rescaled_energy = 0.0;
  double c_v0 = 0.0;
  double energy_gap = 0.0;
  Point barycenter_pt;
  int distinct_count = 0;
  bool converged = false;
  bool riesz_certificate = false;
  bool original_certificate = false;
  bool boundary_ok = false;
  double wall_time_s = 0.0;
};

inline constexpr int kSweepSchemaVersion = 1;

std::string sweep_csv_header();
std::string sweep_csv_row(const SweepRecord& rec);
nlohmann::json sweep_record_to_json(const SweepRecord& rec);

struct SweepOutcome {
  AutonomousResult autonomous;
  std::vector<SweepRecord> records;
  std::vector<MultistartResult> rungs;
  bool all_ok = false;  // every rung converged with both certificates
};

// log may be null; out_dir must exist or be creatable
SweepOutcome run_sweep(const LoadedConfig& loaded, const std::string& out_dir,
                       int threads, std::ostream* log);

// autonomous ground state for the loaded configuration, reusing a cached
// field dump in out_dir when its parameters match
AutonomousResult autonomous_for(const LoadedConfig& loaded,
                                const std::string& out_dir, std::ostream* log);

}  // namespace fchoq
