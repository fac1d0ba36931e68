#pragma once

#include <cstdint>
#include <string>
#include <vector>

// Operator oracle suite behind the `selftest` subcommand: every fast path is
// checked against an independent slow one (dense DFT, direct summation,
// adaptive quadrature, closed forms) on grids small enough to run in seconds.

namespace fchoq {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

std::vector<CheckResult> run_selftest(std::uint64_t rng_seed);

}  // namespace fchoq
