#pragma once

#include <string>
#include <vector>

#include "revsim/config.hpp"

namespace revsim::cli {

// Exit codes: 0 success, 1 numerical failure, 2 invalid config/usage.
inline constexpr int kOk = 0;
inline constexpr int kNumericalFailure = 1;
inline constexpr int kBadConfig = 2;

// Solves the commitment equilibrium, writes <out>/solution.json and prints a
// decile summary table (p, V*, l*, r*).
int cmd_solve(const RunConfig& cfg);

// Writes <out>/fig1.csv / fig2.csv / fig3.csv (500-point grids).
int cmd_figure(const RunConfig& cfg, const std::string& which);

// Runs a Monte Carlo batch under the named policy and writes
// <out>/sim_<policy>.json; optional per-episode trace CSV.
int cmd_simulate(const RunConfig& cfg, const std::string& policy, bool dump_traces,
                 bool no_auto_solve);

// One solve per swept value; writes <out>/sweep_<param>.csv.
int cmd_sweep(const RunConfig& cfg, const std::string& param,
              const std::vector<double>& values);

// Prints the active (or default) configuration as JSON.
int cmd_config(const RunConfig& cfg, bool print_defaults);

// Decile summary used by cmd_solve and the round-trip check.
std::string solution_summary(const ValueSolution& sol);

}  // namespace revsim::cli
