#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "convsplit/config.hpp"
#include "convsplit/diagnostics.hpp"
#include "convsplit/problem.hpp"
#include "convsplit/schemes1d.hpp"
#include "convsplit/schemes2d.hpp"

namespace convsplit {

/// A fully resolved experiment: problem, scheme, resolution sweep, time rule,
/// stepper settings, and output destination. Built from a ConfigMap; the raw
/// map is kept for the manifest and for deterministic output naming.
struct ExperimentConfig {
  std::string problem;
  std::string scheme;
  std::string mode = "convergence";  // convergence | timeseries
  std::optional<double> gamma;
  std::optional<double> t_end;
  std::vector<int> grid_n;
  std::vector<int> nt_sweep;  // temporal sweep at fixed grid_n.front()
  std::string time_rule = "tau_c_h2";  // fixed_tau | tau_c_h | tau_c_h2 | fixed_nt
  double tau = 0.0;
  double time_c = 1.0;
  int nt = 0;
  bool cauchy = false;
  SchemeConfig scheme_cfg;
  std::vector<double> snapshot_times;
  std::string out_dir = "out";
  std::string label;
  uint64_t seed = 0;
  ConfigMap raw;

  static ExperimentConfig from_config(const ConfigMap& cfg);
  std::string prefix() const;
  bool two_dimensional() const;
};

struct ConvergenceResult {
  std::vector<ConvergenceRow> rows;
  bool any_diverged = false;
};

struct TimeseriesResult {
  std::vector<StepDiagnostics> steps;
  std::vector<std::pair<double, GridFunction>> snapshots;
  GridFunction final_field;
  double cpu_seconds = 0.0;
  bool diverged = false;
};

/// Integrates every resolution in the sweep and measures errors against the
/// exact solution at the final time, or against the next-finer run restricted
/// to coincident nodes in Cauchy mode. Diverged runs are flagged and the
/// sweep continues.
ConvergenceResult run_convergence(const ExperimentConfig& cfg);

/// Single integration at the first sweep resolution, recording per-step
/// diagnostics and field snapshots at the requested times.
TimeseriesResult run_timeseries(const ExperimentConfig& cfg);

void emit_convergence(const ExperimentConfig& cfg, const ConvergenceResult& result);
void emit_timeseries(const ExperimentConfig& cfg, const TimeseriesResult& result);

// Lower-level pieces shared with the verification suites.

struct SingleRun {
  GridFunction field;
  std::vector<StepDiagnostics> diagnostics;
  std::vector<std::pair<double, GridFunction>> snapshots;
  double cpu_seconds = 0.0;
  bool diverged = false;
};

/// One integration of `cfg` at `cells` with `steps` time steps. Diagnostics
/// are recorded when record_diags is set; snapshots at the times listed.
SingleRun integrate_once(const ExperimentConfig& cfg, int cells, int steps,
                         bool record_diags, const std::vector<double>& snapshot_times);

int steps_for(const ExperimentConfig& cfg, const Problem& p, int cells);

/// L-infinity and L2 errors of `coarse` against `fine` on coincident nodes
/// (fine.cells must be an integer multiple of coarse.cells).
std::pair<double, double> cauchy_errors(const GridFunction& coarse, const GridFunction& fine);

std::pair<double, double> errors_vs_exact(const Problem& p, const GridFunction& u, double t);

bool scheme_is_2d(const std::string& scheme);

}  // namespace convsplit
