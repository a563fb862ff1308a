#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "riscf/config.hpp"
#include "riscf/driver.hpp"

namespace riscf {

/// Largest residual violation an OK row may carry.
inline constexpr double kRowViolationTol = 1e-5;

struct TrialOutcome {
  std::string status = "ok";  // ok, infeasible, solver_failure, monotonicity_violation, constraint_violation, error
  std::string message;
  double ee = std::numeric_limits<double>::quiet_NaN();
  double sum_rate = std::numeric_limits<double>::quiet_NaN();
  double power = std::numeric_limits<double>::quiet_NaN();
  double max_violation = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t seed = 0;
  RunResult result;  // meaningful when status is ok or constraint_violation

  bool ok() const { return status == "ok"; }
};

/// Runs one scheme on the scenario of `seed` and classifies the outcome.
TrialOutcome run_trial(const SystemParams& params, const FadingParams& fading, double region_radius_m,
                       Scheme scheme, std::uint64_t seed, const AlgoConfig& algo);

/// Calls fn(i) for i in [0, n) on `jobs` worker threads.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

struct RunOptions {
  std::string output_dir = "results";
  int jobs = 1;
  int verbosity = 0;          // 0 quiet, 1 per trial, 2 per iteration, 3 solver log
  std::string dump_dir;       // cone program dumps when non-empty
};

struct ExperimentSummary {
  int rows = 0;
  int rows_ok = 0;
  std::vector<std::string> files;
};

/// Writes <name>.csv, <name>_trials.csv and <name>_traces.jsonl (plus
/// convergence_curve.csv or single_residuals.csv) into the output directory.
ExperimentSummary run_experiment(const ExperimentSpec& spec, const RunOptions& options);

/// Sample mean and standard error; the error is NaN below two samples.
struct MeanSe {
  double mean = std::numeric_limits<double>::quiet_NaN();
  double se = std::numeric_limits<double>::quiet_NaN();
  std::size_t n = 0;
};
MeanSe mean_se(const std::vector<double>& values);

}  // namespace riscf
