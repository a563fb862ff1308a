#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "riscf/channel.hpp"
#include "riscf/conic.hpp"
#include "riscf/model.hpp"

namespace riscf {

enum class Scheme { RisCf, CfNoRis, CollocatedRis, CollocatedNoRis };

const char* to_string(Scheme scheme);
Scheme parse_scheme(const std::string& name);
bool uses_ris(Scheme scheme);
bool is_collocated(Scheme scheme);

struct AlgoConfig {
  int max_outer_iters = 50;
  double ee_rel_tol = 1e-4;
  double unit_modulus_tol = 1e-3;
  int max_feasibility_iters = 40;
  conic::SolverSettings solver;
  std::uint64_t seed = 0;  // initial phases
  Scheme scheme = Scheme::RisCf;
  /// Audit each step against the true objective and record surrogate tightness.
  bool audit = true;
  /// Relative EE drop per outer iteration that aborts the run.
  double monotone_tol = 1e-6;
  /// Called with every program before it is solved ("feasibility",
  /// "beamforming" or "phase", outer iteration index).
  std::function<void(const std::string&, int, const conic::ConeProgram&)> program_sink;
};

struct IterationRecord {
  int iteration = 0;  // 0 is the initial point
  double ee = 0.0;    // bits/J
  double sum_rate = 0.0;  // nats/s/Hz
  double power = 0.0;     // W
  double max_violation = 0.0;
  double max_modulus_deviation = 0.0;
  conic::SolveStatus beamforming_status = conic::SolveStatus::Optimal;
  conic::SolveStatus phase_status = conic::SolveStatus::Optimal;
  int beamforming_solver_iters = 0;
  int phase_solver_iters = 0;
  /// Relative mismatch between each emitted program evaluated at its
  /// expansion point and the true objective there.
  double beamforming_tightness = 0.0;
  double phase_tightness = 0.0;
  bool phase_step_kept = true;
  double wall_seconds = 0.0;
};

struct Trace {
  std::vector<IterationRecord> records;
  int feasibility_iters = 0;
  double initial_scale = 1.0;  // common beamformer scaling applied for the backhaul limits
  bool converged = false;
  /// Unit-modulus deviation just before the final projection and the
  /// relative EE change that projection caused.
  double pre_projection_modulus_deviation = 0.0;
  double projection_ee_change = 0.0;
  int phase_steps_rejected = 0;
  /// Subproblems accepted at the solver's reduced tolerance.
  int reduced_accuracy_solves = 0;
  /// Residuals after the projection are >= -kClosingTol and the projection
  /// moved EE by at most 10 * unit_modulus_tol.
  bool closing_check_ok = true;
};

inline constexpr double kClosingTol = 1e-5;

struct RunResult {
  NetworkState state;
  Trace trace;
  Residuals residuals;
  double ee = 0.0;        // bits/J
  double sum_rate = 0.0;  // nats/s/Hz
  double power = 0.0;     // W
};

class InfeasibleInstance : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& what, int iteration) : std::runtime_error(what), iteration(iteration) {}
  int iteration;
};

class MonotonicityViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One random network: geometry, raw draws and the composed channels.
struct Scenario {
  Layout layout;
  FadingParams fading;
  FadingDraws draws;
  ChannelSet channels;
};

Scenario make_scenario(const Dims& dims, double region_radius, const FadingParams& fading);

/// Matched-filter start with random unit-modulus phases, followed by a
/// feasibility phase when the start violates any constraint.
NetworkState initialize(const ChannelSet& cs, const SystemParams& params, const AlgoConfig& config,
                        Trace* trace = nullptr);

/// Alternating beamforming / phase ascent on the given channels.
RunResult run(const ChannelSet& cs, const SystemParams& params, const AlgoConfig& config);

/// Runs `config.scheme` on the scenario, rebuilding the single-site
/// channels and parameters for the collocated schemes.
RunResult run_baseline(const Scenario& scenario, const SystemParams& params, const AlgoConfig& config);

/// Parameters of the single-site network: one AP with M*K antennas, M-fold
/// power budget, summed circuit and backhaul power, first AP's backhaul limit.
SystemParams collocated_params(const SystemParams& params);

}  // namespace riscf
