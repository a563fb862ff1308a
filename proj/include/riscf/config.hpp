#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "riscf/driver.hpp"
#include "riscf/model.hpp"

namespace riscf {

enum class Experiment { Single, Convergence, EeVsPmax, EeVsBackhaul };

const char* to_string(Experiment experiment);
Experiment parse_experiment(const std::string& name);

/// Everything one invocation needs. Parameters are already converted to
/// linear units and nats.
struct ExperimentSpec {
  Experiment experiment = Experiment::Single;
  SystemParams params;
  FadingParams fading;
  double region_radius_m = 1000.0;
  AlgoConfig algo;
  std::vector<Scheme> schemes{Scheme::RisCf, Scheme::CfNoRis, Scheme::CollocatedRis, Scheme::CollocatedNoRis};
  std::vector<double> pmax_list_dbm{20.0, 25.0, 30.0, 35.0};
  std::vector<double> cmax_list_bps_hz{5.0, 10.0, 50.0, 500.0};
  std::vector<Index> k_list{4, 8};
  int trials = 50;
  std::uint64_t seed = 0;
};

/// Diagnostic carrying the source name and line ("file:12: message").
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reference configuration (M=4, N=4, L=8, K=8, R=8).
ExperimentSpec default_spec();

/// key = value lines; '#' starts a comment. Per-AP and per-UE keys accept an
/// index suffix (`pmax_dbm[2] = 30`) that overrides the homogeneous value.
ExperimentSpec parse_config(std::istream& in, const std::string& source = "<config>");
ExperimentSpec load_config(const std::string& path);

}  // namespace riscf
