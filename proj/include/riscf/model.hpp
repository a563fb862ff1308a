#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "riscf/channel.hpp"

namespace riscf {

/// Linear-scale system parameters. Rates are in nats/s/Hz throughout.
/// Per-AP vectors have length M, per-UE vectors length L.
struct SystemParams {
  Dims dims;
  double bandwidth_hz = 20e6;
  double noise_power_w = 0.0;
  Eigen::VectorXd pmax_w;
  Eigen::VectorXd pa_inefficiency;
  Eigen::VectorXd p_ap_w;
  Eigen::VectorXd p_ue_w;
  double p_ris_elem_w = 0.0;
  double p_bh_w = 0.0;  // per (AP, UE) pair
  Eigen::VectorXd backhaul_cap_nats;
  Eigen::VectorXd backhaul_scale;
  Eigen::VectorXd rmin_nats;
  double penalty = 1e3;

  /// C^max_m / omega_m.
  Eigen::VectorXd backhaul_limit() const { return backhaul_cap_nats.cwiseQuotient(backhaul_scale); }
};

double dbm_to_w(double dbm);
double dbw_to_w(double dbw);
double w_to_dbm(double w);

/// Homogeneous defaults of the reference configuration for the given sizes.
SystemParams default_params(const Dims& dims);

/// Violated invariants; empty when the parameters are usable.
std::vector<std::string> check(const SystemParams& params);

/// Beamformers are stored as an MK x L matrix whose column l is w_l; the
/// block rows m*K .. m*K+K-1 belong to AP m.
using Beamformers = Eigen::MatrixXcd;

struct NetworkState {
  Beamformers w;
  Eigen::VectorXcd psi;  // length NR
  double rho = 0.0;
  Eigen::VectorXd r_aux;  // per-UE SINR auxiliaries
};

/// G(l, j) = h^_l(psi) w_j.
Eigen::MatrixXcd link_gains(const ChannelSet& cs, const Eigen::VectorXcd& psi, const Beamformers& w);

double sinr(const ChannelSet& cs, const NetworkState& state, Index ue, double noise_power_w);
Eigen::VectorXd sinrs(const ChannelSet& cs, const NetworkState& state, double noise_power_w);
Eigen::VectorXd sinrs_from_gains(const Eigen::MatrixXcd& gains, double noise_power_w);

double rate_nats(const ChannelSet& cs, const NetworkState& state, Index ue, double noise_power_w);
Eigen::VectorXd rates_nats(const ChannelSet& cs, const NetworkState& state, double noise_power_w);

/// Per-AP transmit power sum_l ||w_{m,l}||^2.
Eigen::VectorXd ap_transmit_power(const SystemParams& params, const Beamformers& w);
double static_power(const SystemParams& params);
double total_power(const SystemParams& params, const Beamformers& w);

/// Bits per joule.
double energy_efficiency(const SystemParams& params, const ChannelSet& cs, const NetworkState& state);

struct Residuals {
  Eigen::VectorXd power;     // P^max_m - sum_l ||w_{m,l}||^2
  Eigen::VectorXd rate;      // R_l - R^min_l
  Eigen::VectorXd backhaul;  // C^max_m / omega_m - sum_l R_l
  Eigen::VectorXd modulus;   // |psi| - 1

  /// Most negative of the power, rate and backhaul margins (0 if none negative).
  double worst_margin() const;
  double max_modulus_deviation() const;
};

Residuals constraint_residuals(const SystemParams& params, const ChannelSet& cs, const NetworkState& state);

}  // namespace riscf
