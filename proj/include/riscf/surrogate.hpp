#pragma once

#include <Eigen/Dense>

#include "riscf/channel.hpp"
#include "riscf/conic.hpp"
#include "riscf/model.hpp"

namespace riscf {

/// Coefficients of the concave minorant
///   ln(1 + x^2/y)/z >= a - b y/x^2 - c z
/// expanded at (x0, y0, z0).
struct BoundCoefficients {
  double a = 0.0, b = 0.0, c = 0.0;
};

BoundCoefficients bound_coefficients(double x0, double y0, double z0);
double rate_power_bound(double x, double y, double z, double x0, double y0, double z0);

/// Per-UE expansion constants for one inner-approximation step.
struct SurrogateCoefficients {
  Eigen::VectorXd gamma;
  Eigen::VectorXd a_ee, b_ee, c_ee;  // rate-over-power minorant
  Eigen::VectorXd a_bar, b_bar;      // rate minorant (power fixed to 1)
  NetworkState expansion;            // w already rotated
  Eigen::MatrixXcd gains;            // gains(l, j) = h^_l w_j at the expansion point
  Eigen::VectorXd signal;            // Re gains(l, l)
  Eigen::VectorXd interference;      // phi_l = sum_{j != l} |gains(l, j)|^2 + noise
};

/// Rotates every w_l so that h^_l(psi) w_l is real and nonnegative.
Beamformers rotate_beamformers(const ChannelSet& cs, const NetworkState& state);

/// Throws std::invalid_argument when some Re{h^_l w_l} is negative or the
/// expansion point has a non-positive rho.
SurrogateCoefficients compute_coefficients(const ChannelSet& cs, const SystemParams& params,
                                           const NetworkState& expansion);

/// Variable layout of the beamforming program: w_l entries as interleaved
/// (re, im) pairs for l = 0..L-1, then rho, then r_0..r_{L-1}, then one
/// epigraph variable per UE.
struct BeamformingLayout {
  Index MK = 0, L = 0;
  Index w(Index l, Index i) const { return 2 * (l * MK + i); }
  Index rho() const { return 2 * MK * L; }
  Index r(Index l) const { return rho() + 1 + l; }
  Index t(Index l) const { return rho() + 1 + L + l; }
  Index size() const { return rho() + 1 + 2 * L; }
};

/// Phase program layout: psi as (re, im) pairs, then r, then epigraph variables.
struct PhaseLayout {
  Index NR = 0, L = 0;
  Index psi(Index i) const { return 2 * i; }
  Index r(Index l) const { return 2 * NR + l; }
  Index t(Index l) const { return 2 * NR + L + l; }
  Index size() const { return 2 * NR + 2 * L; }
};

/// Lower bound on Omega used in place of the strict inequality, relative to the noise power.
inline constexpr double kOmegaFloor = 1e-8;

conic::ConeProgram build_beamforming_subproblem(const ChannelSet& cs, const SystemParams& params,
                                                const SurrogateCoefficients& coeffs);

/// Maximizes the smallest surrogate QoS margin min_l (R_l - Rmin_l) under the
/// power and linearized backhaul constraints; the last variable is the margin.
conic::ConeProgram build_feasibility_subproblem(const ChannelSet& cs, const SystemParams& params,
                                                const SurrogateCoefficients& coeffs);

conic::ConeProgram build_phase_subproblem(const ChannelSet& cs, const SystemParams& params,
                                          const SurrogateCoefficients& coeffs, const Beamformers& w_fixed);

/// Program variables at the expansion point (epigraphs tight).
Eigen::VectorXd lift_beamforming(const ChannelSet& cs, const SystemParams& params, const SurrogateCoefficients& coeffs);
Eigen::VectorXd lift_phase(const ChannelSet& cs, const SystemParams& params, const SurrogateCoefficients& coeffs);

struct BeamformingSolution {
  Beamformers w;
  double rho = 0.0;
  Eigen::VectorXd r;
};
BeamformingSolution extract_beamforming(const Dims& dims, const Eigen::VectorXd& x);
Eigen::VectorXcd extract_phase(const Dims& dims, const Eigen::VectorXd& x);

/// Objective values in natural units.
/// Beamforming: surrogate B sum_l (A_l - B_l phi_l/Omega_l - C_l rho) and true B sum_l R_l / rho.
double beamforming_surrogate_value(const ChannelSet& cs, const SystemParams& params,
                                   const SurrogateCoefficients& coeffs, const Beamformers& w, double rho);
double beamforming_true_value(const ChannelSet& cs, const SystemParams& params, const Eigen::VectorXcd& psi,
                              const Beamformers& w, double rho);
/// Phase: surrogate B sum_l Rbar_l(psi) + eta (P(psi) - NR) and true B sum_l R_l + eta (sum |psi|^2 - NR).
double phase_surrogate_value(const ChannelSet& cs, const SystemParams& params, const SurrogateCoefficients& coeffs,
                             const Eigen::VectorXcd& psi);
double phase_true_value(const ChannelSet& cs, const SystemParams& params, const Beamformers& w,
                        const Eigen::VectorXcd& psi);

/// Surrogate rate Abar_l - Bbar_l phi_l/Omega_l for given link gains.
Eigen::VectorXd surrogate_rates(const SurrogateCoefficients& coeffs, const Eigen::MatrixXcd& gains,
                                double noise_power_w);

}  // namespace riscf
