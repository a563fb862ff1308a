#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace riscf {

using Eigen::Index;

/// Network dimensions: M APs with K antennas, N surfaces with R elements, L users.
struct Dims {
  Index M = 1, N = 1, L = 1, K = 1, R = 1;

  Index MK() const { return M * K; }
  Index NR() const { return N * R; }
  bool operator==(const Dims&) const = default;
};

struct Layout {
  std::vector<Eigen::Vector2d> ap_positions;
  std::vector<Eigen::Vector2d> ris_positions;
  std::vector<Eigen::Vector2d> ue_positions;
  double region_radius = 0.0;
};

struct FadingParams {
  double shadow_std_db = 8.0;
  double ref_dist_0 = 10.0;  // m
  double ref_dist_1 = 50.0;  // m
  std::uint64_t seed = 0;
};

/// Raw standard draws behind one channel realization, kept apart from the
/// geometry so the same draws can be recombined for another layout.
struct FadingDraws {
  Dims dims;
  Eigen::MatrixXcd direct;               // L x MK, CN(0,1)
  std::vector<Eigen::MatrixXcd> ap_ris;  // M*N entries, R x K
  Eigen::MatrixXcd ris_ue;               // L x NR
  Eigen::MatrixXd shadow_direct;         // M x L, N(0,1)
  Eigen::MatrixXd shadow_ap_ris;         // M x N
  Eigen::MatrixXd shadow_ris_ue;         // N x L
};

/// Channel coefficients for one realization.
///   direct.row(l).segment(m*K, K)  = h_{m,l}^H
///   ap_ris[m*N + n]                = H_{m,n}        (R x K)
///   ris_ue.row(l).segment(n*R, R)  = g_{n,l}^H
/// `cascade[l]` is the NR x MK matrix with rows psi-coefficients, so that
/// the equivalent channel of user l is direct.row(l) + psi^T cascade[l].
struct ChannelSet {
  Dims dims;
  Eigen::MatrixXcd direct;
  std::vector<Eigen::MatrixXcd> ap_ris;
  Eigen::MatrixXcd ris_ue;
  std::vector<Eigen::MatrixXcd> cascade;

  const Eigen::MatrixXcd& H(Index m, Index n) const { return ap_ris[static_cast<std::size_t>(m * dims.N + n)]; }
};

Layout generate_layout(Index m, Index n, Index l, double radius, std::uint64_t seed);

double path_loss_db(double distance_m, const FadingParams& params);

FadingDraws draw_fading(const Dims& dims, std::uint64_t seed);

/// Scales the draws by large-scale fading of `layout`. Distances below one
/// metre are clamped to one metre.
ChannelSet compose_channels(const Layout& layout, const FadingParams& params, const FadingDraws& draws);

ChannelSet generate_channels(const Layout& layout, const FadingParams& params, Index K, Index R);

/// Rebuilds `cascade` from the raw coefficients; call after editing them.
void refresh_cascade(ChannelSet& cs);

/// Stacked row vector [h^_{1,l}^H, ..., h^_{M,l}^H] of length MK.
Eigen::RowVectorXcd equivalent_channel(const ChannelSet& cs, const Eigen::VectorXcd& psi, Index ue);

/// All equivalent channels as an L x MK matrix (row l for user l).
Eigen::MatrixXcd equivalent_channels(const ChannelSet& cs, const Eigen::VectorXcd& psi);

/// Layout and draws of the single-site counterpart: one AP at the origin
/// carrying all MK antennas. Small-scale draws are reused antenna by antenna;
/// shadowing of the first AP is kept for every link.
Layout collocated_layout(const Layout& layout);
FadingDraws collocated_draws(const FadingDraws& draws);

}  // namespace riscf
