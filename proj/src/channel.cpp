#include "riscf/channel.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace riscf {

namespace {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;

class Normal {
 public:
  explicit Normal(std::uint64_t seed) : rng_(seed) {}
  double real() { return dist_(rng_); }
  std::complex<double> complex() {
    const double re = dist_(rng_), im = dist_(rng_);
    return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
  }
  MatrixXcd complex(Index rows, Index cols) {
    MatrixXcd out(rows, cols);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) out(i, j) = complex();
    return out;
  }
  MatrixXd real(Index rows, Index cols) {
    MatrixXd out(rows, cols);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) out(i, j) = real();
    return out;
  }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> dist_{0.0, 1.0};
};

double amplitude(double distance, double shadow, const FadingParams& params) {
  const double pl = path_loss_db(std::max(distance, 1.0), params) + params.shadow_std_db * shadow;
  return std::pow(10.0, pl / 20.0);
}

void check_dims(const Dims& d) {
  if (d.M < 1 || d.L < 1 || d.K < 1 || d.N < 0 || d.R < 0)
    throw std::invalid_argument("invalid network dimensions");
}

}  // namespace

Layout generate_layout(Index m, Index n, Index l, double radius, std::uint64_t seed) {
  if (m < 1 || n < 1 || l < 1) throw std::invalid_argument("generate_layout: counts must be >= 1");
  if (!(radius > 0.0)) throw std::invalid_argument("generate_layout: radius must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&](Index count) {
    std::vector<Eigen::Vector2d> pts;
    pts.reserve(static_cast<std::size_t>(count));
    for (Index i = 0; i < count; ++i) {
      const double angle = 2.0 * std::numbers::pi * unit(rng);
      const double r = radius * std::sqrt(unit(rng));
      pts.emplace_back(r * std::cos(angle), r * std::sin(angle));
    }
    return pts;
  };
  Layout layout;
  layout.region_radius = radius;
  layout.ap_positions = draw(m);
  layout.ris_positions = draw(n);
  layout.ue_positions = draw(l);
  return layout;
}

double path_loss_db(double distance_m, const FadingParams& params) {
  if (!(distance_m > 0.0)) throw std::invalid_argument("path_loss_db: distance must be positive");
  const double d = distance_m / 1000.0;
  const double d0 = params.ref_dist_0 / 1000.0;
  const double d1 = params.ref_dist_1 / 1000.0;
  const double a0 = distance_m < params.ref_dist_0 ? 1.0 : 0.0;
  const double a1 = distance_m < params.ref_dist_1 ? 1.0 : 0.0;
  return -140.7 - 35.0 * std::log10(d) + 20.0 * a0 * std::log10(d / d0) + 15.0 * a1 * std::log10(d / d1);
}

FadingDraws draw_fading(const Dims& dims, std::uint64_t seed) {
  check_dims(dims);
  Normal normal(seed);
  FadingDraws fd;
  fd.dims = dims;
  fd.direct = normal.complex(dims.L, dims.MK());
  fd.ap_ris.reserve(static_cast<std::size_t>(dims.M * dims.N));
  for (Index i = 0; i < dims.M * dims.N; ++i) fd.ap_ris.push_back(normal.complex(dims.R, dims.K));
  fd.ris_ue = normal.complex(dims.L, dims.NR());
  fd.shadow_direct = normal.real(dims.M, dims.L);
  fd.shadow_ap_ris = normal.real(dims.M, dims.N);
  fd.shadow_ris_ue = normal.real(dims.N, dims.L);
  return fd;
}

ChannelSet compose_channels(const Layout& layout, const FadingParams& params, const FadingDraws& draws) {
  const Dims& d = draws.dims;
  if (static_cast<Index>(layout.ap_positions.size()) != d.M || static_cast<Index>(layout.ue_positions.size()) != d.L ||
      static_cast<Index>(layout.ris_positions.size()) != d.N)
    throw std::invalid_argument("compose_channels: layout does not match dimensions");
  if (!(params.ref_dist_0 > 0.0 && params.ref_dist_0 < params.ref_dist_1))
    throw std::invalid_argument("compose_channels: need 0 < d0 < d1");

  ChannelSet cs;
  cs.dims = d;
  cs.direct = draws.direct;
  for (Index m = 0; m < d.M; ++m)
    for (Index l = 0; l < d.L; ++l) {
      const double dist = (layout.ap_positions[m] - layout.ue_positions[l]).norm();
      cs.direct.row(l).segment(m * d.K, d.K) *= amplitude(dist, draws.shadow_direct(m, l), params);
    }
  cs.ap_ris = draws.ap_ris;
  for (Index m = 0; m < d.M; ++m)
    for (Index n = 0; n < d.N; ++n) {
      const double dist = (layout.ap_positions[m] - layout.ris_positions[n]).norm();
      cs.ap_ris[static_cast<std::size_t>(m * d.N + n)] *= amplitude(dist, draws.shadow_ap_ris(m, n), params);
    }
  cs.ris_ue = draws.ris_ue;
  for (Index n = 0; n < d.N; ++n)
    for (Index l = 0; l < d.L; ++l) {
      const double dist = (layout.ris_positions[n] - layout.ue_positions[l]).norm();
      cs.ris_ue.row(l).segment(n * d.R, d.R) *= amplitude(dist, draws.shadow_ris_ue(n, l), params);
    }
  refresh_cascade(cs);
  return cs;
}

ChannelSet generate_channels(const Layout& layout, const FadingParams& params, Index K, Index R) {
  Dims dims;
  dims.M = static_cast<Index>(layout.ap_positions.size());
  dims.N = static_cast<Index>(layout.ris_positions.size());
  dims.L = static_cast<Index>(layout.ue_positions.size());
  dims.K = K;
  dims.R = R;
  return compose_channels(layout, params, draw_fading(dims, params.seed));
}

void refresh_cascade(ChannelSet& cs) {
  const Dims& d = cs.dims;
  cs.cascade.assign(static_cast<std::size_t>(d.L), MatrixXcd::Zero(d.NR(), d.MK()));
  for (Index l = 0; l < d.L; ++l) {
    auto& c = cs.cascade[static_cast<std::size_t>(l)];
    for (Index n = 0; n < d.N; ++n) {
      const auto g = cs.ris_ue.row(l).segment(n * d.R, d.R);
      for (Index m = 0; m < d.M; ++m)
        c.block(n * d.R, m * d.K, d.R, d.K) = g.transpose().asDiagonal() * cs.H(m, n);
    }
  }
}

Eigen::RowVectorXcd equivalent_channel(const ChannelSet& cs, const Eigen::VectorXcd& psi, Index ue) {
  if (psi.size() != cs.dims.NR()) throw std::invalid_argument("equivalent_channel: psi has wrong length");
  if (ue < 0 || ue >= cs.dims.L) throw std::out_of_range("equivalent_channel: user index");
  Eigen::RowVectorXcd h = cs.direct.row(ue);
  if (psi.size() > 0) h += psi.transpose() * cs.cascade[static_cast<std::size_t>(ue)];
  return h;
}

Eigen::MatrixXcd equivalent_channels(const ChannelSet& cs, const Eigen::VectorXcd& psi) {
  MatrixXcd out(cs.dims.L, cs.dims.MK());
  for (Index l = 0; l < cs.dims.L; ++l) out.row(l) = equivalent_channel(cs, psi, l);
  return out;
}

Layout collocated_layout(const Layout& layout) {
  Layout out = layout;
  out.ap_positions.assign(1, Eigen::Vector2d::Zero());
  return out;
}

FadingDraws collocated_draws(const FadingDraws& draws) {
  const Dims& d = draws.dims;
  FadingDraws out;
  out.dims = d;
  out.dims.M = 1;
  out.dims.K = d.MK();
  out.direct = draws.direct;
  out.ap_ris.clear();
  for (Index n = 0; n < d.N; ++n) {
    MatrixXcd h(d.R, d.MK());
    for (Index m = 0; m < d.M; ++m) h.middleCols(m * d.K, d.K) = draws.ap_ris[static_cast<std::size_t>(m * d.N + n)];
    out.ap_ris.push_back(std::move(h));
  }
  out.ris_ue = draws.ris_ue;
  out.shadow_direct = draws.shadow_direct.topRows(1);
  out.shadow_ap_ris = draws.shadow_ap_ris.topRows(1);
  out.shadow_ris_ue = draws.shadow_ris_ue;
  return out;
}

}  // namespace riscf
