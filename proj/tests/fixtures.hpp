#pragma once

#include <random>

#include "riscf/channel.hpp"
#include "riscf/model.hpp"

namespace fixtures {

using namespace riscf;

/// Unit-variance channels without large-scale fading.
inline ChannelSet unit_channels(const Dims& d, std::uint64_t seed) {
  const FadingDraws draws = draw_fading(d, seed);
  ChannelSet cs;
  cs.dims = d;
  cs.direct = draws.direct;
  cs.ap_ris = draws.ap_ris;
  cs.ris_ue = draws.ris_ue;
  refresh_cascade(cs);
  return cs;
}

inline Eigen::MatrixXcd random_complex(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  Eigen::MatrixXcd m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = {g(rng), g(rng)};
  return m;
}

inline Eigen::VectorXcd random_phases(Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> a(0.0, 6.283185307179586);
  Eigen::VectorXcd psi(n);
  for (Index i = 0; i < n; ++i) psi[i] = std::polar(1.0, a(rng));
  return psi;
}

/// Parameters with unit noise so that unit channels give O(1) SINRs.
inline SystemParams unit_params(const Dims& d) {
  SystemParams p = default_params(d);
  p.noise_power_w = 1.0;
  p.pmax_w.setConstant(1.0);
  return p;
}

inline NetworkState random_state(const Dims& d, std::mt19937_64& rng, double scale = 0.3) {
  NetworkState st;
  st.w = random_complex(d.MK(), d.L, rng) * scale;
  st.psi = random_phases(d.NR(), rng);
  return st;
}

}  // namespace fixtures
