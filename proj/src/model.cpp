#include "riscf/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace riscf {

double dbm_to_w(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double dbw_to_w(double dbw) { return std::pow(10.0, dbw / 10.0); }
double w_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

SystemParams default_params(const Dims& dims) {
  SystemParams p;
  p.dims = dims;
  p.bandwidth_hz = 20e6;
  p.noise_power_w = dbm_to_w(-104.0);
  p.pmax_w = Eigen::VectorXd::Constant(dims.M, dbm_to_w(35.0));
  p.pa_inefficiency = Eigen::VectorXd::Constant(dims.M, 1.2);
  p.p_ap_w = Eigen::VectorXd::Constant(dims.M, dbw_to_w(9.0));
  p.p_ue_w = Eigen::VectorXd::Constant(dims.L, dbm_to_w(10.0));
  p.p_ris_elem_w = dbm_to_w(10.0);
  p.p_bh_w = dbw_to_w(0.0);
  p.backhaul_cap_nats = Eigen::VectorXd::Constant(dims.M, 500.0 * std::numbers::ln2);
  p.backhaul_scale = Eigen::VectorXd::Ones(dims.M);
  p.rmin_nats = Eigen::VectorXd::Constant(dims.L, 0.5 * std::numbers::ln2);
  p.penalty = 1e3;
  return p;
}

std::vector<std::string> check(const SystemParams& p) {
  std::vector<std::string> bad;
  const Dims& d = p.dims;
  auto sized = [&](const Eigen::VectorXd& v, Index n, const char* name) {
    if (v.size() != n) {
      bad.push_back(std::string(name) + " has " + std::to_string(v.size()) + " entries, expected " +
                    std::to_string(n));
      return false;
    }
    return true;
  };
  if (d.M < 1 || d.L < 1 || d.K < 1 || d.N < 0 || d.R < 0) bad.emplace_back("dimensions must be positive");
  if (!(p.bandwidth_hz > 0.0)) bad.emplace_back("bandwidth must be positive");
  if (!(p.noise_power_w > 0.0)) bad.emplace_back("noise power must be positive");
  if (sized(p.pmax_w, d.M, "pmax") && !(p.pmax_w.array() > 0.0).all()) bad.emplace_back("pmax must be positive");
  if (sized(p.pa_inefficiency, d.M, "xi") && !(p.pa_inefficiency.array() >= 1.0).all())
    bad.emplace_back("xi (amplifier inefficiency) must be >= 1");
  if (sized(p.p_ap_w, d.M, "p_ap") && !(p.p_ap_w.array() > 0.0).all()) bad.emplace_back("AP circuit power must be positive");
  if (sized(p.p_ue_w, d.L, "p_ue") && !(p.p_ue_w.array() > 0.0).all()) bad.emplace_back("UE circuit power must be positive");
  if (!(p.p_ris_elem_w > 0.0)) bad.emplace_back("RIS element power must be positive");
  if (!(p.p_bh_w > 0.0)) bad.emplace_back("backhaul power must be positive");
  if (sized(p.backhaul_cap_nats, d.M, "cmax") && !(p.backhaul_cap_nats.array() > 0.0).all())
    bad.emplace_back("backhaul capacity must be positive");
  if (sized(p.backhaul_scale, d.M, "omega") && !(p.backhaul_scale.array() >= 1.0).all())
    bad.emplace_back("omega must be >= 1");
  if (sized(p.rmin_nats, d.L, "rmin") && !(p.rmin_nats.array() >= 0.0).all()) bad.emplace_back("rmin must be >= 0");
  if (!(p.penalty > 0.0)) bad.emplace_back("penalty must be positive");
  return bad;
}

Eigen::MatrixXcd link_gains(const ChannelSet& cs, const Eigen::VectorXcd& psi, const Beamformers& w) {
  if (w.rows() != cs.dims.MK() || w.cols() != cs.dims.L) throw std::invalid_argument("link_gains: beamformer shape");
  return equivalent_channels(cs, psi) * w;
}

Eigen::VectorXd sinrs_from_gains(const Eigen::MatrixXcd& gains, double noise_power_w) {
  const Index L = gains.rows();
  Eigen::VectorXd out(L);
  for (Index l = 0; l < L; ++l) {
    const double signal = std::norm(gains(l, l));
    const double interference = gains.row(l).squaredNorm() - signal;
    out[l] = signal / (std::max(interference, 0.0) + noise_power_w);
  }
  return out;
}

Eigen::VectorXd sinrs(const ChannelSet& cs, const NetworkState& state, double noise_power_w) {
  return sinrs_from_gains(link_gains(cs, state.psi, state.w), noise_power_w);
}

double sinr(const ChannelSet& cs, const NetworkState& state, Index ue, double noise_power_w) {
  const Eigen::RowVectorXcd h = equivalent_channel(cs, state.psi, ue);
  const Eigen::RowVectorXcd g = h * state.w;
  const double signal = std::norm(g[ue]);
  double interference = 0.0;
  for (Index j = 0; j < g.size(); ++j)
    if (j != ue) interference += std::norm(g[j]);
  return signal / (interference + noise_power_w);
}

double rate_nats(const ChannelSet& cs, const NetworkState& state, Index ue, double noise_power_w) {
  return std::log1p(sinr(cs, state, ue, noise_power_w));
}

Eigen::VectorXd rates_nats(const ChannelSet& cs, const NetworkState& state, double noise_power_w) {
  return sinrs(cs, state, noise_power_w).array().log1p();
}

Eigen::VectorXd ap_transmit_power(const SystemParams& params, const Beamformers& w) {
  const Index K = params.dims.K;
  Eigen::VectorXd out(params.dims.M);
  for (Index m = 0; m < params.dims.M; ++m) out[m] = w.middleRows(m * K, K).squaredNorm();
  return out;
}

double static_power(const SystemParams& p) {
  return p.p_ap_w.sum() + p.p_ue_w.sum() + static_cast<double>(p.dims.NR()) * p.p_ris_elem_w +
         static_cast<double>(p.dims.M * p.dims.L) * p.p_bh_w;
}

double total_power(const SystemParams& params, const Beamformers& w) {
  return params.pa_inefficiency.dot(ap_transmit_power(params, w)) + static_power(params);
}

double energy_efficiency(const SystemParams& params, const ChannelSet& cs, const NetworkState& state) {
  const double sum_rate = rates_nats(cs, state, params.noise_power_w).sum();
  return params.bandwidth_hz * sum_rate / std::numbers::ln2 / total_power(params, state.w);
}

double Residuals::worst_margin() const {
  double worst = 0.0;
  for (const auto* v : {&power, &rate, &backhaul})
    if (v->size() > 0) worst = std::min(worst, v->minCoeff());
  return worst;
}

double Residuals::max_modulus_deviation() const { return modulus.size() ? modulus.cwiseAbs().maxCoeff() : 0.0; }

Residuals constraint_residuals(const SystemParams& params, const ChannelSet& cs, const NetworkState& state) {
  Residuals res;
  res.power = params.pmax_w - ap_transmit_power(params, state.w);
  const Eigen::VectorXd rates = rates_nats(cs, state, params.noise_power_w);
  res.rate = rates - params.rmin_nats;
  res.backhaul = (params.backhaul_limit().array() - rates.sum()).matrix();
  res.modulus = (state.psi.cwiseAbs().array() - 1.0).matrix();
  return res;
}

}  // namespace riscf
